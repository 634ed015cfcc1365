#include "repad/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace repad {

namespace {

using Kind = MetricsError::Kind;

void check_indices(std::span<const std::size_t> indices, std::size_t n, const char* what) {
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= n) {
            throw MetricsError(Kind::IndexOutOfRange,
                               std::string(what) + " index " + std::to_string(indices[i]) +
                                   " is outside a series of " + std::to_string(n) + " points");
        }
        if (i > 0 && indices[i] <= indices[i - 1]) {
            throw MetricsError(Kind::UnsortedIndices,
                               std::string(what) + " indices must be strictly ascending");
        }
    }
}

}  // namespace

DetectionWindow make_detection_window(std::size_t center, int k, std::size_t n) {
    if (k < 0) {
        throw MetricsError(Kind::BadWindow, "window half-width must be non-negative");
    }
    if (center >= n) {
        throw MetricsError(Kind::IndexOutOfRange,
                           "window center " + std::to_string(center) +
                               " is outside a series of " + std::to_string(n) + " points");
    }
    DetectionWindow w;
    w.center = center;
    const std::size_t kk = static_cast<std::size_t>(k);
    w.lo = center >= kk ? center - kk : 0;
    w.hi = std::min(center + kk, n - 1);
    return w;
}

DetectionCounts match_detections(std::span<const std::size_t> reported,
                                 std::span<const std::size_t> labels, int k,
                                 std::size_t n) {
    check_indices(reported, n, "reported");
    check_indices(labels, n, "label");
    std::vector<DetectionWindow> windows;
    windows.reserve(labels.size());
    for (std::size_t center : labels) windows.push_back(make_detection_window(center, k, n));

    DetectionCounts counts;
    std::vector<bool> detected(windows.size(), false);
    for (std::size_t idx : reported) {
        bool inside = false;
        for (std::size_t w = 0; w < windows.size(); ++w) {
            if (windows[w].contains(idx)) {
                inside = true;
                detected[w] = true;
            }
        }
        if (inside) {
            ++counts.tp;
        } else {
            ++counts.fp;
        }
    }
    for (bool hit : detected) {
        if (!hit) ++counts.fn;
    }
    return counts;
}

Accuracy precision_recall_fscore(const DetectionCounts& counts) {
    Accuracy acc;
    const double tp = static_cast<double>(counts.tp);
    if (counts.tp + counts.fp > 0) {
        acc.precision = tp / static_cast<double>(counts.tp + counts.fp);
    }
    if (counts.tp + counts.fn > 0) {
        acc.recall = tp / static_cast<double>(counts.tp + counts.fn);
    }
    if (acc.precision && acc.recall && *acc.precision + *acc.recall > 0.0) {
        acc.fscore = 2.0 * *acc.precision * *acc.recall / (*acc.precision + *acc.recall);
    }
    return acc;
}

double retrain_ratio(std::size_t retrains, std::size_t n, int lookback) {
    const std::size_t warmup = 2u * static_cast<std::size_t>(lookback) - 1u;
    if (n <= warmup) return 0.0;
    return static_cast<double>(retrains) / static_cast<double>(n - warmup);
}

TimingStats timing_stats(std::span<const double> durations) {
    if (durations.empty()) {
        throw MetricsError(Kind::EmptyDurations, "no durations to aggregate");
    }
    const double n = static_cast<double>(durations.size());
    double mean = 0.0;
    for (double d : durations) mean += d;
    mean /= n;
    double var = 0.0;
    for (double d : durations) var += (d - mean) * (d - mean);
    var /= n;
    return {mean, std::sqrt(var)};
}

EvalReport build_report(std::span<const StepOutcome> trace,
                        const std::optional<std::vector<std::size_t>>& labels,
                        const DetectorConfig& config, const EvalConfig& eval) {
    EvalReport r;
    r.lookback = config.lookback;
    r.k = eval.k;
    r.total_points = trace.size();
    r.preparation_period = preparation_period(config.lookback);

    std::vector<std::size_t> reported;
    std::vector<double> durations;
    for (const StepOutcome& row : trace) {
        if (row.anomaly) {
            reported.push_back(row.index);
            ++r.anomaly_count;
        }
        if (row.retrained) ++r.retrain_count;
        if (row.threshold) durations.push_back(row.duration_s);
    }
    r.retrain_ratio = repad::retrain_ratio(r.retrain_count, trace.size(), config.lookback);
    if (!durations.empty()) r.detect_time = timing_stats(durations);

    if (labels) {
        r.labeled = true;
        r.label_count = labels->size();
        const DetectionCounts counts = match_detections(reported, *labels, eval.k, trace.size());
        r.tp = counts.tp;
        r.fp = counts.fp;
        r.fn = counts.fn;
        const Accuracy acc = precision_recall_fscore(counts);
        r.precision = acc.precision;
        r.recall = acc.recall;
        r.fscore = acc.fscore;
    }
    return r;
}

std::string report_to_json(const EvalReport& report, int indent) {
    nlohmann::json j;
    auto opt = [](const std::optional<double>& v) -> nlohmann::json {
        if (v) return *v;
        return "n/a";
    };
    j["dataset"] = report.dataset;
    j["lookback"] = report.lookback;
    j["k"] = report.k;
    j["labeled"] = report.labeled;
    j["label_count"] = report.label_count;
    if (report.labeled) {
        j["tp"] = report.tp;
        j["fp"] = report.fp;
        j["fn"] = report.fn;
    } else {
        j["tp"] = "n/a";
        j["fp"] = "n/a";
        j["fn"] = "n/a";
    }
    j["precision"] = opt(report.precision);
    j["recall"] = opt(report.recall);
    j["fscore"] = opt(report.fscore);
    j["preparation_period"] = report.preparation_period;
    j["total_points"] = report.total_points;
    j["anomaly_count"] = report.anomaly_count;
    j["retrain_count"] = report.retrain_count;
    j["retrain_ratio"] = report.retrain_ratio;
    j["detect_time_mean_s"] = report.detect_time.mean;
    j["detect_time_sigma_s"] = report.detect_time.sigma;
    j["tp_convention"] =
        "every reported index inside a label window counts as one true positive; "
        "a label whose window holds no report counts as one false negative";
    return j.dump(indent) + "\n";
}

}  // namespace repad
