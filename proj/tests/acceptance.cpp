// Acceptance suite: every release-gating behaviour, one PASS/FAIL line each.
// Exits with the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "repad/bench.hpp"
#include "repad/detector.hpp"
#include "repad/lstm.hpp"
#include "repad/metrics.hpp"
#include "repad/series_io.hpp"
#include "repad/trace_io.hpp"

using namespace repad;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

#define ACHECK(cond, msg)                         \
    do {                                          \
        if (!(cond)) throw Failure(std::string(msg)); \
    } while (0)

const std::filesystem::path kDataDir = REPAD_DATA_DIR;
const char* kDatasets[] = {"ec2_cpu_utilization_825cc2", "rds_cpu_utilization_cc0c53"};

struct BenchResult {
    std::vector<StepOutcome> trace;
    EvalReport report;
    double wall_s = 0.0;
};

DetectorConfig standard_config(int lookback) {
    DetectorConfig cfg;
    cfg.lookback = lookback;
    cfg.train.seed = 1;
    return cfg;
}

// One full detector pass over a bundled dataset, memoized per (stem, b).
const BenchResult& bench(const std::string& stem, int lookback) {
    static std::map<std::pair<std::string, int>, BenchResult> cache;
    const auto key = std::make_pair(stem, lookback);
    const auto found = cache.find(key);
    if (found != cache.end()) return found->second;

    ParseOptions opts;
    opts.permissive = true;
    const Series series = load_series(kDataDir / (stem + ".csv"), opts);
    const LabelSet labels = load_labels(kDataDir / (stem + "_labels.json"));
    const auto label_indices = align_labels(series, labels);

    const DetectorConfig cfg = standard_config(lookback);
    BenchResult result;
    const auto start = std::chrono::steady_clock::now();
    result.trace = run_series(series, cfg);
    result.wall_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.report = build_report(result.trace, label_indices, cfg, EvalConfig{7});
    result.report.dataset = series.name;
    return cache.emplace(key, std::move(result)).first->second;
}

// --- criteria ---------------------------------------------------------

void preparation_period_constants() {
    const std::pair<int, std::size_t> expect[] = {{3, 7}, {30, 61}, {60, 121}, {90, 181}};
    for (const auto& [b, pp] : expect) {
        ACHECK(preparation_period(b) == pp,
               "preparation_period(" + std::to_string(b) + ") != " + std::to_string(pp));
    }
}

void window_error_oracle() {
    std::mt19937_64 rng(101);
    auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t b = 1 + rng() % 12;
        std::vector<double> obs(b), pred(b);
        for (std::size_t i = 0; i < b; ++i) {
            obs[i] = rng() % 20 == 0 ? 0.0 : (uniform() - 0.5) * 200.0;
            pred[i] = (uniform() - 0.5) * 200.0;
        }
        const double got = compute_aare(obs, pred);
        long double sum = 0.0L;
        for (std::size_t i = 0; i < b; ++i) {
            const long double den = std::max<long double>(std::fabs(obs[i]), 1e-9L);
            sum += std::fabs(static_cast<long double>(obs[i]) - pred[i]) / den;
        }
        const double want = static_cast<double>(sum / static_cast<long double>(b));
        const double tol = 1e-12 * std::max(1.0, std::abs(want));
        ACHECK(std::abs(got - want) <= tol,
               "AARE mismatch on trial " + std::to_string(trial) + ": got " + fmt(got) +
                   ", oracle " + fmt(want));
    }
}

void threshold_oracle() {
    std::mt19937_64 rng(202);
    auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng() % 500;
        std::vector<double> hist(n);
        for (double& h : hist) h = uniform() * 10.0;
        const ThresholdStats got = compute_threshold(hist);

        long double mean = 0.0L;
        for (double h : hist) mean += h;
        mean /= static_cast<long double>(n);
        long double var = 0.0L;
        for (double h : hist) {
            var += (static_cast<long double>(h) - mean) * (static_cast<long double>(h) - mean);
        }
        var /= static_cast<long double>(n);
        const double want = static_cast<double>(mean + 3.0L * std::sqrt(var));

        ACHECK(std::abs(got.thd - want) <= 1e-12 * std::max(1.0, std::abs(want)),
               "threshold mismatch on trial " + std::to_string(trial) + ": got " + fmt(got.thd) +
                   ", oracle " + fmt(want));
        ACHECK(got.thd >= got.mean - 1e-15, "threshold fell below the mean");
    }
}

void gradient_check() {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        TrainConfig cfg;
        cfg.hidden_units = 4;
        cfg.seed = seed;
        std::mt19937_64 rng(seed);
        LstmParams model = init_model(cfg, rng);

        std::mt19937_64 data_rng(seed * 77 + 5);
        auto uniform = [&] { return static_cast<double>(data_rng() >> 11) * 0x1.0p-53; };
        std::vector<double> window(3);
        for (double& v : window) v = 1.0 + uniform() * 99.0;
        const Normalizer norm = fit_normalizer(window);
        std::vector<double> z(window.size());
        for (std::size_t i = 0; i < window.size(); ++i) z[i] = norm.normalize(window[i]);
        const std::vector<double> inputs(z.begin(), z.end() - 1);
        const double target = z.back();

        LstmParams grads;
        loss_and_gradients(model, inputs, target, grads);
        auto loss_at = [&](const LstmParams& m) {
            const double y = lstm_forward(m, inputs);
            return (y - target) * (y - target);
        };
        const double step = 1e-5;
        double worst = 0.0;
        auto probe = [&](std::vector<double> LstmParams::* field) {
            for (std::size_t k = 0; k < (model.*field).size(); ++k) {
                LstmParams plus = model, minus = model;
                (plus.*field)[k] += step;
                (minus.*field)[k] -= step;
                const double fd = (loss_at(plus) - loss_at(minus)) / (2.0 * step);
                const double ga = (grads.*field)[k];
                worst = std::max(worst,
                                 std::abs(ga - fd) / std::max(std::abs(ga) + std::abs(fd), 1e-4));
            }
        };
        probe(&LstmParams::w_in);
        probe(&LstmParams::w_rec);
        probe(&LstmParams::bias);
        probe(&LstmParams::w_out);
        {
            LstmParams plus = model, minus = model;
            plus.b_out += step;
            minus.b_out -= step;
            const double fd = (loss_at(plus) - loss_at(minus)) / (2.0 * step);
            worst = std::max(worst, std::abs(grads.b_out - fd) /
                                        std::max(std::abs(grads.b_out) + std::abs(fd), 1e-4));
        }
        ACHECK(worst < 1e-4,
               "seed " + std::to_string(seed) + ": max relative gradient error " + fmt(worst));
    }
}

void phase_boundaries() {
    Series s;
    s.name = "phases";
    for (std::size_t i = 0; i < 30; ++i) {
        s.points.push_back({i, 1000 + 300 * static_cast<std::int64_t>(i),
                            50.0 + 10.0 * std::sin(2.0 * M_PI * static_cast<double>(i) / 12.0)});
    }
    const auto rows = run_series(s, standard_config(3));
    for (const StepOutcome& row : rows) {
        const std::string at = " at index " + std::to_string(row.index);
        ACHECK(row.predicted.has_value() == (row.index >= 3), "prediction presence wrong" + at);
        ACHECK(row.aare.has_value() == (row.index >= 5), "AARE presence wrong" + at);
        ACHECK(row.threshold.has_value() == (row.index >= 7), "threshold presence wrong" + at);
        if (row.index < 7) {
            ACHECK(!row.anomaly && !row.retrained, "verdict before the preparation period" + at);
        }
    }
}

void single_spike() {
    Series s;
    s.name = "spike";
    for (std::size_t i = 0; i < 200; ++i) {
        s.points.push_back({i, 1000 + 300 * static_cast<std::int64_t>(i),
                            i == 60 ? 500.0 : 50.0});
    }
    const DetectorConfig cfg = standard_config(3);
    const auto rows = run_series(s, cfg);
    std::vector<std::size_t> anomalies;
    for (const StepOutcome& row : rows) {
        if (row.anomaly) anomalies.push_back(row.index);
    }
    ACHECK(anomalies.size() == 1,
           "expected exactly one anomaly, got " + std::to_string(anomalies.size()));
    ACHECK(anomalies[0] == 60, "anomaly at index " + std::to_string(anomalies[0]) + ", not 60");

    const std::vector<std::size_t> labels = {60};
    const EvalReport report = build_report(rows, labels, cfg, EvalConfig{7});
    ACHECK(report.tp == 1 && report.fp == 0 && report.fn == 0,
           "counts tp=" + std::to_string(report.tp) + " fp=" + std::to_string(report.fp) +
               " fn=" + std::to_string(report.fn));
    ACHECK(report.recall && *report.recall == 1.0, "recall is not 1");
}

std::string trace_text_without_time(const std::vector<StepOutcome>& rows) {
    std::vector<StepOutcome> scrubbed(rows);
    for (StepOutcome& row : scrubbed) row.duration_s = 0.0;
    return serialize_trace(scrubbed);
}

std::string report_text_without_time(EvalReport report) {
    report.detect_time = {};
    return report_to_json(report);
}

void determinism_on_bundled_data() {
    ParseOptions opts;
    opts.permissive = true;
    const Series series = load_series(kDataDir / "ec2_cpu_utilization_825cc2.csv", opts);
    const auto labels =
        align_labels(series, load_labels(kDataDir / "ec2_cpu_utilization_825cc2_labels.json"));
    const DetectorConfig cfg = standard_config(3);

    const auto first = run_series(series, cfg);
    const auto second = run_series(series, cfg);
    ACHECK(trace_text_without_time(first) == trace_text_without_time(second),
           "traces differ between identical runs");

    const EvalReport ra = build_report(first, labels, cfg, EvalConfig{7});
    const EvalReport rb = build_report(second, labels, cfg, EvalConfig{7});
    ACHECK(report_text_without_time(ra) == report_text_without_time(rb),
           "reports differ between identical runs");
}

void lookback_study_properties(std::vector<std::string>& notes) {
    for (const char* stem : kDatasets) {
        const BenchResult& b3 = bench(stem, 3);
        const BenchResult& b30 = bench(stem, 30);
        const std::string tag = std::string(stem) + ": ";

        ACHECK(b3.wall_s < 600.0 && b30.wall_s < 600.0, tag + "a scenario exceeded 10 minutes");
        ACHECK(b3.report.recall.has_value(), tag + "recall undefined at b=3");
        ACHECK(*b3.report.recall >= 0.5,
               tag + "recall at b=3 is " + fmt(*b3.report.recall) + " < 0.5");
        ACHECK(b3.report.retrain_ratio <= 0.05,
               tag + "retrain ratio at b=3 is " + fmt(b3.report.retrain_ratio) + " > 0.05");
        if (b3.report.fscore && b30.report.fscore) {
            ACHECK(*b3.report.fscore > *b30.report.fscore,
                   tag + "F(b=3)=" + fmt(*b3.report.fscore) + " not above F(b=30)=" +
                       fmt(*b30.report.fscore));
            notes.push_back(tag + "F(3)=" + fmt(*b3.report.fscore) + " F(30)=" +
                            fmt(*b30.report.fscore) + " recall(3)=" + fmt(*b3.report.recall) +
                            " ratio(3)=" + fmt(b3.report.retrain_ratio));
        } else {
            notes.push_back(tag + "F comparison vacuous (an F-score is undefined)");
        }
    }
}

void metric_matching_oracle() {
    std::mt19937_64 rng(303);
    const std::size_t n = 20;
    for (int trial = 0; trial < 10000; ++trial) {
        const int k = static_cast<int>(rng() % 10);
        std::vector<std::size_t> rep, lab;
        for (std::size_t i = 0; i < n; ++i) {
            if (rng() % 5 == 0) rep.push_back(i);
            if (rng() % 7 == 0) lab.push_back(i);
        }
        const DetectionCounts got = match_detections(rep, lab, k, n);

        DetectionCounts want;
        auto near = [&](std::size_t a, std::size_t c) {
            return std::llabs(static_cast<long long>(a) - static_cast<long long>(c)) <= k;
        };
        for (std::size_t r : rep) {
            bool inside = false;
            for (std::size_t l : lab) inside = inside || near(r, l);
            if (inside) {
                ++want.tp;
            } else {
                ++want.fp;
            }
        }
        for (std::size_t l : lab) {
            bool hit = false;
            for (std::size_t r : rep) hit = hit || near(r, l);
            if (!hit) ++want.fn;
        }
        ACHECK(got.tp == want.tp && got.fp == want.fp && got.fn == want.fn,
               "count mismatch on trial " + std::to_string(trial));
    }
}

void detection_time_scaling(std::vector<std::string>& notes) {
    const int lookbacks[] = {3, 30, 60, 90};
    for (const char* stem : kDatasets) {
        double previous = -1.0;
        std::string line = std::string(stem) + ": mu_d(s) =";
        for (int b : lookbacks) {
            const BenchResult& res = bench(stem, b);
            const double mu = res.report.detect_time.mean;
            line += " " + fmt(mu);
            if (b == 3) {
                ACHECK(mu < 0.1, std::string(stem) + ": mu_d(b=3) = " + fmt(mu) + " >= 0.1 s");
            }
            ACHECK(mu >= previous, std::string(stem) + ": mu_d not non-decreasing at b=" +
                                       std::to_string(b) + " (" + fmt(mu) + " < " +
                                       fmt(previous) + ")");
            previous = mu;
        }
        notes.push_back(line);
    }
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<void(std::vector<std::string>&)> check;
    };
    const Criterion criteria[] = {
        {"preparation-period constants (7/61/121/181)",
         [](auto&) { preparation_period_constants(); }},
        {"window error matches an independent oracle (1000 cases)",
         [](auto&) { window_error_oracle(); }},
        {"three-sigma threshold matches an independent oracle (1000 cases)",
         [](auto&) { threshold_oracle(); }},
        {"analytic gradients match central differences (20 seeds)",
         [](auto&) { gradient_check(); }},
        {"forecasts/errors/verdicts appear at indices 3/5/7 for b=3",
         [](auto&) { phase_boundaries(); }},
        {"a lone spike yields exactly one anomaly and perfect counts",
         [](auto&) { single_spike(); }},
        {"bundled-data runs are bit-identical apart from timing",
         [](auto&) { determinism_on_bundled_data(); }},
        {"look-back study: recall, F-trend, retrain ratio, wall time",
         [](auto& notes) { lookback_study_properties(notes); }},
        {"window matching equals brute force (10000 cases)",
         [](auto&) { metric_matching_oracle(); }},
        {"detection time: mu_d(3) < 0.1 s and non-decreasing in b",
         [](auto& notes) { detection_time_scaling(notes); }},
    };

    int failures = 0;
    int index = 0;
    for (const Criterion& criterion : criteria) {
        ++index;
        std::vector<std::string> notes;
        std::string verdict = "PASS";
        std::string detail;
        try {
            criterion.check(notes);
        } catch (const std::exception& e) {
            verdict = "FAIL";
            detail = e.what();
            ++failures;
        }
        std::printf("[%2d/10] %s  %s\n", index, verdict.c_str(), criterion.name);
        for (const std::string& note : notes) std::printf("         note: %s\n", note.c_str());
        if (!detail.empty()) std::printf("         reason: %s\n", detail.c_str());
        std::fflush(stdout);
    }
    std::printf("acceptance: %d/10 criteria passed\n", 10 - failures);
    return failures;
}
