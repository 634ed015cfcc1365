#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "repad/detector.hpp"

namespace repad {

struct EvalConfig {
    int k = 7;  // detection-window half-width, in points
};

class MetricsError : public std::runtime_error {
  public:
    enum class Kind { IndexOutOfRange, UnsortedIndices, EmptyDurations, BadWindow };

    MetricsError(Kind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    Kind kind() const { return kind_; }

  private:
    Kind kind_;
};

// [center-k, center+k] clamped to [0, n).
struct DetectionWindow {
    std::size_t center = 0;
    std::size_t lo = 0;
    std::size_t hi = 0;

    bool contains(std::size_t idx) const { return lo <= idx && idx <= hi; }
};

DetectionWindow make_detection_window(std::size_t center, int k, std::size_t n);

struct DetectionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
};

// A reported index inside any label window is a true positive (every report
// counts, so tp + fp equals the number of reports); outside all windows it
// is a false positive. A label with no report in its window is one false
// negative. Indices must be < n and sorted ascending.
DetectionCounts match_detections(std::span<const std::size_t> reported,
                                 std::span<const std::size_t> labels, int k,
                                 std::size_t n);

struct Accuracy {
    std::optional<double> precision;  // empty when tp + fp == 0
    std::optional<double> recall;     // empty when tp + fn == 0
    std::optional<double> fscore;     // empty unless both above exist and sum > 0
};

Accuracy precision_recall_fscore(const DetectionCounts& counts);

// Fraction of verdict-bearing points that triggered a retrain:
// retrains / (n - (2b - 1)).
double retrain_ratio(std::size_t retrains, std::size_t n, int lookback);

struct TimingStats {
    double mean = 0.0;
    double sigma = 0.0;  // population standard deviation
};

TimingStats timing_stats(std::span<const double> durations);

struct EvalReport {
    std::string dataset;
    int lookback = 0;
    int k = 7;
    bool labeled = false;
    std::size_t label_count = 0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> fscore;
    std::size_t preparation_period = 0;
    std::size_t total_points = 0;
    std::size_t anomaly_count = 0;
    std::size_t retrain_count = 0;
    double retrain_ratio = 0.0;
    TimingStats detect_time;  // over verdict-bearing steps only
};

// Aggregates one run. `labels` are series indices of ground-truth anomalies;
// pass std::nullopt for unlabeled data (accuracy fields stay empty).
EvalReport build_report(std::span<const StepOutcome> trace,
                        const std::optional<std::vector<std::size_t>>& labels,
                        const DetectorConfig& config, const EvalConfig& eval);

// JSON object with every EvalReport field; absent accuracy values render as
// the string "n/a". Keys are emitted in sorted order, so the text is stable.
std::string report_to_json(const EvalReport& report, int indent = 2);

}  // namespace repad
