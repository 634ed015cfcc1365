#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "repad/lstm.hpp"
#include "repad/series_io.hpp"

namespace repad {

struct DetectorConfig {
    int lookback = 3;  // b: window length for training, AARE, and inputs
    TrainConfig train;
    double aare_epsilon = 1e-9;  // floor for |v| in relative-error terms
    // When judging point t, include AARE_t itself in the threshold history
    // (default: the threshold uses strictly earlier AAREs only).
    bool threshold_includes_current = false;
};

struct ThresholdStats {
    double mean = 0.0;
    double sigma = 0.0;  // population standard deviation
    double thd = 0.0;    // mean + 3 * sigma
};

// Everything the detector can say about one consumed point. Optional fields
// stay empty in the phases where the quantity does not exist yet.
struct StepOutcome {
    std::size_t index = 0;
    std::int64_t timestamp = 0;
    double value = 0.0;  // observed value, even when the point is anomalous
    std::optional<double> predicted;      // forecast made for this point
    std::optional<double> aare;           // final value recorded for this step
    std::optional<ThresholdStats> threshold;  // the one used for the verdict
    bool retrained = false;
    bool anomaly = false;
    double duration_s = 0.0;  // wall-clock time spent inside step()
};

class DetectorError : public std::runtime_error {
  public:
    enum class Kind { LengthMismatch, EmptyHistory, OutOfOrderPoint, BadLookback };

    DetectorError(Kind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    Kind kind() const { return kind_; }

  private:
    Kind kind_;
};

// Mean of |observed - predicted| / max(|observed|, epsilon) over one window.
double compute_aare(std::span<const double> observed, std::span<const double> predicted,
                    double epsilon = 1e-9);

// Three-sigma bound over recorded AAREs (population variance).
ThresholdStats compute_threshold(std::span<const double> aare_history);

// Number of leading points consumed before the first verdict: 2b + 1.
std::size_t preparation_period(int lookback);

// One model-fitting event, kept for auditing which values trained which model.
struct TrainingEvent {
    std::size_t step = 0;    // index of the point being consumed when it ran
    std::size_t begin = 0;   // first series index of the training window
    std::size_t length = 0;
    bool retrain = false;    // triggered by a threshold breach
};

// Streaming detector. Feed points strictly in index order; each call returns
// the verdict (or lack of one) for that point.
//
// Life of a point at time t with look-back b:
//   t <  b-1   collect only
//   t < 2b-1   train on the last b values, forecast the next point
//   t <= 2b    additionally start recording AARE (no verdict yet)
//   t >= 2b+1  judge AARE against the three-sigma threshold; on a breach,
//              retrain on the b values before t, re-forecast v_t, and only
//              report an anomaly if the recomputed AARE still breaches.
//
// A point reported anomalous is replaced by its forecast in the retained
// history, so one outlier does not poison the next b-1 windows (the trace
// still carries the observed value).
class Detector {
  public:
    explicit Detector(DetectorConfig config);

    StepOutcome step(const TimePoint& point);

    const DetectorConfig& config() const { return config_; }
    std::size_t points_seen() const { return values_.size(); }
    std::size_t retrain_count() const { return retrain_count_; }
    std::span<const double> aare_history() const { return aares_; }
    std::span<const TrainingEvent> training_log() const { return training_log_; }
    // Values as the detector retains them (anomalous points replaced).
    std::span<const double> history() const { return values_; }

  private:
    TrainedModel fit(std::size_t step_index, std::size_t begin, bool retrain);
    void forecast_next();
    double aare_at(std::size_t t) const;

    DetectorConfig config_;
    std::vector<double> values_;
    // predictions_[t] is the forecast made for series index t, if any.
    std::vector<std::optional<double>> predictions_;
    std::vector<double> aares_;  // recorded AAREs, from index 2b-1 onward
    std::optional<TrainedModel> model_;
    std::size_t retrain_count_ = 0;
    std::vector<TrainingEvent> training_log_;
};

std::vector<StepOutcome> run_series(const Series& series, const DetectorConfig& config);

}  // namespace repad
