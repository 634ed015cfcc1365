#include "repad/detector.hpp"

#include <chrono>
#include <cmath>

namespace repad {

namespace {
using Kind = DetectorError::Kind;
}

double compute_aare(std::span<const double> observed, std::span<const double> predicted,
                    double epsilon) {
    if (observed.size() != predicted.size()) {
        throw DetectorError(Kind::LengthMismatch,
                            "observed and predicted windows differ in length (" +
                                std::to_string(observed.size()) + " vs " +
                                std::to_string(predicted.size()) + ")");
    }
    if (observed.empty()) {
        throw DetectorError(Kind::LengthMismatch, "AARE needs at least one pair");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        sum += std::abs(observed[i] - predicted[i]) / std::max(std::abs(observed[i]), epsilon);
    }
    return sum / static_cast<double>(observed.size());
}

ThresholdStats compute_threshold(std::span<const double> aare_history) {
    if (aare_history.empty()) {
        throw DetectorError(Kind::EmptyHistory, "threshold needs at least one recorded AARE");
    }
    const double n = static_cast<double>(aare_history.size());
    double mean = 0.0;
    for (double a : aare_history) mean += a;
    mean /= n;
    double var = 0.0;
    for (double a : aare_history) var += (a - mean) * (a - mean);
    var /= n;
    ThresholdStats ts;
    ts.mean = mean;
    ts.sigma = std::sqrt(var);
    ts.thd = mean + 3.0 * ts.sigma;
    return ts;
}

std::size_t preparation_period(int lookback) {
    if (lookback < 2) {
        throw DetectorError(Kind::BadLookback, "look-back must be at least 2");
    }
    return 2u * static_cast<std::size_t>(lookback) + 1u;
}

Detector::Detector(DetectorConfig config) : config_(std::move(config)) {
    preparation_period(config_.lookback);  // validates the look-back
}

TrainedModel Detector::fit(std::size_t step_index, std::size_t begin, bool retrain) {
    const std::size_t b = static_cast<std::size_t>(config_.lookback);
    std::mt19937_64 rng(config_.train.seed);
    const std::span<const double> window(values_.data() + begin, b);
    TrainedModel model = train(window, config_.train, rng);
    training_log_.push_back({step_index, begin, b, retrain});
    return model;
}

void Detector::forecast_next() {
    const std::size_t t = values_.size() - 1;
    const std::size_t b = static_cast<std::size_t>(config_.lookback);
    const std::span<const double> recent(values_.data() + (t - b + 2), b - 1);
    const double p = predict_next(*model_, recent);
    if (predictions_.size() < t + 2) predictions_.resize(t + 2);
    predictions_[t + 1] = p;
}

double Detector::aare_at(std::size_t t) const {
    const std::size_t b = static_cast<std::size_t>(config_.lookback);
    std::vector<double> pred(b);
    for (std::size_t y = 0; y < b; ++y) pred[y] = *predictions_[t - b + 1 + y];
    return compute_aare(std::span(values_.data() + (t - b + 1), b), pred, config_.aare_epsilon);
}

StepOutcome Detector::step(const TimePoint& point) {
    const auto start = std::chrono::steady_clock::now();
    if (point.index != values_.size()) {
        throw DetectorError(Kind::OutOfOrderPoint,
                            "expected point " + std::to_string(values_.size()) + ", got " +
                                std::to_string(point.index));
    }
    values_.push_back(point.value);
    const std::size_t t = point.index;
    const std::size_t b = static_cast<std::size_t>(config_.lookback);

    StepOutcome out;
    out.index = t;
    out.timestamp = point.timestamp;
    out.value = point.value;
    if (t < predictions_.size() && predictions_[t]) out.predicted = predictions_[t];

    if (t + 1 >= b && t + 1 < 2 * b) {
        // Enough data to fit, too little prediction history to judge.
        model_ = fit(t, t + 1 - b, false);
        forecast_next();
    } else if (t + 1 >= 2 * b && t <= 2 * b) {
        // The error window is full: start recording AAREs, keep fitting.
        const double a = aare_at(t);
        out.aare = a;
        aares_.push_back(a);
        model_ = fit(t, t + 1 - b, false);
        forecast_next();
    } else if (t > 2 * b) {
        double a = aare_at(t);
        std::vector<double> history(aares_.begin(), aares_.end());
        if (config_.threshold_includes_current) history.push_back(a);
        const ThresholdStats ts = compute_threshold(history);
        out.threshold = ts;
        if (a > ts.thd) {
            // Suspicious step: refit on the b values before this point and
            // give the forecast a second chance before judging.
            TrainedModel candidate = fit(t, t - b, true);
            ++retrain_count_;
            out.retrained = true;
            const std::span<const double> recent(values_.data() + (t - b + 1), b - 1);
            const double redone = predict_next(candidate, recent);
            predictions_[t] = redone;
            out.predicted = redone;
            a = aare_at(t);
            if (a > ts.thd) {
                out.anomaly = true;
                // Keep the forecast, not the outlier, so one bad point does
                // not contaminate the next b-1 windows.
                values_.back() = redone;
            } else {
                model_ = std::move(candidate);
            }
        }
        out.aare = a;
        aares_.push_back(a);
        forecast_next();
    }
    // (t + 1 < b: just collect.)

    out.duration_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

std::vector<StepOutcome> run_series(const Series& series, const DetectorConfig& config) {
    Detector detector(config);
    std::vector<StepOutcome> outcomes;
    outcomes.reserve(series.points.size());
    for (const TimePoint& p : series.points) outcomes.push_back(detector.step(p));
    return outcomes;
}

}  // namespace repad
