#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace repad {

struct TrainConfig {
    int hidden_units = 10;
    int epochs = 50;
    double learning_rate = 0.005;
    std::uint64_t seed = 1;
    double grad_clip = 1.0;  // per-parameter gradient bound
};

// Gate order used throughout: input (i), forget (f), candidate (g), output (o).
enum Gate : int { kInput = 0, kForget = 1, kCandidate = 2, kOutput = 3 };

// Weights of the single-hidden-layer forecaster (scalar input, scalar output).
// The same shape doubles as the gradient container in training.
struct LstmParams {
    int hidden = 0;
    std::vector<double> w_in;   // 4*h, gate-major: w_in[gate*h + unit]
    std::vector<double> w_rec;  // 4*h*h, w_rec[(gate*h + unit)*h + source]
    std::vector<double> bias;   // 4*h
    std::vector<double> w_out;  // h, readout of the final hidden state
    double b_out = 0.0;

    static LstmParams zeros(int hidden);
    std::size_t parameter_count() const;
};

// Maps the training window to zero mean and unit-ish spread. The scale is
// the population standard deviation floored at kScaleFloor so constant
// windows stay well-defined.
inline constexpr double kScaleFloor = 1e-8;

struct Normalizer {
    double shift = 0.0;
    double scale = 1.0;
    double normalize(double v) const { return (v - shift) / scale; }
    double denormalize(double z) const { return z * scale + shift; }
};

class PredictorError : public std::runtime_error {
  public:
    enum class Kind { WindowTooShort, NonFiniteLoss, NonFiniteActivation };

    PredictorError(Kind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    Kind kind() const { return kind_; }

  private:
    Kind kind_;
};

// Draws every weight from U[-1/sqrt(h), 1/sqrt(h)] in a pinned order
// (input weights gate by gate, recurrent rows gate by gate, readout),
// then sets forget-gate biases to 1 and all other biases to 0. The
// uniform draw is derived from raw mt19937_64 output so results do not
// depend on the standard library's distribution implementation.
LstmParams init_model(const TrainConfig& config, std::mt19937_64& rng);

Normalizer fit_normalizer(std::span<const double> window);

// Runs the recurrence over `inputs` (already normalized) from zero initial
// state and returns the readout of the final hidden state.
double lstm_forward(const LstmParams& model, std::span<const double> inputs);

struct TrainedModel {
    LstmParams params;
    Normalizer norm;
};

// Squared error (y - target)^2 of the one-step forecast after consuming
// `inputs`, plus d(loss)/d(parameter) accumulated into `grads` (which is
// resized/zeroed to match). Gradients are exact and unclipped.
double loss_and_gradients(const LstmParams& model, std::span<const double> inputs,
                          double target, LstmParams& grads);

// Fits a fresh model to one window: the first n-1 normalized values are the
// inputs, the last is the target, and full-gradient descent runs for
// config.epochs steps with per-parameter clipping. `loss_curve`, when given,
// receives the pre-update loss of every epoch.
TrainedModel train(std::span<const double> window, const TrainConfig& config,
                   std::mt19937_64& rng, std::vector<double>* loss_curve = nullptr);

// One-step forecast from the most recent lookback-1 raw values.
double predict_next(const TrainedModel& model, std::span<const double> recent);

}  // namespace repad
