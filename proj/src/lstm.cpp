#include "repad/lstm.hpp"

#include <algorithm>
#include <cmath>

namespace repad {

namespace {

using Kind = PredictorError::Kind;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Uniform in [0,1) built from the raw engine output, so the stream of draws
// does not depend on the standard library's distribution internals.
double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct StepCache {
    std::vector<double> i, f, g, o, c, tanh_c, h;
};

// Runs the recurrence from zero state; optionally records per-step
// activations for backpropagation. Returns the readout of the final state.
double run_forward(const LstmParams& m, std::span<const double> inputs,
                   std::vector<StepCache>* caches) {
    const int h = m.hidden;
    std::vector<double> h_prev(h, 0.0), c_prev(h, 0.0);
    StepCache step;
    step.i.resize(h);
    step.f.resize(h);
    step.g.resize(h);
    step.o.resize(h);
    step.c.resize(h);
    step.tanh_c.resize(h);
    step.h.resize(h);
    for (double x : inputs) {
        for (int u = 0; u < h; ++u) {
            double pre[4];
            for (int gate = 0; gate < 4; ++gate) {
                double acc = m.w_in[gate * h + u] * x + m.bias[gate * h + u];
                const double* row = &m.w_rec[(static_cast<std::size_t>(gate) * h + u) * h];
                for (int j = 0; j < h; ++j) acc += row[j] * h_prev[j];
                pre[gate] = acc;
            }
            const double iv = sigmoid(pre[kInput]);
            const double fv = sigmoid(pre[kForget]);
            const double gv = std::tanh(pre[kCandidate]);
            const double ov = sigmoid(pre[kOutput]);
            const double cv = fv * c_prev[u] + iv * gv;
            const double tc = std::tanh(cv);
            step.i[u] = iv;
            step.f[u] = fv;
            step.g[u] = gv;
            step.o[u] = ov;
            step.c[u] = cv;
            step.tanh_c[u] = tc;
            step.h[u] = ov * tc;
        }
        h_prev = step.h;
        c_prev = step.c;
        if (caches) caches->push_back(step);
    }
    double y = m.b_out;
    for (int u = 0; u < h; ++u) y += m.w_out[u] * h_prev[u];
    return y;
}

}  // namespace

LstmParams LstmParams::zeros(int hidden) {
    LstmParams p;
    p.hidden = hidden;
    p.w_in.assign(4u * hidden, 0.0);
    p.w_rec.assign(4u * static_cast<std::size_t>(hidden) * hidden, 0.0);
    p.bias.assign(4u * hidden, 0.0);
    p.w_out.assign(hidden, 0.0);
    p.b_out = 0.0;
    return p;
}

std::size_t LstmParams::parameter_count() const {
    return w_in.size() + w_rec.size() + bias.size() + w_out.size() + 1;
}

LstmParams init_model(const TrainConfig& config, std::mt19937_64& rng) {
    const int h = config.hidden_units;
    if (h < 1) throw std::invalid_argument("hidden_units must be at least 1");
    LstmParams p = LstmParams::zeros(h);
    const double r = 1.0 / std::sqrt(static_cast<double>(h));
    auto draw = [&] { return (2.0 * unit_uniform(rng) - 1.0) * r; };
    for (double& w : p.w_in) w = draw();
    for (double& w : p.w_rec) w = draw();
    for (double& w : p.w_out) w = draw();
    for (int u = 0; u < h; ++u) p.bias[kForget * h + u] = 1.0;
    return p;
}

Normalizer fit_normalizer(std::span<const double> window) {
    if (window.empty()) {
        throw PredictorError(Kind::WindowTooShort, "cannot fit a normalizer to an empty window");
    }
    double mean = 0.0;
    for (double v : window) mean += v;
    mean /= static_cast<double>(window.size());
    double var = 0.0;
    for (double v : window) var += (v - mean) * (v - mean);
    var /= static_cast<double>(window.size());
    return {mean, std::max(std::sqrt(var), kScaleFloor)};
}

double lstm_forward(const LstmParams& model, std::span<const double> inputs) {
    const double y = run_forward(model, inputs, nullptr);
    if (!std::isfinite(y)) {
        throw PredictorError(Kind::NonFiniteActivation, "forecast is not finite");
    }
    return y;
}

double loss_and_gradients(const LstmParams& model, std::span<const double> inputs,
                          double target, LstmParams& grads) {
    const int h = model.hidden;
    std::vector<StepCache> caches;
    caches.reserve(inputs.size());
    const double y = run_forward(model, inputs, &caches);
    const double err = y - target;
    const double loss = err * err;

    grads = LstmParams::zeros(h);
    const double dy = 2.0 * err;
    grads.b_out = dy;
    std::vector<double> dh(h, 0.0), dc(h, 0.0);
    if (!caches.empty()) {
        const auto& last = caches.back();
        for (int u = 0; u < h; ++u) {
            grads.w_out[u] = dy * last.h[u];
            dh[u] = dy * model.w_out[u];
        }
    }
    std::vector<double> dh_prev(h), dpre(4u * h);
    for (std::size_t ti = caches.size(); ti-- > 0;) {
        const StepCache& s = caches[ti];
        const double x = inputs[ti];
        const std::vector<double>* hp = ti > 0 ? &caches[ti - 1].h : nullptr;
        const std::vector<double>* cp = ti > 0 ? &caches[ti - 1].c : nullptr;
        for (int u = 0; u < h; ++u) {
            const double tc = s.tanh_c[u];
            const double dcu = dc[u] + dh[u] * s.o[u] * (1.0 - tc * tc);
            const double c_before = cp ? (*cp)[u] : 0.0;
            dpre[kInput * h + u] = dcu * s.g[u] * s.i[u] * (1.0 - s.i[u]);
            dpre[kForget * h + u] = dcu * c_before * s.f[u] * (1.0 - s.f[u]);
            dpre[kCandidate * h + u] = dcu * s.i[u] * (1.0 - s.g[u] * s.g[u]);
            dpre[kOutput * h + u] = dh[u] * tc * s.o[u] * (1.0 - s.o[u]);
            dc[u] = dcu * s.f[u];
        }
        std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
        for (int gate = 0; gate < 4; ++gate) {
            for (int u = 0; u < h; ++u) {
                const double dp = dpre[gate * h + u];
                grads.w_in[gate * h + u] += dp * x;
                grads.bias[gate * h + u] += dp;
                const std::size_t row = (static_cast<std::size_t>(gate) * h + u) * h;
                if (hp) {
                    for (int j = 0; j < h; ++j) grads.w_rec[row + j] += dp * (*hp)[j];
                }
                for (int j = 0; j < h; ++j) dh_prev[j] += dp * model.w_rec[row + j];
            }
        }
        dh = dh_prev;
    }
    return loss;
}

TrainedModel train(std::span<const double> window, const TrainConfig& config,
                   std::mt19937_64& rng, std::vector<double>* loss_curve) {
    if (window.size() < 2) {
        throw PredictorError(Kind::WindowTooShort, "training window needs at least two values");
    }
    TrainedModel model;
    model.norm = fit_normalizer(window);
    std::vector<double> z(window.size());
    for (std::size_t i = 0; i < window.size(); ++i) z[i] = model.norm.normalize(window[i]);
    const std::span<const double> inputs(z.data(), z.size() - 1);
    const double target = z.back();

    model.params = init_model(config, rng);
    if (loss_curve) loss_curve->clear();
    LstmParams grads;
    const double lr = config.learning_rate;
    const double clip = config.grad_clip;
    auto update = [lr, clip](std::vector<double>& p, const std::vector<double>& g) {
        for (std::size_t k = 0; k < p.size(); ++k) {
            p[k] -= lr * std::clamp(g[k], -clip, clip);
        }
    };
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const double loss = loss_and_gradients(model.params, inputs, target, grads);
        if (!std::isfinite(loss)) {
            throw PredictorError(Kind::NonFiniteLoss, "training loss became non-finite");
        }
        if (loss_curve) loss_curve->push_back(loss);
        update(model.params.w_in, grads.w_in);
        update(model.params.w_rec, grads.w_rec);
        update(model.params.bias, grads.bias);
        update(model.params.w_out, grads.w_out);
        model.params.b_out -= lr * std::clamp(grads.b_out, -clip, clip);
    }
    return model;
}

double predict_next(const TrainedModel& model, std::span<const double> recent) {
    if (recent.empty()) {
        throw PredictorError(Kind::WindowTooShort, "prediction needs at least one recent value");
    }
    std::vector<double> z(recent.size());
    for (std::size_t i = 0; i < recent.size(); ++i) z[i] = model.norm.normalize(recent[i]);
    return model.norm.denormalize(lstm_forward(model.params, z));
}

}  // namespace repad
