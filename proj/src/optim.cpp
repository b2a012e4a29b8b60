#include "lrrl/optim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lrrl::optim {

std::span<double> ParamVector::segment(std::size_t index) {
    const auto& s = segments.at(index);
    return std::span<double>(values).subspan(s.offset, s.length);
}

std::span<const double> ParamVector::segment(std::size_t index) const {
    const auto& s = segments.at(index);
    return std::span<const double>(values).subspan(s.offset, s.length);
}

bool ParamVector::all_finite() const {
    return std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); });
}

std::string to_string(OptimizerKind kind) {
    switch (kind) {
        case OptimizerKind::SGD: return "sgd";
        case OptimizerKind::Adam: return "adam";
        case OptimizerKind::RMSPropM: return "rmsprop";
    }
    return "unknown";
}

OptimizerKind optimizer_kind_from_string(const std::string& name) {
    if (name == "sgd") return OptimizerKind::SGD;
    if (name == "adam") return OptimizerKind::Adam;
    if (name == "rmsprop") return OptimizerKind::RMSPropM;
    throw std::invalid_argument("unknown optimizer '" + name + "' (expected sgd, adam or rmsprop)");
}

void OptimizerConfig::validate() const {
    auto in_unit = [](double x) { return x >= 0.0 && x < 1.0; };
    if (!in_unit(beta1) || !in_unit(beta2)) throw std::invalid_argument("Adam betas must lie in [0, 1)");
    if (!in_unit(rms_decay)) throw std::invalid_argument("RMSProp decay must lie in [0, 1)");
    if (!in_unit(momentum)) throw std::invalid_argument("RMSProp momentum must lie in [0, 1)");
    if (!(adam_eps > 0.0) || !(rms_eps > 0.0)) throw std::invalid_argument("optimizer eps must be positive");
}

OptimizerState::OptimizerState(const OptimizerConfig& cfg, std::size_t size)
    : config(cfg), m(size, 0.0), v(size, 0.0), g(size, 0.0) {
    config.validate();
}

namespace {

void check_inputs(std::span<const double> params, std::span<const double> grads, double eta) {
    if (params.size() != grads.size()) throw std::invalid_argument("parameter/gradient shape mismatch");
    if (!(eta >= 0.0) || !std::isfinite(eta)) throw std::invalid_argument("learning rate must be finite and >= 0");
    for (double g : grads)
        if (!std::isfinite(g)) throw std::domain_error("non-finite gradient entry");
}

void check_state(const OptimizerState& state, std::size_t size) {
    if (state.m.size() != size || state.v.size() != size || state.g.size() != size)
        throw std::invalid_argument("optimizer state size does not match parameters");
}

}  // namespace

void sgd_step(std::span<double> params, std::span<const double> grads, double eta) {
    check_inputs(params, grads, eta);
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= eta * grads[i];
}

void adam_step(OptimizerState& state, std::span<double> params, std::span<const double> grads, double eta) {
    check_inputs(params, grads, eta);
    check_state(state, params.size());
    const auto& c = state.config;
    state.t += 1;
    const double t = static_cast<double>(state.t);
    const double correction1 = 1.0 - std::pow(c.beta1, t);
    const double correction2 = 1.0 - std::pow(c.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * g;
        state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * g * g;
        const double m_hat = state.m[i] / correction1;
        const double v_hat = state.v[i] / correction2;
        params[i] -= eta * m_hat / (std::sqrt(v_hat) + c.adam_eps);
    }
}

void rmsprop_step(OptimizerState& state, std::span<double> params, std::span<const double> grads, double eta) {
    check_inputs(params, grads, eta);
    check_state(state, params.size());
    const auto& c = state.config;
    state.t += 1;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.v[i] = c.rms_decay * state.v[i] + (1.0 - c.rms_decay) * g * g;
        double mean_square = state.v[i];
        if (c.centered) {
            state.g[i] = c.rms_decay * state.g[i] + (1.0 - c.rms_decay) * g;
            mean_square = std::max(mean_square - state.g[i] * state.g[i], 0.0);
        }
        const double scaled = g / (std::sqrt(mean_square) + c.rms_eps);
        if (c.momentum > 0.0) {
            state.m[i] = c.momentum * state.m[i] + scaled;
            params[i] -= eta * (c.momentum * state.m[i] + scaled);
        } else {
            params[i] -= eta * scaled;
        }
    }
}

void step(OptimizerState& state, std::span<double> params, std::span<const double> grads, double eta) {
    switch (state.config.kind) {
        case OptimizerKind::SGD:
            sgd_step(params, grads, eta);
            state.t += 1;
            return;
        case OptimizerKind::Adam: adam_step(state, params, grads, eta); return;
        case OptimizerKind::RMSPropM: rmsprop_step(state, params, grads, eta); return;
    }
}

}  // namespace lrrl::optim
