#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lrrl::optim {

// Flat parameter storage with optional named segments (layer -> offset/len).
struct ParamVector {
    struct Segment {
        std::string name;
        std::size_t offset = 0;
        std::size_t length = 0;
    };

    std::vector<double> values;
    std::vector<Segment> segments;

    ParamVector() = default;
    explicit ParamVector(std::vector<double> v) : values(std::move(v)) {}

    std::size_t size() const { return values.size(); }
    std::span<double> span() { return values; }
    std::span<const double> span() const { return values; }
    std::span<double> segment(std::size_t index);
    std::span<const double> segment(std::size_t index) const;
    bool all_finite() const;
};

enum class OptimizerKind { SGD, Adam, RMSPropM };

std::string to_string(OptimizerKind kind);
OptimizerKind optimizer_kind_from_string(const std::string& name);

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::Adam;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1.5e-4;
    double rms_decay = 0.9;
    // Nesterov coefficient for RMSProp; 0 disables momentum.
    double momentum = 0.999;
    bool centered = false;
    double rms_eps = 1.5e-4;

    void validate() const;
};

// Moment buffers for one parameter vector. Zero-initialized.
struct OptimizerState {
    OptimizerConfig config;
    std::vector<double> m;  // Adam first moment / RMSProp momentum buffer
    std::vector<double> v;  // second moment / mean square
    std::vector<double> g;  // RMSProp centered first moment
    std::uint64_t t = 0;

    OptimizerState() = default;
    OptimizerState(const OptimizerConfig& config, std::size_t size);
};

// theta <- theta - eta * grad
void sgd_step(std::span<double> params, std::span<const double> grads, double eta);

// Bias-corrected Adam. Increments t before correction.
void adam_step(OptimizerState& state, std::span<double> params, std::span<const double> grads, double eta);

// RMSProp, optionally centered, with Nesterov-style momentum when
// config.momentum > 0:
//   v <- rho v + (1 - rho) g^2
//   s = g / (sqrt(v [- gbar^2]) + eps)
//   m <- mu m + s;  theta <- theta - eta (mu m + s)
void rmsprop_step(OptimizerState& state, std::span<double> params, std::span<const double> grads, double eta);

// Dispatches on state.config.kind.
void step(OptimizerState& state, std::span<double> params, std::span<const double> grads, double eta);

}  // namespace lrrl::optim
