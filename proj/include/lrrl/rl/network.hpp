#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lrrl/optim.hpp"
#include "lrrl/rng.hpp"

namespace lrrl::rl {

struct Transition {
    std::vector<double> state;
    std::size_t action = 0;
    double reward = 0.0;
    std::vector<double> next_state;
    bool terminal = false;
};

// Dense multilayer perceptron: rectified-linear hidden layers, identity output.
// Parameters are laid out layer by layer as a row-major weight matrix
// (out x in) followed by the bias vector.
class QNetwork {
public:
    // All parameters zero.
    explicit QNetwork(std::vector<std::size_t> dims);

    // Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero.
    static QNetwork initialized(std::vector<std::size_t> dims, Rng& rng);

    std::vector<double> forward(std::span<const double> state) const;

    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t layers() const { return dims_.size() - 1; }
    std::size_t input_dim() const { return dims_.front(); }
    std::size_t output_dim() const { return dims_.back(); }

    optim::ParamVector& params() { return params_; }
    const optim::ParamVector& params() const { return params_; }

    std::span<double> weights(std::size_t layer) { return params_.segment(2 * layer); }
    std::span<const double> weights(std::size_t layer) const { return params_.segment(2 * layer); }
    std::span<double> bias(std::size_t layer) { return params_.segment(2 * layer + 1); }
    std::span<const double> bias(std::size_t layer) const { return params_.segment(2 * layer + 1); }

    // Adds d Q(state, action) / d theta, scaled by `scale`, into `grads`.
    void accumulate_action_gradient(std::span<const double> state, std::size_t action, double scale,
                                    std::span<double> grads) const;

private:
    std::vector<std::size_t> dims_;
    optim::ParamVector params_;
};

struct LossAndGrad {
    double loss = 0.0;
    optim::ParamVector grads;
};

// Squared TD error, averaged over the batch:
//   y = r + gamma * max_a' Q_target(s', a')   (y = r when terminal)
//   loss = mean (Q(s, a) - y)^2
// and its exact gradient with respect to the learner parameters; the target
// network is treated as constant.
LossAndGrad td_loss_and_grad(const QNetwork& net, const QNetwork& target, std::span<const Transition* const> batch,
                             double gamma);
LossAndGrad td_loss_and_grad(const QNetwork& net, const QNetwork& target, std::span<const Transition> batch,
                             double gamma);

// Lowest index among maximal entries.
std::size_t argmax(std::span<const double> values);

// Uniform action with probability epsilon, greedy otherwise.
std::size_t act_epsilon_greedy(const QNetwork& net, std::span<const double> state, double epsilon, Rng& rng);

}  // namespace lrrl::rl
