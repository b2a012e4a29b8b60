#include "lrrl/rl/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lrrl::rl {

QNetwork::QNetwork(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    if (dims_.size() < 2) throw std::invalid_argument("network needs at least an input and an output layer");
    for (auto d : dims_)
        if (d == 0) throw std::invalid_argument("layer widths must be positive");
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        const std::size_t w = dims_[l] * dims_[l + 1];
        params_.segments.push_back({"W" + std::to_string(l), offset, w});
        offset += w;
        params_.segments.push_back({"b" + std::to_string(l), offset, dims_[l + 1]});
        offset += dims_[l + 1];
    }
    params_.values.assign(offset, 0.0);
}

QNetwork QNetwork::initialized(std::vector<std::size_t> dims, Rng& rng) {
    QNetwork net(std::move(dims));
    for (std::size_t l = 0; l < net.layers(); ++l) {
        const double limit = 1.0 / std::sqrt(static_cast<double>(net.dims_[l]));
        for (double& w : net.weights(l)) w = (2.0 * uniform01(rng) - 1.0) * limit;
    }
    return net;
}

namespace {

// Pre-activations z[l] and activations a[l] for every layer (a[0] = input).
struct ForwardCache {
    std::vector<std::vector<double>> z;
    std::vector<std::vector<double>> a;
};

void forward_into(const QNetwork& net, std::span<const double> state, ForwardCache& cache) {
    if (state.size() != net.input_dim())
        throw std::invalid_argument("state has dimension " + std::to_string(state.size()) + ", network expects " +
                                    std::to_string(net.input_dim()));
    const std::size_t L = net.layers();
    cache.z.resize(L);
    cache.a.resize(L + 1);
    cache.a[0].assign(state.begin(), state.end());
    for (std::size_t l = 0; l < L; ++l) {
        const std::size_t in = net.dims()[l];
        const std::size_t out = net.dims()[l + 1];
        const auto W = net.weights(l);
        const auto b = net.bias(l);
        const auto& prev = cache.a[l];
        auto& z = cache.z[l];
        z.resize(out);
        for (std::size_t i = 0; i < out; ++i) {
            double acc = b[i];
            const double* row = W.data() + i * in;
            for (std::size_t j = 0; j < in; ++j) acc += row[j] * prev[j];
            z[i] = acc;
        }
        auto& act = cache.a[l + 1];
        act = z;
        if (l + 1 < L)
            for (double& v : act) v = v > 0.0 ? v : 0.0;
    }
}

void backward(const QNetwork& net, const ForwardCache& cache, std::size_t action, double scale,
              std::span<double> grads) {
    const std::size_t L = net.layers();
    std::vector<double> delta(net.output_dim(), 0.0);
    delta[action] = scale;
    std::vector<double> next;
    for (std::size_t l = L; l-- > 0;) {
        const std::size_t in = net.dims()[l];
        const std::size_t out = net.dims()[l + 1];
        if (l + 1 < L)
            for (std::size_t i = 0; i < out; ++i)
                if (!(cache.z[l][i] > 0.0)) delta[i] = 0.0;

        const auto& wseg = net.params().segments[2 * l];
        const auto& bseg = net.params().segments[2 * l + 1];
        double* gW = grads.data() + wseg.offset;
        double* gb = grads.data() + bseg.offset;
        const auto& prev = cache.a[l];
        for (std::size_t i = 0; i < out; ++i) {
            const double d = delta[i];
            if (d == 0.0) continue;
            gb[i] += d;
            double* row = gW + i * in;
            for (std::size_t j = 0; j < in; ++j) row[j] += d * prev[j];
        }
        if (l == 0) break;
        const auto W = net.weights(l);
        next.assign(in, 0.0);
        for (std::size_t i = 0; i < out; ++i) {
            const double d = delta[i];
            if (d == 0.0) continue;
            const double* row = W.data() + i * in;
            for (std::size_t j = 0; j < in; ++j) next[j] += row[j] * d;
        }
        delta.swap(next);
    }
}

}  // namespace

std::vector<double> QNetwork::forward(std::span<const double> state) const {
    ForwardCache cache;
    forward_into(*this, state, cache);
    return std::move(cache.a.back());
}

void QNetwork::accumulate_action_gradient(std::span<const double> state, std::size_t action, double scale,
                                          std::span<double> grads) const {
    if (action >= output_dim()) throw std::out_of_range("action index out of range");
    if (grads.size() != params_.size()) throw std::invalid_argument("gradient buffer size mismatch");
    ForwardCache cache;
    forward_into(*this, state, cache);
    backward(*this, cache, action, scale, grads);
}

LossAndGrad td_loss_and_grad(const QNetwork& net, const QNetwork& target, std::span<const Transition* const> batch,
                             double gamma) {
    if (batch.empty()) throw std::invalid_argument("TD loss needs a nonempty batch");
    if (net.dims() != target.dims()) throw std::invalid_argument("learner and target architectures differ");

    LossAndGrad out;
    out.grads = optim::ParamVector(std::vector<double>(net.params().size(), 0.0));
    out.grads.segments = net.params().segments;

    const double inv_batch = 1.0 / static_cast<double>(batch.size());
    ForwardCache cache;
    for (const Transition* tr : batch) {
        if (tr->action >= net.output_dim()) throw std::out_of_range("transition action out of range");
        double y = tr->reward;
        if (!tr->terminal) {
            const auto next_q = target.forward(tr->next_state);
            y += gamma * *std::max_element(next_q.begin(), next_q.end());
        }
        forward_into(net, tr->state, cache);
        const double err = cache.a.back()[tr->action] - y;
        out.loss += err * err * inv_batch;
        backward(net, cache, tr->action, 2.0 * err * inv_batch, out.grads.span());
    }
    return out;
}

LossAndGrad td_loss_and_grad(const QNetwork& net, const QNetwork& target, std::span<const Transition> batch,
                             double gamma) {
    std::vector<const Transition*> ptrs;
    ptrs.reserve(batch.size());
    for (const auto& tr : batch) ptrs.push_back(&tr);
    return td_loss_and_grad(net, target, ptrs, gamma);
}

std::size_t argmax(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("argmax of empty range");
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return best;
}

std::size_t act_epsilon_greedy(const QNetwork& net, std::span<const double> state, double epsilon, Rng& rng) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
    if (uniform01(rng) < epsilon) return uniform_index(rng, net.output_dim());
    return argmax(net.forward(state));
}

}  // namespace lrrl::rl
