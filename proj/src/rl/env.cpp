#include "lrrl/rl/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

namespace lrrl::rl {

std::vector<double> value_iteration(const TabularModel& model, double gamma, double tolerance,
                                    std::size_t max_iterations) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
    std::vector<double> values(model.states, 0.0);
    std::vector<double> next(model.states, 0.0);
    for (std::size_t it = 0; it < max_iterations; ++it) {
        double change = 0.0;
        for (std::size_t s = 0; s < model.states; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            bool any = false;
            for (std::size_t a = 0; a < model.actions; ++a) {
                const auto& outs = model.at(s, a);
                if (outs.empty()) continue;
                any = true;
                double q = 0.0;
                for (const auto& o : outs) q += o.prob * (o.reward + (o.terminal ? 0.0 : gamma * values[o.next]));
                best = std::max(best, q);
            }
            next[s] = any ? best : 0.0;
            change = std::max(change, std::abs(next[s] - values[s]));
        }
        values.swap(next);
        if (change < tolerance) break;
    }
    return values;
}

GridworldLayout GridworldLayout::sparse(std::size_t size) {
    GridworldLayout layout;
    layout.size = size;
    layout.cells.push_back({size - 1, size - 1, 1.0, true});
    return layout;
}

void GridworldLayout::validate() const {
    if (size < 2) throw std::invalid_argument("gridworld size must be at least 2");
    if (start_row >= size || start_col >= size) throw std::invalid_argument("gridworld start is outside the grid");
    if (cells.empty()) throw std::invalid_argument("gridworld layout has no reward cells");
    std::set<std::pair<std::size_t, std::size_t>> seen;
    bool has_terminal = false;
    for (const auto& c : cells) {
        if (c.row >= size || c.col >= size)
            throw std::invalid_argument("reward cell (" + std::to_string(c.row) + "," + std::to_string(c.col) +
                                        ") is outside the grid");
        if (!std::isfinite(c.reward)) throw std::invalid_argument("reward cell value must be finite");
        if (!seen.insert({c.row, c.col}).second) throw std::invalid_argument("duplicate reward cell");
        if (c.terminal && c.row == start_row && c.col == start_col)
            throw std::invalid_argument("start cell cannot be terminal");
        has_terminal = has_terminal || c.terminal;
    }
    if (!has_terminal) throw std::invalid_argument("gridworld layout needs at least one terminal cell");
}

Gridworld::Gridworld(GridworldLayout layout, double slip_prob, std::uint64_t seed)
    : layout_(std::move(layout)), slip_prob_(slip_prob), rng_(make_stream(seed, 0xe4f)) {
    layout_.validate();
    if (!(slip_prob >= 0.0 && slip_prob <= 1.0)) throw std::invalid_argument("slip_prob must lie in [0, 1]");
    const std::size_t cells = layout_.size * layout_.size;
    rewards_.assign(cells, 0.0);
    terminal_.assign(cells, false);
    for (const auto& c : layout_.cells) {
        rewards_[c.row * layout_.size + c.col] = c.reward;
        terminal_[c.row * layout_.size + c.col] = c.terminal;
    }
    position_ = layout_.start_row * layout_.size + layout_.start_col;
}

std::size_t Gridworld::move(std::size_t cell, std::size_t action) const {
    const std::size_t n = layout_.size;
    std::size_t r = cell / n;
    std::size_t c = cell % n;
    switch (action) {
        case 0: if (r > 0) --r; break;
        case 1: if (c + 1 < n) ++c; break;
        case 2: if (r + 1 < n) ++r; break;
        case 3: if (c > 0) --c; break;
        default: throw std::out_of_range("gridworld action out of range");
    }
    return r * n + c;
}

std::vector<double> Gridworld::one_hot(std::size_t cell) const {
    std::vector<double> s(state_dim(), 0.0);
    s[cell] = 1.0;
    return s;
}

std::vector<double> Gridworld::reset() {
    position_ = layout_.start_row * layout_.size + layout_.start_col;
    return one_hot(position_);
}

StepResult Gridworld::step(std::size_t action) {
    if (action >= action_count()) throw std::out_of_range("gridworld action out of range");
    if (slip_prob_ > 0.0 && uniform01(rng_) < slip_prob_) action = uniform_index(rng_, action_count());
    position_ = move(position_, action);
    return {one_hot(position_), rewards_[position_], terminal_[position_]};
}

std::optional<TabularModel> Gridworld::model() const {
    TabularModel m;
    m.states = state_dim();
    m.actions = action_count();
    m.start = layout_.start_row * layout_.size + layout_.start_col;
    m.outcomes.resize(m.states * m.actions);
    for (std::size_t s = 0; s < m.states; ++s) {
        if (terminal_[s]) continue;
        for (std::size_t a = 0; a < m.actions; ++a) {
            auto& outs = m.outcomes[s * m.actions + a];
            auto add = [&](std::size_t next, double p) {
                for (auto& o : outs)
                    if (o.next == next) {
                        o.prob += p;
                        return;
                    }
                outs.push_back({p, next, rewards_[next], terminal_[next]});
            };
            add(move(s, a), 1.0 - slip_prob_);
            if (slip_prob_ > 0.0)
                for (std::size_t b = 0; b < m.actions; ++b) add(move(s, b), slip_prob_ / static_cast<double>(m.actions));
        }
    }
    return m;
}

Chain::Chain(std::size_t length, std::uint64_t seed, double slip_prob)
    : length_(length), slip_prob_(slip_prob), rng_(make_stream(seed, 0xc4a)) {
    if (length < 2) throw std::invalid_argument("chain length must be at least 2");
    if (!(slip_prob >= 0.0 && slip_prob <= 1.0)) throw std::invalid_argument("slip_prob must lie in [0, 1]");
}

std::vector<double> Chain::one_hot(std::size_t cell) const {
    std::vector<double> s(length_, 0.0);
    s[cell] = 1.0;
    return s;
}

std::vector<double> Chain::reset() {
    position_ = 0;
    return one_hot(position_);
}

StepResult Chain::step(std::size_t action) {
    if (action >= action_count()) throw std::out_of_range("chain action out of range");
    if (slip_prob_ > 0.0 && uniform01(rng_) < slip_prob_) action = uniform_index(rng_, action_count());
    double reward = 0.0;
    if (action == 1) {
        ++position_;
        reward = 1.0;
    } else {
        if (position_ > 0) --position_;
        reward = -1.0;
    }
    return {one_hot(position_), reward, position_ + 1 == length_};
}

std::optional<TabularModel> Chain::model() const {
    TabularModel m;
    m.states = length_;
    m.actions = 2;
    m.start = 0;
    m.outcomes.resize(m.states * m.actions);
    for (std::size_t s = 0; s + 1 < length_; ++s) {
        const std::size_t back = s > 0 ? s - 1 : 0;
        const std::size_t fwd = s + 1;
        for (std::size_t a = 0; a < 2; ++a) {
            auto& outs = m.outcomes[s * 2 + a];
            const double p_intended = 1.0 - slip_prob_ + slip_prob_ / 2.0;
            const double p_other = slip_prob_ / 2.0;
            const double p_fwd = a == 1 ? p_intended : p_other;
            const double p_back = a == 1 ? p_other : p_intended;
            if (p_fwd > 0.0) outs.push_back({p_fwd, fwd, 1.0, fwd + 1 == length_});
            if (p_back > 0.0) outs.push_back({p_back, back, -1.0, false});
        }
    }
    return m;
}

std::unique_ptr<Environment> gridworld_env(const GridworldLayout& layout, double slip_prob, std::uint64_t seed) {
    return std::make_unique<Gridworld>(layout, slip_prob, seed);
}

std::unique_ptr<Environment> chain_env(std::size_t length, std::uint64_t seed) {
    return std::make_unique<Chain>(length, seed);
}

}  // namespace lrrl::rl
