#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "lrrl/rng.hpp"

namespace lrrl::rl {

struct StepResult {
    std::vector<double> state;
    double reward = 0.0;
    bool terminal = false;
};

// Explicit MDP description for small environments, consumed by value iteration.
struct TabularModel {
    struct Outcome {
        double prob = 0.0;
        std::size_t next = 0;
        double reward = 0.0;
        bool terminal = false;
    };

    std::size_t states = 0;
    std::size_t actions = 0;
    std::size_t start = 0;
    // outcomes[s * actions + a]
    std::vector<std::vector<Outcome>> outcomes;

    const std::vector<Outcome>& at(std::size_t s, std::size_t a) const { return outcomes[s * actions + a]; }
};

class Environment {
public:
    virtual ~Environment() = default;

    virtual std::vector<double> reset() = 0;
    virtual StepResult step(std::size_t action) = 0;
    virtual std::size_t action_count() const = 0;
    virtual std::size_t state_dim() const = 0;
    virtual std::optional<TabularModel> model() const { return std::nullopt; }
};

// Optimal state values by synchronous value iteration (terminal outcomes do
// not bootstrap). Iterates until the max update is below `tolerance`.
std::vector<double> value_iteration(const TabularModel& model, double gamma, double tolerance = 1e-13,
                                    std::size_t max_iterations = 100000);

struct RewardCell {
    std::size_t row = 0;
    std::size_t col = 0;
    double reward = 0.0;
    bool terminal = false;
};

struct GridworldLayout {
    std::size_t size = 5;
    std::size_t start_row = 0;
    std::size_t start_col = 0;
    std::vector<RewardCell> cells;

    // Single terminal goal with reward 1 in the corner opposite the start.
    static GridworldLayout sparse(std::size_t size);
    void validate() const;
};

// Square grid, one-hot state. Actions: 0 up, 1 right, 2 down, 3 left; moves
// into a wall leave the agent in place. With probability slip_prob the chosen
// action is replaced by a uniformly random one. Entering a reward cell yields
// its reward; terminal cells end the episode.
class Gridworld final : public Environment {
public:
    Gridworld(GridworldLayout layout, double slip_prob, std::uint64_t seed);

    std::vector<double> reset() override;
    StepResult step(std::size_t action) override;
    std::size_t action_count() const override { return 4; }
    std::size_t state_dim() const override { return layout_.size * layout_.size; }
    std::optional<TabularModel> model() const override;

    std::size_t position() const { return position_; }
    const GridworldLayout& layout() const { return layout_; }

private:
    std::size_t move(std::size_t cell, std::size_t action) const;
    std::vector<double> one_hot(std::size_t cell) const;

    GridworldLayout layout_;
    double slip_prob_;
    Rng rng_;
    std::vector<double> rewards_;
    std::vector<bool> terminal_;
    std::size_t position_ = 0;
};

// Dense-reward chain of `length` cells, start at cell 0. Action 1 moves
// forward with reward +1, action 0 moves back (clamped at 0) with reward -1.
// Reaching the last cell terminates. Always-forward is optimal with return
// (1 - gamma^(length-1)) / (1 - gamma).
class Chain final : public Environment {
public:
    Chain(std::size_t length, std::uint64_t seed, double slip_prob = 0.0);

    std::vector<double> reset() override;
    StepResult step(std::size_t action) override;
    std::size_t action_count() const override { return 2; }
    std::size_t state_dim() const override { return length_; }
    std::optional<TabularModel> model() const override;

    std::size_t position() const { return position_; }

private:
    std::vector<double> one_hot(std::size_t cell) const;

    std::size_t length_;
    double slip_prob_;
    Rng rng_;
    std::size_t position_ = 0;
};

std::unique_ptr<Environment> gridworld_env(const GridworldLayout& layout, double slip_prob, std::uint64_t seed);
std::unique_ptr<Environment> chain_env(std::size_t length, std::uint64_t seed);

}  // namespace lrrl::rl
