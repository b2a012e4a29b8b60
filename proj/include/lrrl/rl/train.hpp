#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lrrl/arms.hpp"
#include "lrrl/bandit.hpp"
#include "lrrl/optim.hpp"
#include "lrrl/rl/env.hpp"
#include "lrrl/rl/network.hpp"

namespace lrrl::rl {

// Linear decay from `initial` to `final` over `decay_steps` env steps.
struct EpsilonSchedule {
    double initial = 1.0;
    double final = 0.01;
    std::uint64_t decay_steps = 10000;

    double at(std::uint64_t step) const;
};

enum class KappaUnit { Steps, Episodes };

struct Kappa {
    std::uint64_t value = 1;
    KappaUnit unit = KappaUnit::Episodes;
};

struct TrainConfig {
    double gamma = 0.99;
    std::size_t episodes = 200;
    std::size_t horizon = 100;
    std::uint64_t lambda = 4;
    std::uint64_t tau = 100;
    Kappa kappa;
    std::size_t batch_size = 32;
    std::size_t replay_capacity = 10000;
    std::size_t replay_start = 200;
    EpsilonSchedule epsilon;
    std::optional<std::pair<double, double>> reward_clip = std::make_pair(-1.0, 1.0);
    std::vector<std::size_t> hidden = {64, 64};
    ArmSet arms;
    bandit::BanditConfig bandit;
    optim::OptimizerConfig optimizer;
    std::uint64_t seed = 0;

    void validate() const;
};

// One bandit round of the meta-loop.
struct BanditRoundRecord {
    std::uint64_t round = 0;
    std::uint64_t env_step = 0;
    std::size_t episode = 0;
    std::size_t credited_arm = 0;
    double credited_rate = 0.0;
    std::size_t next_arm = 0;
    double next_rate = 0.0;
    double feedback = 0.0;
    double improvement = 0.0;
    // Discounted return of the most recently completed episode (0 before any).
    double last_episode_return = 0.0;
    double wall_seconds = 0.0;
};

struct EpisodeRecord {
    std::size_t episode = 0;
    std::uint64_t env_steps = 0;
    std::size_t length = 0;
    // sum_t gamma^t r_t
    double discounted_return = 0.0;
    double reward_sum = 0.0;
    std::size_t arm = 0;
    double rate = 0.0;
    std::uint64_t bandit_round = 0;
};

struct TrainResult {
    std::vector<EpisodeRecord> episodes;
    std::vector<BanditRoundRecord> rounds;
    QNetwork network{std::vector<std::size_t>{1, 1}};
    std::uint64_t env_steps = 0;
    std::uint64_t learner_updates = 0;
    std::uint64_t target_syncs = 0;
    std::uint64_t weight_clamps = 0;
    bool diverged = false;
    std::string failure;
};

// Observation point after each learner update, for invariant checks.
struct LearnerStepView {
    std::uint64_t env_step = 0;
    const QNetwork& learner;
    const QNetwork& target;
    bool target_synced = false;
};

struct TrainHooks {
    std::function<void(const LearnerStepView&)> on_learner_step;
};

// Deep Q-learning with the bandit learning-rate meta-loop. Per env step:
// act epsilon-greedily, store the transition, accumulate R and C. Whenever
// C is a multiple of lambda: if the kappa window is satisfied, feed R/C to the
// bandit, pick the next arm and reset R, C; then (once the replay buffer holds
// replay_start transitions) take one optimizer step with the rate of the arm
// in force, and copy learner -> target when tau steps have passed since the
// last copy.
TrainResult train(Environment& env, const TrainConfig& cfg, const TrainHooks& hooks = {});

}  // namespace lrrl::rl
