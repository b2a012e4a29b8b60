#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "lrrl/arms.hpp"
#include "lrrl/bandit.hpp"
#include "lrrl/landscapes.hpp"
#include "lrrl/optim.hpp"
#include "lrrl/rl/train.hpp"

namespace lrrl::runner {

// Parse or validation failure. line is 1-based; 0 when no position applies.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& message, int line);
    int line() const { return line_; }

private:
    int line_;
};

enum class ExperimentKind { Landscape, RL, SyntheticBandit };

std::string to_string(ExperimentKind kind);

struct Variant {
    std::string name;
    bandit::BanditConfig bandit;
};

struct EnvConfig {
    std::string kind = "gridworld";  // gridworld | chain
    std::size_t size = 5;
    double slip_prob = 0.0;
    std::size_t chain_length = 10;
};

struct RLSection {
    // arms, bandit, optimizer and seed are filled per run from the experiment.
    rl::TrainConfig train;
    EnvConfig env;
    std::size_t episodes_per_iteration = 10;
};

struct LandscapeSection {
    std::vector<std::string> functions;
    std::size_t steps = 2000;
    std::map<std::string, landscapes::Vec2> starts;
    landscapes::FeedbackConfig feedback;
    // Use landscapes::default_arms(fn) per function instead of the experiment
    // arm set. Set when a landscape config has no `arms` key or `arms: reference`.
    bool reference_arms = false;
};

struct SyntheticSection {
    enum class Reward { Bernoulli, Gaussian, Deterministic };

    std::size_t rounds = 10000;
    std::vector<double> means = {0.2, 0.5, 0.8};
    Reward reward = Reward::Bernoulli;
    double noise_std = 0.1;
    // 0 disables the switch; otherwise the means are reversed from this round on.
    std::size_t switch_round = 0;
};

struct MetricsWindows {
    std::size_t final_window = 5;
    std::size_t jumpstart_window = 2;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::RL;
    std::string name = "experiment";
    ArmSet arms;
    bandit::BanditConfig bandit;
    optim::OptimizerConfig optimizer;
    std::vector<Variant> variants;
    bool fixed_baselines = false;
    std::vector<std::uint64_t> seeds = {0};
    std::string output_dir = "out";
    std::size_t parallelism = 1;
    bool plot = true;
    MetricsWindows metrics;
    RLSection rl;
    LandscapeSection landscape;
    SyntheticSection synthetic;

    // Variants actually run: the configured ones (or a single "lrrl" variant
    // using `bandit`), plus one fixed_<k> variant per arm when
    // fixed_baselines is set.
    std::vector<Variant> expanded_variants() const;

    void validate() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace lrrl::runner
