#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "lrrl/runner/config.hpp"
#include "lrrl/runner/metrics.hpp"

namespace lrrl::runner {

struct RunOutcome {
    std::string group;    // environment, landscape or reward-process name
    std::string variant;
    std::uint64_t seed = 0;
    std::string file;     // per-run CSV, relative to the output directory
    bool completed = false;
    bool diverged = false;
    std::string error;
    // Per-iteration values feeding the aggregate (iteration returns for rl,
    // loss per step for landscapes, cumulative regret for synthetic bandits).
    std::vector<double> series;
};

struct GroupSummary {
    std::string group;
    std::string variant;
    MetricsSummary metrics;
    std::size_t survivors = 0;
    std::size_t total = 0;
    std::vector<std::uint64_t> diverged_seeds;
    std::vector<std::uint64_t> failed_seeds;
};

struct ExperimentReport {
    std::string output_dir;
    std::vector<RunOutcome> runs;
    std::vector<GroupSummary> summaries;

    bool all_completed() const;
    const GroupSummary* find(const std::string& group, const std::string& variant) const;
};

// Runs every (group x variant x seed) combination, writes
//   runs/<group>__<variant>__seed<k>.csv   (and .rounds.csv for rl)
//   aggregate.csv, summary.yaml, run_info.yaml, plots/*.svg (if enabled)
// under cfg.output_dir. A failing run is recorded and does not stop others.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Synthetic reward processes with known arm means; logs per-round pseudo-regret.
ExperimentReport synthetic_bandit_experiment(const ExperimentConfig& cfg);

// Recomputes aggregate.csv and summary.yaml from the per-run files in `dir`.
ExperimentReport recompute_metrics(const std::string& dir);

// Writes SVG learning curves and arm-selection timelines for `dir`.
std::vector<std::string> write_plots(const std::string& dir);

std::unique_ptr<rl::Environment> make_env(const EnvConfig& env, std::uint64_t seed);

// One synthetic-bandit run, exposed for tests.
struct SyntheticRun {
    std::vector<std::size_t> arms;
    std::vector<double> rewards;
    std::vector<double> regret;             // best mean - mean of pulled arm
    std::vector<std::vector<double>> probs; // selection distribution after each round
};

// Arm means in force at 1-based round n.
std::vector<double> synthetic_means(const SyntheticSection& section, std::size_t round);
SyntheticRun simulate_synthetic(const SyntheticSection& section, const bandit::BanditConfig& bandit,
                                std::uint64_t seed);

}  // namespace lrrl::runner
