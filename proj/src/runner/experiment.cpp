#include "lrrl/runner/experiment.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "lrrl/landscapes.hpp"
#include "lrrl/rl/train.hpp"
#include "lrrl/runner/csv.hpp"

namespace fs = std::filesystem;

namespace lrrl::runner {

bool ExperimentReport::all_completed() const {
    return std::all_of(runs.begin(), runs.end(), [](const RunOutcome& r) { return r.completed; });
}

const GroupSummary* ExperimentReport::find(const std::string& group, const std::string& variant) const {
    for (const auto& s : summaries)
        if (s.group == group && s.variant == variant) return &s;
    return nullptr;
}

std::unique_ptr<rl::Environment> make_env(const EnvConfig& env, std::uint64_t seed) {
    if (env.kind == "gridworld") return rl::gridworld_env(rl::GridworldLayout::sparse(env.size), env.slip_prob, seed);
    if (env.kind == "chain") return std::make_unique<rl::Chain>(env.chain_length, seed, env.slip_prob);
    throw std::invalid_argument("unknown environment kind '" + env.kind + "'");
}

std::vector<double> synthetic_means(const SyntheticSection& section, std::size_t round) {
    std::vector<double> means = section.means;
    if (section.switch_round > 0 && round > section.switch_round) std::reverse(means.begin(), means.end());
    return means;
}

SyntheticRun simulate_synthetic(const SyntheticSection& section, const bandit::BanditConfig& bandit,
                                std::uint64_t seed) {
    Rng reward_rng = make_stream(seed, 0x5b);
    Rng bandit_rng = make_stream(seed, 0x5c);
    bandit::ArmController controller(section.means.size(), bandit, bandit_rng);
    std::normal_distribution<double> noise(0.0, section.noise_std);

    SyntheticRun run;
    run.arms.reserve(section.rounds);
    std::vector<double> rewards(section.means.size());
    for (std::size_t n = 1; n <= section.rounds; ++n) {
        const auto means = synthetic_means(section, n);
        for (std::size_t k = 0; k < means.size(); ++k) {
            switch (section.reward) {
                case SyntheticSection::Reward::Bernoulli: rewards[k] = uniform01(reward_rng) < means[k] ? 1.0 : 0.0; break;
                case SyntheticSection::Reward::Gaussian: rewards[k] = means[k] + noise(reward_rng); break;
                case SyntheticSection::Reward::Deterministic: rewards[k] = means[k]; break;
            }
        }
        const std::size_t arm = controller.current_arm();
        const double best = *std::max_element(means.begin(), means.end());
        run.arms.push_back(arm);
        run.rewards.push_back(rewards[arm]);
        run.regret.push_back(best - means[arm]);
        controller.observe(rewards[arm], bandit_rng);
        run.probs.push_back(controller.distribution());
    }
    return run;
}

namespace {

std::string run_stem(const std::string& group, const std::string& variant, std::uint64_t seed) {
    return group + "__" + variant + "__seed" + std::to_string(seed);
}

double normalized_rate(const ArmSet& arms, double rate) {
    double lo = 0.0;
    double hi = 0.0;
    bool first = true;
    for (const auto& a : arms) {
        const double r = a.effective_rate(0);
        lo = first ? r : std::min(lo, r);
        hi = first ? r : std::max(hi, r);
        first = false;
    }
    return hi > lo ? (rate - lo) / (hi - lo) : 0.0;
}

struct Job {
    RunOutcome meta;
    std::function<void(RunOutcome&)> body;
};

void execute(std::vector<Job>& jobs, std::size_t parallelism) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            auto& job = jobs[i];
            try {
                job.body(job.meta);
                job.meta.completed = true;
            } catch (const std::exception& e) {
                job.meta.completed = false;
                job.meta.error = e.what();
            }
        }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(parallelism, jobs.size()));
    if (threads == 1) {
        worker();
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

struct RunInfo {
    std::string kind;
    std::string value_column;
    std::size_t block = 1;
    MetricsWindows windows;
};

void write_run_info(const std::string& dir, const RunInfo& info, const std::vector<Variant>& variants,
                    const std::vector<RunOutcome>& runs) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value << info.kind;
    out << YAML::Key << "value_column" << YAML::Value << info.value_column;
    out << YAML::Key << "iteration_block" << YAML::Value << info.block;
    out << YAML::Key << "final_window" << YAML::Value << info.windows.final_window;
    out << YAML::Key << "jumpstart_window" << YAML::Value << info.windows.jumpstart_window;
    // Resolved bandit parameters, so nothing about a run is left implicit.
    out << YAML::Key << "variants" << YAML::Value << YAML::BeginSeq;
    for (const auto& v : variants) {
        out << YAML::BeginMap;
        out << YAML::Key << "name" << YAML::Value << v.name;
        out << YAML::Key << "bandit" << YAML::Value << bandit::to_string(v.bandit.kind);
        switch (v.bandit.kind) {
            case bandit::BanditKind::Exp3:
                out << YAML::Key << "alpha" << YAML::Value << format_double(v.bandit.exp3.alpha);
                out << YAML::Key << "delta" << YAML::Value << format_double(v.bandit.exp3.delta);
                out << YAML::Key << "window" << YAML::Value << v.bandit.exp3.window;
                out << YAML::Key << "exclude_current_feedback" << YAML::Value << v.bandit.exp3.exclude_current_feedback;
                out << YAML::Key << "weight_bound" << YAML::Value << format_double(v.bandit.exp3.weight_bound);
                break;
            case bandit::BanditKind::Moss:
                out << YAML::Key << "rho" << YAML::Value << format_double(v.bandit.rho);
                break;
            case bandit::BanditKind::Fixed:
                out << YAML::Key << "fixed_arm" << YAML::Value << v.bandit.fixed_arm;
                break;
        }
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "runs" << YAML::Value << YAML::BeginSeq;
    for (const auto& r : runs) {
        out << YAML::BeginMap;
        out << YAML::Key << "group" << YAML::Value << r.group;
        out << YAML::Key << "variant" << YAML::Value << r.variant;
        out << YAML::Key << "seed" << YAML::Value << r.seed;
        out << YAML::Key << "file" << YAML::Value << r.file;
        out << YAML::Key << "completed" << YAML::Value << r.completed;
        out << YAML::Key << "diverged" << YAML::Value << r.diverged;
        if (!r.error.empty()) out << YAML::Key << "error" << YAML::Value << r.error;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;
    std::ofstream(fs::path(dir) / "run_info.yaml") << out.c_str() << '\n';
}

std::vector<GroupSummary> aggregate(const std::string& dir, const std::string& kind,
                                    const std::vector<RunOutcome>& runs, const MetricsWindows& windows) {
    std::vector<std::pair<std::string, std::string>> order;
    for (const auto& r : runs) {
        const std::pair key{r.group, r.variant};
        if (std::find(order.begin(), order.end(), key) == order.end()) order.push_back(key);
    }

    CsvWriter agg((fs::path(dir) / "aggregate.csv").string(),
                  {"group", "variant", "iteration", "runs", "mean", "half_std", "survivors_only"});
    std::vector<GroupSummary> summaries;
    for (const auto& [group, variant] : order) {
        GroupSummary s;
        s.group = group;
        s.variant = variant;
        std::vector<std::vector<double>> series;
        for (const auto& r : runs) {
            if (r.group != group || r.variant != variant) continue;
            ++s.total;
            if (!r.completed)
                s.failed_seeds.push_back(r.seed);
            else if (r.diverged)
                s.diverged_seeds.push_back(r.seed);
            else if (!r.series.empty())
                series.push_back(r.series);
        }
        s.survivors = series.size();
        if (!series.empty()) {
            s.metrics = metrics(series, windows.final_window, windows.jumpstart_window);
            const bool partial = s.survivors < s.total;
            for (std::size_t i = 0; i < s.metrics.mean.size(); ++i) {
                std::size_t n = 0;
                for (const auto& run : series) n += i < run.size() ? 1 : 0;
                agg.cell(group).cell(variant).cell(i).cell(n).cell(s.metrics.mean[i]).cell(s.metrics.half_std[i])
                    .cell(std::string(partial ? "1" : "0"));
                agg.end_row();
            }
        }
        summaries.push_back(std::move(s));
    }

    YAML::Emitter out;
    std::size_t completed = 0;
    for (const auto& r : runs) completed += r.completed ? 1 : 0;
    out << YAML::BeginMap;
    out << YAML::Key << "experiment" << YAML::Value << kind;
    out << YAML::Key << "runs_total" << YAML::Value << runs.size();
    out << YAML::Key << "runs_completed" << YAML::Value << completed;
    out << YAML::Key << "all_completed" << YAML::Value << (completed == runs.size());
    out << YAML::Key << "groups" << YAML::Value << YAML::BeginSeq;
    for (const auto& s : summaries) {
        out << YAML::BeginMap;
        out << YAML::Key << "group" << YAML::Value << s.group;
        out << YAML::Key << "variant" << YAML::Value << s.variant;
        out << YAML::Key << "runs" << YAML::Value << s.total;
        out << YAML::Key << "survivors" << YAML::Value << s.survivors;
        out << YAML::Key << "survivors_only" << YAML::Value << (s.survivors < s.total);
        out << YAML::Key << "diverged_seeds" << YAML::Value << YAML::Flow << s.diverged_seeds;
        out << YAML::Key << "failed_seeds" << YAML::Value << YAML::Flow << s.failed_seeds;
        if (s.survivors > 0) {
            out << YAML::Key << "max_average_return" << YAML::Value << format_double(s.metrics.max_average_return);
            out << YAML::Key << "final_performance" << YAML::Value << format_double(s.metrics.final_performance);
            out << YAML::Key << "jumpstart_performance" << YAML::Value
                << format_double(s.metrics.jumpstart_performance);
        }
        out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;
    std::ofstream(fs::path(dir) / "summary.yaml") << out.c_str() << '\n';
    return summaries;
}

std::vector<RunOutcome> collect(std::vector<Job>& jobs) {
    std::vector<RunOutcome> runs;
    runs.reserve(jobs.size());
    for (auto& j : jobs) runs.push_back(std::move(j.meta));
    return runs;
}

ExperimentReport finish(const ExperimentConfig& cfg, const RunInfo& info, std::vector<RunOutcome> runs) {
    ExperimentReport report;
    report.output_dir = cfg.output_dir;
    write_run_info(cfg.output_dir, info, cfg.expanded_variants(), runs);
    report.summaries = aggregate(cfg.output_dir, info.kind, runs, info.windows);
    report.runs = std::move(runs);
    if (cfg.plot) write_plots(cfg.output_dir);
    return report;
}

ExperimentReport run_rl(const ExperimentConfig& cfg) {
    const std::string group = cfg.rl.env.kind;
    std::vector<Job> jobs;
    for (const auto& variant : cfg.expanded_variants()) {
        for (auto seed : cfg.seeds) {
            Job job;
            job.meta.group = group;
            job.meta.variant = variant.name;
            job.meta.seed = seed;
            job.meta.file = "runs/" + run_stem(group, variant.name, seed) + ".csv";
            job.body = [&cfg, variant, seed](RunOutcome& meta) {
                rl::TrainConfig train = cfg.rl.train;
                train.arms = cfg.arms;
                train.bandit = variant.bandit;
                train.optimizer = cfg.optimizer;
                train.seed = seed;
                Rng env_seed = make_stream(seed, 7);
                auto env = make_env(cfg.rl.env, env_seed());
                const auto result = rl::train(*env, train);

                const fs::path base = fs::path(cfg.output_dir) / "runs" / run_stem(meta.group, meta.variant, seed);
                CsvWriter ep(base.string() + ".csv", {"episode", "env_steps", "length", "discounted_return",
                                                      "reward_sum", "arm", "rate", "bandit_round"});
                std::vector<double> returns;
                for (const auto& e : result.episodes) {
                    ep.cell(e.episode).cell(static_cast<std::size_t>(e.env_steps)).cell(e.length)
                        .cell(e.discounted_return).cell(e.reward_sum).cell(e.arm).cell(e.rate)
                        .cell(static_cast<std::size_t>(e.bandit_round));
                    ep.end_row();
                    returns.push_back(e.discounted_return);
                }
                CsvWriter rounds(base.string() + ".rounds.csv",
                                 {"round", "env_step", "episode", "credited_arm", "credited_rate", "next_arm",
                                  "next_rate", "normalized_rate", "feedback", "improvement", "last_episode_return",
                                  "wall_seconds"});
                for (const auto& r : result.rounds) {
                    rounds.cell(static_cast<std::size_t>(r.round)).cell(static_cast<std::size_t>(r.env_step))
                        .cell(r.episode).cell(r.credited_arm).cell(r.credited_rate).cell(r.next_arm)
                        .cell(r.next_rate).cell(normalized_rate(train.arms, r.credited_rate)).cell(r.feedback)
                        .cell(r.improvement).cell(r.last_episode_return).cell(r.wall_seconds);
                    rounds.end_row();
                }
                meta.diverged = result.diverged;
                if (result.diverged) meta.error = result.failure;
                meta.series = block_means(returns, cfg.rl.episodes_per_iteration);
            };
            jobs.push_back(std::move(job));
        }
    }
    execute(jobs, cfg.parallelism);
    return finish(cfg, {"rl", "discounted_return", cfg.rl.episodes_per_iteration, cfg.metrics}, collect(jobs));
}

ExperimentReport run_landscapes(const ExperimentConfig& cfg) {
    std::vector<const landscapes::LandscapeFn*> fns;
    if (cfg.landscape.functions.empty())
        for (const auto& fn : landscapes::all()) fns.push_back(&fn);
    else
        for (const auto& name : cfg.landscape.functions) fns.push_back(&landscapes::by_name(name));

    std::vector<Job> jobs;
    for (const auto* fn : fns) {
        for (const auto& variant : cfg.expanded_variants()) {
            for (auto seed : cfg.seeds) {
                Job job;
                job.meta.group = fn->name;
                job.meta.variant = variant.name;
                job.meta.seed = seed;
                job.meta.file = "runs/" + run_stem(fn->name, variant.name, seed) + ".csv";
                job.body = [&cfg, fn, variant, seed](RunOutcome& meta) {
                    landscapes::LandscapeRunConfig run;
                    run.arms = cfg.landscape.reference_arms ? landscapes::default_arms(*fn) : cfg.arms;
                    run.bandit = variant.bandit;
                    run.steps = cfg.landscape.steps;
                    run.seed = seed;
                    run.feedback = cfg.landscape.feedback;
                    const auto it = cfg.landscape.starts.find(fn->name);
                    run.start = it != cfg.landscape.starts.end() ? it->second : fn->default_start;
                    const auto traj = landscapes::run_landscape(*fn, run);
                    const auto norm = landscapes::normalized_log_loss(traj, run.feedback.xi);

                    CsvWriter out((fs::path(cfg.output_dir) / meta.file).string(),
                                  {"step", "x", "y", "loss", "arm", "rate", "feedback", "normalized_log_loss"});
                    for (std::size_t i = 0; i < traj.points.size(); ++i) {
                        const auto& p = traj.points[i];
                        out.cell(p.step).cell(p.x[0]).cell(p.x[1]).cell(p.loss)
                            .cell(static_cast<long long>(p.arm)).cell(p.rate).cell(p.feedback).cell(norm[i]);
                        out.end_row();
                        meta.series.push_back(p.loss);
                    }
                    meta.diverged = traj.diverged;
                    if (traj.diverged) meta.error = "diverged at step " + std::to_string(traj.diverged_at);
                };
                jobs.push_back(std::move(job));
            }
        }
    }
    execute(jobs, cfg.parallelism);
    return finish(cfg, {"landscape", "loss", 1, cfg.metrics}, collect(jobs));
}

}  // namespace

ExperimentReport synthetic_bandit_experiment(const ExperimentConfig& cfg) {
    fs::create_directories(fs::path(cfg.output_dir) / "runs");
    const std::string group = cfg.synthetic.switch_round > 0 ? "switching" : "stationary";
    std::vector<Job> jobs;
    for (const auto& variant : cfg.expanded_variants()) {
        for (auto seed : cfg.seeds) {
            Job job;
            job.meta.group = group;
            job.meta.variant = variant.name;
            job.meta.seed = seed;
            job.meta.file = "runs/" + run_stem(group, variant.name, seed) + ".csv";
            job.body = [&cfg, variant, seed](RunOutcome& meta) {
                const auto run = simulate_synthetic(cfg.synthetic, variant.bandit, seed);
                std::vector<std::string> header = {"round", "arm", "reward", "regret", "cumulative_regret"};
                for (std::size_t k = 0; k < cfg.synthetic.means.size(); ++k) header.push_back("p" + std::to_string(k));
                CsvWriter out((fs::path(cfg.output_dir) / meta.file).string(), header);
                double cumulative = 0.0;
                for (std::size_t i = 0; i < run.arms.size(); ++i) {
                    cumulative += run.regret[i];
                    out.cell(i + 1).cell(run.arms[i]).cell(run.rewards[i]).cell(run.regret[i]).cell(cumulative);
                    for (double p : run.probs[i]) out.cell(p);
                    out.end_row();
                    meta.series.push_back(cumulative);
                }
            };
            jobs.push_back(std::move(job));
        }
    }
    execute(jobs, cfg.parallelism);
    return finish(cfg, {"synthetic_bandit", "cumulative_regret", 1, cfg.metrics}, collect(jobs));
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    fs::create_directories(fs::path(cfg.output_dir) / "runs");
    switch (cfg.kind) {
        case ExperimentKind::RL: return run_rl(cfg);
        case ExperimentKind::Landscape: return run_landscapes(cfg);
        case ExperimentKind::SyntheticBandit: return synthetic_bandit_experiment(cfg);
    }
    throw std::logic_error("unhandled experiment kind");
}

ExperimentReport recompute_metrics(const std::string& dir) {
    const auto info_path = fs::path(dir) / "run_info.yaml";
    if (!fs::exists(info_path)) throw std::runtime_error("no run_info.yaml in '" + dir + "'");
    const YAML::Node info = YAML::LoadFile(info_path.string());
    RunInfo ri;
    ri.kind = info["kind"].as<std::string>();
    ri.value_column = info["value_column"].as<std::string>();
    ri.block = info["iteration_block"].as<std::size_t>();
    ri.windows.final_window = info["final_window"].as<std::size_t>();
    ri.windows.jumpstart_window = info["jumpstart_window"].as<std::size_t>();

    ExperimentReport report;
    report.output_dir = dir;
    for (const auto& node : info["runs"]) {
        RunOutcome r;
        r.group = node["group"].as<std::string>();
        r.variant = node["variant"].as<std::string>();
        r.seed = node["seed"].as<std::uint64_t>();
        r.file = node["file"].as<std::string>();
        r.completed = node["completed"].as<bool>();
        r.diverged = node["diverged"].as<bool>();
        if (node["error"]) r.error = node["error"].as<std::string>();
        if (r.completed) {
            const auto values = read_csv((fs::path(dir) / r.file).string()).numeric_column(ri.value_column);
            r.series = ri.block > 1 ? block_means(values, ri.block) : values;
        }
        report.runs.push_back(std::move(r));
    }
    report.summaries = aggregate(dir, ri.kind, report.runs, ri.windows);
    return report;
}

}  // namespace lrrl::runner
