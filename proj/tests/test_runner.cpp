#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lrrl/runner/config.hpp"
#include "lrrl/runner/csv.hpp"
#include "lrrl/runner/experiment.hpp"
#include "lrrl/runner/metrics.hpp"

using namespace lrrl;
using namespace lrrl::runner;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("lrrl_tests_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// File contents with the named column dropped.
std::string without_column(const fs::path& p, const std::string& column) {
    const auto t = read_csv(p.string());
    const auto skip = t.column(column);
    std::string out;
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            if (i != skip) out += row[i] + ",";
        out += "\n";
    }
    return out;
}

std::map<std::string, std::string> csv_snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.path().extension() == ".csv") files[fs::relative(e.path(), dir).string()] = slurp(e.path());
    return files;
}

ExperimentConfig small_rl(const fs::path& out) {
    auto cfg = parse_config(R"(
experiment: rl
seeds: [0, 1, 2, 3, 4]
arms: [1.0e-3, 1.0e-2]
fixed_baselines: true
plot: false
rl:
  env: {kind: chain, length: 5}
  episodes: 20
  horizon: 30
  replay_start: 32
  hidden: [8]
  episodes_per_iteration: 5
)");
    cfg.output_dir = out.string();
    cfg.parallelism = 3;
    return cfg;
}

}  // namespace

TEST(Config, MinimalUsesTableDefaults) {
    const auto cfg = parse_config("experiment: rl\n");
    const auto& t = cfg.rl.train;
    EXPECT_EQ(t.gamma, 0.99);
    EXPECT_EQ(t.batch_size, 32u);
    EXPECT_EQ(t.lambda, 4u);
    EXPECT_EQ(t.kappa.value, 1u);
    EXPECT_EQ(t.kappa.unit, rl::KappaUnit::Episodes);
    EXPECT_EQ(t.epsilon.initial, 1.0);
    EXPECT_EQ(t.epsilon.final, 0.01);
    ASSERT_TRUE(t.reward_clip.has_value());
    EXPECT_EQ(t.reward_clip->first, -1.0);
    EXPECT_EQ(t.reward_clip->second, 1.0);
    EXPECT_EQ(cfg.optimizer.kind, optim::OptimizerKind::Adam);
    EXPECT_EQ(cfg.optimizer.beta1, 0.9);
    EXPECT_EQ(cfg.optimizer.beta2, 0.999);
    EXPECT_EQ(cfg.optimizer.adam_eps, 1.5e-4);
    EXPECT_EQ(cfg.optimizer.rms_decay, 0.9);
    EXPECT_EQ(cfg.optimizer.momentum, 0.999);
    EXPECT_FALSE(cfg.optimizer.centered);
    EXPECT_EQ(cfg.optimizer.rms_eps, 1.5e-4);
    EXPECT_EQ(cfg.bandit.kind, bandit::BanditKind::Exp3);
    EXPECT_EQ(cfg.bandit.exp3.delta, 0.99);
    EXPECT_EQ(cfg.bandit.exp3.window, 5u);
    EXPECT_EQ(cfg.arms, arm_sets::k5());
    EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{0}));
}

TEST(Config, K5Literal) {
    const auto cfg = parse_config("experiment: rl\narms: K5\n");
    const std::vector<double> want = {1.5625e-5, 3.125e-5, 6.25e-5, 1.25e-4, 2.5e-4};
    ASSERT_EQ(cfg.arms.size(), 5u);
    for (std::size_t k = 0; k < 5; ++k) {
        EXPECT_EQ(cfg.arms[k].kind, ArmSpec::Kind::FixedRate);
        EXPECT_EQ(cfg.arms[k].rate, want[k]);
    }
    const auto listed = parse_config("experiment: rl\narms: [1.5625e-5, 3.125e-5, 6.25e-5, 1.25e-4, 2.5e-4]\n");
    EXPECT_EQ(listed.arms, cfg.arms);
}

TEST(Config, SubsetsAndSchedulers) {
    EXPECT_EQ(parse_config("experiment: rl\narms: K_sparse3\n").arms,
              (ArmSet{ArmSpec::fixed(1.5625e-5), ArmSpec::fixed(6.25e-5), ArmSpec::fixed(2.5e-4)}));
    const auto s = parse_config("experiment: rl\narms:\n  - {eta0: 6.25e-5, decay: 1.0e-7}\n  - {rate: 1.0e-4}\n");
    EXPECT_EQ(s.arms[0], ArmSpec::exp_decay(6.25e-5, 1e-7));
    EXPECT_EQ(s.arms[1], ArmSpec::fixed(1e-4));
}

TEST(Config, NegativeGammaRejected) {
    try {
        parse_config("experiment: rl\nrl:\n  gamma: -0.5\n");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.line(), 3);
    }
}

TEST(Config, UnknownKeysRejectedWithLine) {
    try {
        parse_config("experiment: rl\nseeds: [1]\nrl:\n  episodes: 10\n  episdoes: 20\n");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.line(), 5);
        EXPECT_NE(std::string(e.what()).find("episdoes"), std::string::npos);
        EXPECT_EQ(std::string(e.what()).rfind("line 5:", 0), 0u);
    }
    EXPECT_THROW(parse_config("experiment: rl\nbogus: 1\n"), ConfigError);
}

TEST(Config, Exp3BlocksMustStateDeltaAndWindow) {
    try {
        parse_config("experiment: rl\nbandit:\n  kind: exp3\n  window: 5\n");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.line(), 3);
        EXPECT_NE(std::string(e.what()).find("delta"), std::string::npos);
    }
    EXPECT_THROW(parse_config("experiment: synthetic_bandit\nvariants:\n  - name: a\n    bandit: {kind: exp3, delta: 0.9}\n"),
                 ConfigError);
    const auto ok = parse_config("experiment: rl\nbandit: {kind: exp3, delta: 0.95, window: 3}\n");
    EXPECT_EQ(ok.bandit.exp3.delta, 0.95);
    EXPECT_EQ(ok.bandit.exp3.window, 3u);
    EXPECT_NO_THROW(parse_config("experiment: rl\nbandit: {kind: moss, rho: 2.0}\n"));
}

TEST(Config, InvariantsEnforced) {
    EXPECT_THROW(parse_config("experiment: rl\nseeds: []\n"), ConfigError);
    EXPECT_THROW(parse_config("experiment: rl\narms: []\n"), ConfigError);
    EXPECT_THROW(parse_config("experiment: landscape\nlandscape: {steps: 0}\n"), ConfigError);
    EXPECT_THROW(parse_config("experiment: rl\nrl: {episodes: 0}\n"), ConfigError);
    EXPECT_THROW(parse_config("experiment: rl\narms: [-1.0]\n"), ConfigError);
    EXPECT_THROW(parse_config("experiment: maze\n"), ConfigError);
    EXPECT_THROW(parse_config("seeds: [1]\n"), ConfigError);
    EXPECT_THROW(parse_config("experiment: rl\nrl: [1, 2\n"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/lrrl.yaml"), ConfigError);
}

TEST(Config, ExpandedVariants) {
    const auto cfg = parse_config("experiment: rl\narms: K_lowest3\nfixed_baselines: true\n");
    const auto v = cfg.expanded_variants();
    ASSERT_EQ(v.size(), 4u);
    EXPECT_EQ(v[0].name, "lrrl");
    EXPECT_EQ(v[3].name, "fixed_2");
    EXPECT_EQ(v[3].bandit.kind, bandit::BanditKind::Fixed);
    EXPECT_EQ(v[3].bandit.fixed_arm, 2u);
}

TEST(Metrics, SingleSeed) {
    const auto m = metrics({{1.0, 3.0, 2.0}}, 1, 1);
    EXPECT_EQ(m.max_average_return, 3.0);
    EXPECT_EQ(m.final_performance, 2.0);
    EXPECT_EQ(m.jumpstart_performance, 1.0);
}

TEST(Metrics, AveragesBeforeMax) {
    const auto m = metrics({{1.0, 3.0}, {3.0, 1.0}}, 1, 1);
    EXPECT_EQ(m.mean, (std::vector<double>{2.0, 2.0}));
    EXPECT_EQ(m.max_average_return, 2.0);
}

TEST(Metrics, ConstantReturns) {
    const double c = 4.25;
    const auto m = metrics({{c, c, c, c}, {c, c, c, c}, {c, c, c, c}}, 2, 3);
    EXPECT_EQ(m.max_average_return, c);
    EXPECT_EQ(m.final_performance, c);
    EXPECT_EQ(m.jumpstart_performance, c);
    for (double h : m.half_std) EXPECT_EQ(h, 0.0);
}

TEST(Metrics, WindowsAndHalfStd) {
    const auto m = metrics({{0.0, 2.0, 4.0, 6.0}, {2.0, 2.0, 8.0, 10.0}}, 2, 2);
    EXPECT_EQ(m.mean, (std::vector<double>{1.0, 2.0, 6.0, 8.0}));
    EXPECT_EQ(m.final_performance, 7.0);
    EXPECT_EQ(m.jumpstart_performance, 1.5);
    EXPECT_EQ(m.max_average_return, 8.0);
    EXPECT_EQ(m.half_std, (std::vector<double>{0.5, 0.0, 1.0, 1.0}));
    EXPECT_EQ(m.runs, 2u);
}

TEST(Metrics, EmptyInputRejected) {
    EXPECT_THROW(metrics({}, 1, 1), std::invalid_argument);
    EXPECT_THROW(metrics({{}}, 1, 1), std::invalid_argument);
}

TEST(Metrics, PermutationInvariant) {
    std::vector<std::vector<double>> runs = {{0.1, 0.5, 0.9, 0.3}, {0.7, 0.2, 0.4, 0.8}, {0.6, 0.6, 0.1, 0.2}};
    const auto base = metrics(runs, 2, 2);
    std::sort(runs.begin(), runs.end());
    do {
        const auto m = metrics(runs, 2, 2);
        EXPECT_NEAR(m.max_average_return, base.max_average_return, 1e-15);
        EXPECT_NEAR(m.final_performance, base.final_performance, 1e-15);
        EXPECT_NEAR(m.jumpstart_performance, base.jumpstart_performance, 1e-15);
        for (std::size_t i = 0; i < m.mean.size(); ++i) {
            EXPECT_NEAR(m.mean[i], base.mean[i], 1e-15);
            EXPECT_NEAR(m.half_std[i], base.half_std[i], 1e-15);
        }
    } while (std::next_permutation(runs.begin(), runs.end()));
}

TEST(Metrics, BlockMeans) {
    EXPECT_EQ(block_means({1, 2, 3, 4, 5}, 2), (std::vector<double>{1.5, 3.5, 5.0}));
    EXPECT_EQ(block_means({1, 2, 3}, 1), (std::vector<double>{1, 2, 3}));
}

TEST(Csv, RoundTripsDoubles) {
    for (double v : {0.1, 1.0 / 3.0, 1e-310, 5.1756078745048298e-299, -2.5e300, 0.0})
        EXPECT_EQ(parse_double(format_double(v)), v);
    EXPECT_TRUE(std::isinf(parse_double("inf")));
    EXPECT_TRUE(std::isnan(parse_double("nan")));
    EXPECT_THROW(parse_double("1.0x"), std::invalid_argument);
    EXPECT_THROW(parse_double(""), std::invalid_argument);
}

TEST(Experiment, FiveSeedsAggregateOverFiveRuns) {
    const auto dir = fresh_dir("five");
    const auto report = run_experiment(small_rl(dir));
    EXPECT_TRUE(report.all_completed());
    const auto agg = read_csv((dir / "aggregate.csv").string());
    ASSERT_FALSE(agg.rows.empty());
    for (double n : agg.numeric_column("runs")) EXPECT_EQ(n, 5.0);
    for (const char* f : {"aggregate.csv", "summary.yaml", "run_info.yaml"}) EXPECT_TRUE(fs::exists(dir / f));
    const auto info = slurp(dir / "run_info.yaml");
    EXPECT_NE(info.find("delta: 0.99"), std::string::npos);
    EXPECT_NE(info.find("window: 5"), std::string::npos);
    EXPECT_EQ(agg.header,
              (std::vector<std::string>{"group", "variant", "iteration", "runs", "mean", "half_std", "survivors_only"}));
    const auto run = read_csv((dir / "runs" / "chain__lrrl__seed0.csv").string());
    EXPECT_EQ(run.header.front(), "episode");
    const auto rounds = read_csv((dir / "runs" / "chain__lrrl__seed0.rounds.csv").string());
    const auto r = rounds.numeric_column("round");
    for (std::size_t i = 1; i < r.size(); ++i) EXPECT_GT(r[i], r[i - 1]);
}

TEST(Experiment, RerunIsByteIdenticalExceptWallClock) {
    const auto a = fresh_dir("rerun_a");
    const auto b = fresh_dir("rerun_b");
    run_experiment(small_rl(a));
    auto cfg = small_rl(b);
    cfg.parallelism = 1;
    run_experiment(cfg);
    std::size_t compared = 0;
    for (const auto& e : fs::directory_iterator(a / "runs")) {
        const auto name = e.path().filename().string();
        const auto other = b / "runs" / name;
        ASSERT_TRUE(fs::exists(other)) << name;
        if (name.find(".rounds.csv") != std::string::npos)
            EXPECT_EQ(without_column(e.path(), "wall_seconds"), without_column(other, "wall_seconds")) << name;
        else
            EXPECT_EQ(slurp(e.path()), slurp(other)) << name;
        ++compared;
    }
    EXPECT_EQ(compared, 30u);
    EXPECT_EQ(slurp(a / "aggregate.csv"), slurp(b / "aggregate.csv"));
}

TEST(Experiment, AggregatesRecomputeFromRunFiles) {
    const auto dir = fresh_dir("recompute");
    const auto report = run_experiment(small_rl(dir));
    const auto before = read_csv((dir / "aggregate.csv").string());
    fs::remove(dir / "aggregate.csv");
    const auto again = recompute_metrics(dir.string());
    const auto after = read_csv((dir / "aggregate.csv").string());
    ASSERT_EQ(before.rows.size(), after.rows.size());
    const auto m0 = before.numeric_column("mean"), m1 = after.numeric_column("mean");
    const auto h0 = before.numeric_column("half_std"), h1 = after.numeric_column("half_std");
    for (std::size_t i = 0; i < m0.size(); ++i) {
        EXPECT_NEAR(m0[i], m1[i], 1e-12);
        EXPECT_NEAR(h0[i], h1[i], 1e-12);
    }
    ASSERT_EQ(report.summaries.size(), again.summaries.size());
    for (std::size_t i = 0; i < report.summaries.size(); ++i)
        EXPECT_NEAR(report.summaries[i].metrics.final_performance, again.summaries[i].metrics.final_performance, 1e-12);
}

TEST(Experiment, PlottingLeavesCsvUntouched) {
    const auto dir = fresh_dir("plots");
    run_experiment(small_rl(dir));
    const auto before = csv_snapshot(dir);
    const auto svgs = write_plots(dir.string());
    EXPECT_FALSE(svgs.empty());
    for (const auto& p : svgs) EXPECT_EQ(slurp(p).rfind("<svg", 0), 0u);
    EXPECT_EQ(before, csv_snapshot(dir));
}

TEST(Experiment, DivergedRunsAreFlagged) {
    const auto dir = fresh_dir("diverged");
    auto cfg = parse_config(R"(
experiment: landscape
seeds: [0, 1, 2]
arms: [1.0e-3, 10.0]
fixed_baselines: true
plot: false
landscape: {functions: [zakharov], steps: 300}
)");
    cfg.output_dir = dir.string();
    const auto report = run_experiment(cfg);
    EXPECT_TRUE(report.all_completed());
    const auto* bad = report.find("zakharov", "fixed_1");
    ASSERT_NE(bad, nullptr);
    EXPECT_EQ(bad->diverged_seeds.size(), 3u);
    EXPECT_EQ(bad->survivors, 0u);
    const auto* good = report.find("zakharov", "fixed_0");
    EXPECT_EQ(good->survivors, 3u);
    EXPECT_NE(slurp(dir / "summary.yaml").find("diverged_seeds: [0, 1, 2]"), std::string::npos);
}

TEST(Experiment, SurvivorsOnlyAggregation) {
    const auto dir = fresh_dir("survivors");
    fs::create_directories(dir / "runs");
    const std::vector<std::vector<double>> values = {{1.0, 2.0}, {9.0, 9.0}, {3.0, 4.0}};
    std::ofstream info(dir / "run_info.yaml");
    info << "kind: rl\nvalue_column: discounted_return\niteration_block: 1\nfinal_window: 1\njumpstart_window: 1\nruns:\n";
    for (std::size_t s = 0; s < 3; ++s) {
        const std::string file = "runs/g__v__seed" + std::to_string(s) + ".csv";
        info << "  - {group: g, variant: v, seed: " << s << ", file: " << file
             << ", completed: true, diverged: " << (s == 1 ? "true" : "false") << "}\n";
        CsvWriter w((dir / file).string(), {"episode", "discounted_return"});
        for (std::size_t i = 0; i < values[s].size(); ++i) {
            w.cell(i).cell(values[s][i]);
            w.end_row();
        }
    }
    info.close();
    const auto report = recompute_metrics(dir.string());
    const auto* s = report.find("g", "v");
    ASSERT_NE(s, nullptr);
    EXPECT_EQ(s->survivors, 2u);
    EXPECT_EQ(s->diverged_seeds, (std::vector<std::uint64_t>{1}));
    EXPECT_EQ(s->metrics.mean, (std::vector<double>{2.0, 3.0}));
    const auto agg = read_csv((dir / "aggregate.csv").string());
    for (const auto& row : agg.rows) EXPECT_EQ(row[agg.column("survivors_only")], "1");
    EXPECT_NE(slurp(dir / "summary.yaml").find("survivors_only: true"), std::string::npos);
}

TEST(Experiment, FailedRunDoesNotStopSiblings) {
    const auto dir = fresh_dir("failed");
    auto cfg = small_rl(dir);
    cfg.seeds = {0, 1};
    fs::create_directories(dir / "runs");
    // A directory where a run file should go makes that run fail to write.
    fs::create_directories(dir / "runs" / "chain__fixed_0__seed1.csv");
    const auto report = run_experiment(cfg);
    EXPECT_FALSE(report.all_completed());
    std::size_t failed = 0;
    for (const auto& r : report.runs) failed += r.completed ? 0 : 1;
    EXPECT_EQ(failed, 1u);
    EXPECT_EQ(report.find("chain", "fixed_0")->failed_seeds, (std::vector<std::uint64_t>{1}));
    EXPECT_EQ(report.find("chain", "lrrl")->survivors, 2u);
}

TEST(Synthetic, RegretGrowsSublinearly) {
    SyntheticSection s;
    s.rounds = 10000;
    s.means = {0.2, 0.5, 0.8};
    bandit::BanditConfig b;
    b.kind = bandit::BanditKind::Exp3;
    b.exp3.delta = 1.0;
    double early = 0.0, late = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto run = simulate_synthetic(s, b, seed);
        double g = 0.0;
        for (std::size_t n = 0; n < run.regret.size(); ++n) {
            g += run.regret[n];
            if (n + 1 == 100) early += g / 100.0;
        }
        late += g / 10000.0;
    }
    EXPECT_LT(late, 0.5 * early);
}

TEST(Synthetic, IdenticalArmsHaveNoRegret) {
    SyntheticSection s;
    s.rounds = 2000;
    s.means = {0.4, 0.4, 0.4};
    for (auto kind : {bandit::BanditKind::Exp3, bandit::BanditKind::Moss}) {
        bandit::BanditConfig b;
        b.kind = kind;
        const auto run = simulate_synthetic(s, b, 3);
        for (double r : run.regret) EXPECT_EQ(r, 0.0);
    }
}

TEST(Synthetic, SwitchRaisesRegretSlopeThenFlattens) {
    SyntheticSection s;
    s.rounds = 2000;
    s.means = {0.75, 0.25};
    s.reward = SyntheticSection::Reward::Deterministic;
    s.switch_round = 1000;
    bandit::BanditConfig b;
    b.kind = bandit::BanditKind::Exp3;
    b.exp3.delta = 0.99;
    // Mean per-round regret over a window of rounds [from, to).
    auto slope = [&](std::size_t from, std::size_t to) {
        double total = 0.0;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto run = simulate_synthetic(s, b, seed);
            for (std::size_t n = from; n < to; ++n) total += run.regret[n];
        }
        return total / (20.0 * static_cast<double>(to - from));
    };
    const double before = slope(800, 1000);
    const double right_after = slope(1000, 1100);
    const double settled = slope(1800, 2000);
    EXPECT_GT(right_after, before);
    EXPECT_LT(settled, right_after);
}

TEST(Synthetic, ExperimentWritesRegretColumns) {
    const auto dir = fresh_dir("synthetic");
    auto cfg = parse_config("experiment: synthetic_bandit\nseeds: [0, 1]\nplot: false\nsynthetic: {rounds: 200}\n");
    cfg.output_dir = dir.string();
    const auto report = run_experiment(cfg);
    EXPECT_TRUE(report.all_completed());
    const auto t = read_csv((dir / "runs" / "stationary__lrrl__seed0.csv").string());
    EXPECT_EQ(t.header, (std::vector<std::string>{"round", "arm", "reward", "regret", "cumulative_regret", "p0", "p1", "p2"}));
    EXPECT_EQ(t.rows.size(), 200u);
}
