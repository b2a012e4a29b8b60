#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "lrrl/runner/config.hpp"
#include "lrrl/runner/csv.hpp"
#include "lrrl/runner/experiment.hpp"

namespace {

void print_summaries(const lrrl::runner::ExperimentReport& report) {
    using lrrl::runner::format_double;
    for (const auto& s : report.summaries) {
        std::cout << s.group << " / " << s.variant << ": runs " << s.survivors << "/" << s.total;
        if (s.survivors > 0)
            std::cout << "  max_average " << format_double(s.metrics.max_average_return) << "  final "
                      << format_double(s.metrics.final_performance) << "  jumpstart "
                      << format_double(s.metrics.jumpstart_performance);
        if (!s.diverged_seeds.empty()) std::cout << "  [" << s.diverged_seeds.size() << " diverged]";
        if (!s.failed_seeds.empty()) std::cout << "  [" << s.failed_seeds.size() << " failed]";
        std::cout << '\n';
    }
    for (const auto& r : report.runs)
        if (!r.completed) std::cerr << "run " << r.file << " failed: " << r.error << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bandit-driven learning-rate selection experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::uint64_t> seeds;
    std::string out_dir;
    std::size_t parallelism = 0;
    bool no_plot = false;
    auto* run = app.add_subcommand("run", "Run every variant and seed of an experiment config");
    run->add_option("config", config_path, "Experiment config (YAML)")->required()->check(CLI::ExistingFile);
    run->add_option("--seeds", seeds, "Override the seed list")->delimiter(',');
    run->add_option("--out", out_dir, "Override the output directory");
    run->add_option("--parallelism", parallelism, "Concurrent runs")->check(CLI::PositiveNumber);
    run->add_flag("--no-plot", no_plot, "Skip SVG output");

    std::string metrics_dir;
    auto* metrics = app.add_subcommand("metrics", "Recompute aggregate.csv and summary.yaml from per-run files");
    metrics->add_option("dir", metrics_dir, "Experiment output directory")->required()->check(CLI::ExistingDirectory);

    std::string plot_dir;
    auto* plot = app.add_subcommand("plot", "Write SVG learning curves and arm timelines");
    plot->add_option("dir", plot_dir, "Experiment output directory")->required()->check(CLI::ExistingDirectory);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            auto cfg = lrrl::runner::load_config(config_path);
            if (!seeds.empty()) cfg.seeds = seeds;
            if (!out_dir.empty()) cfg.output_dir = out_dir;
            if (parallelism > 0) cfg.parallelism = parallelism;
            if (no_plot) cfg.plot = false;
            const auto report = lrrl::runner::run_experiment(cfg);
            print_summaries(report);
            std::cout << "wrote " << report.output_dir << '\n';
            return report.all_completed() ? 0 : 1;
        }
        if (*metrics) {
            const auto report = lrrl::runner::recompute_metrics(metrics_dir);
            print_summaries(report);
            return report.all_completed() ? 0 : 1;
        }
        if (*plot) {
            for (const auto& path : lrrl::runner::write_plots(plot_dir)) std::cout << path << '\n';
            return 0;
        }
    } catch (const lrrl::runner::ConfigError& e) {
        std::cerr << config_path << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
