#pragma once

#include <cstddef>
#include <vector>

namespace lrrl::runner {

struct MetricsSummary {
    double max_average_return = 0.0;
    double final_performance = 0.0;
    double jumpstart_performance = 0.0;
    std::vector<double> mean;       // per iteration, across runs
    std::vector<double> half_std;   // population std / 2
    std::size_t runs = 0;
};

// returns[run][iteration]. Runs may differ in length; each iteration is
// averaged over the runs that reached it.
//   max_average_return    = max over iterations of the cross-run mean
//   final_performance     = mean of the cross-run means over the last final_window iterations
//   jumpstart_performance = mean of the cross-run means over the first jumpstart_window iterations
// Throws std::invalid_argument on empty input.
MetricsSummary metrics(const std::vector<std::vector<double>>& returns, std::size_t final_window,
                       std::size_t jumpstart_window);

// Averages consecutive blocks of `block` values; a trailing partial block is
// averaged over what it has.
std::vector<double> block_means(const std::vector<double>& values, std::size_t block);

}  // namespace lrrl::runner
