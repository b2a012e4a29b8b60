#include "lrrl/runner/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lrrl::runner {

MetricsSummary metrics(const std::vector<std::vector<double>>& returns, std::size_t final_window,
                       std::size_t jumpstart_window) {
    if (returns.empty()) throw std::invalid_argument("metrics need at least one run");
    if (final_window < 1 || jumpstart_window < 1) throw std::invalid_argument("metric windows must be >= 1");
    std::size_t iterations = 0;
    for (const auto& run : returns) iterations = std::max(iterations, run.size());
    if (iterations == 0) throw std::invalid_argument("metrics need at least one iteration");

    MetricsSummary out;
    out.runs = returns.size();
    out.mean.assign(iterations, 0.0);
    out.half_std.assign(iterations, 0.0);
    for (std::size_t i = 0; i < iterations; ++i) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& run : returns)
            if (i < run.size()) {
                sum += run[i];
                ++n;
            }
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (const auto& run : returns)
            if (i < run.size()) ss += (run[i] - mean) * (run[i] - mean);
        out.mean[i] = mean;
        out.half_std[i] = 0.5 * std::sqrt(ss / static_cast<double>(n));
    }

    out.max_average_return = *std::max_element(out.mean.begin(), out.mean.end());
    const std::size_t fw = std::min(final_window, iterations);
    const std::size_t jw = std::min(jumpstart_window, iterations);
    double tail = 0.0;
    for (std::size_t i = iterations - fw; i < iterations; ++i) tail += out.mean[i];
    double head = 0.0;
    for (std::size_t i = 0; i < jw; ++i) head += out.mean[i];
    out.final_performance = tail / static_cast<double>(fw);
    out.jumpstart_performance = head / static_cast<double>(jw);
    return out;
}

std::vector<double> block_means(const std::vector<double>& values, std::size_t block) {
    if (block < 1) throw std::invalid_argument("block size must be >= 1");
    std::vector<double> out;
    for (std::size_t start = 0; start < values.size(); start += block) {
        const std::size_t end = std::min(values.size(), start + block);
        double sum = 0.0;
        for (std::size_t i = start; i < end; ++i) sum += values[i];
        out.push_back(sum / static_cast<double>(end - start));
    }
    return out;
}

}  // namespace lrrl::runner
