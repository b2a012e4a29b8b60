#include "lrrl/landscapes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lrrl/rng.hpp"

namespace lrrl::landscapes {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInvSqrt2 = 0.70710678118654752440;

}  // namespace

const std::vector<LandscapeFn>& all() {
    static const std::vector<LandscapeFn> fns = {
        {LandscapeId::Beale, "beale", {-4.5, -4.5}, {4.5, 4.5}, {3.0, 0.5}, 0.0, {2.0, 2.0}, 1e-3},
        {LandscapeId::Bohachevsky, "bohachevsky", {-5.0, -5.0}, {5.0, 5.0}, {0.0, 0.0}, 0.0, {2.0, 1.5}, 3e-2},
        {LandscapeId::Griewank, "griewank", {-10.0, -10.0}, {10.0, 10.0}, {0.0, 0.0}, 0.0, {2.5, 3.0}, 1e-2},
        {LandscapeId::Rosenbrock, "rosenbrock", {-2.0, -1.0}, {2.0, 3.0}, {1.0, 1.0}, 0.0, {-1.5, 2.0}, 3e-4},
        {LandscapeId::ThreeHumpCamel, "three_hump_camel", {-5.0, -5.0}, {5.0, 5.0}, {0.0, 0.0}, 0.0, {1.5, -1.5}, 1e-1},
        {LandscapeId::Zakharov, "zakharov", {-5.0, -5.0}, {10.0, 10.0}, {0.0, 0.0}, 0.0, {2.0, 2.0}, 1e-2},
    };
    return fns;
}

const LandscapeFn& get(LandscapeId id) {
    for (const auto& fn : all())
        if (fn.id == id) return fn;
    throw std::invalid_argument("unknown landscape id");
}

const LandscapeFn& by_name(std::string_view name) {
    for (const auto& fn : all())
        if (fn.name == name) return fn;
    throw std::invalid_argument("unknown landscape '" + std::string(name) + "'");
}

double eval(LandscapeId id, const Vec2& p) {
    const double x = p[0];
    const double y = p[1];
    switch (id) {
        case LandscapeId::Beale: {
            const double a = 1.5 - x + x * y;
            const double b = 2.25 - x + x * y * y;
            const double c = 2.625 - x + x * y * y * y;
            return a * a + b * b + c * c;
        }
        case LandscapeId::Bohachevsky:
            return x * x + 2.0 * y * y - 0.3 * std::cos(3.0 * kPi * x) - 0.4 * std::cos(4.0 * kPi * y) + 0.7;
        case LandscapeId::Griewank:
            return 1.0 + (x * x + y * y) / 4000.0 - std::cos(x) * std::cos(y * kInvSqrt2);
        case LandscapeId::Rosenbrock: {
            const double a = 1.0 - x;
            const double b = y - x * x;
            return a * a + 100.0 * b * b;
        }
        case LandscapeId::ThreeHumpCamel: {
            const double x2 = x * x;
            return 2.0 * x2 - 1.05 * x2 * x2 + x2 * x2 * x2 / 6.0 + x * y + y * y;
        }
        case LandscapeId::Zakharov: {
            const double s = 0.5 * x + y;
            const double s2 = s * s;
            return x * x + y * y + s2 + s2 * s2;
        }
    }
    throw std::invalid_argument("unknown landscape id");
}

Vec2 grad(LandscapeId id, const Vec2& p) {
    const double x = p[0];
    const double y = p[1];
    switch (id) {
        case LandscapeId::Beale: {
            const double a = 1.5 - x + x * y;
            const double b = 2.25 - x + x * y * y;
            const double c = 2.625 - x + x * y * y * y;
            return {2.0 * a * (y - 1.0) + 2.0 * b * (y * y - 1.0) + 2.0 * c * (y * y * y - 1.0),
                    2.0 * a * x + 4.0 * b * x * y + 6.0 * c * x * y * y};
        }
        case LandscapeId::Bohachevsky:
            return {2.0 * x + 0.9 * kPi * std::sin(3.0 * kPi * x), 4.0 * y + 1.6 * kPi * std::sin(4.0 * kPi * y)};
        case LandscapeId::Griewank:
            return {x / 2000.0 + std::sin(x) * std::cos(y * kInvSqrt2),
                    y / 2000.0 + std::cos(x) * std::sin(y * kInvSqrt2) * kInvSqrt2};
        case LandscapeId::Rosenbrock:
            return {-2.0 * (1.0 - x) - 400.0 * x * (y - x * x), 200.0 * (y - x * x)};
        case LandscapeId::ThreeHumpCamel: {
            const double x3 = x * x * x;
            return {4.0 * x - 4.2 * x3 + x3 * x * x + y, x + 2.0 * y};
        }
        case LandscapeId::Zakharov: {
            // s = sum_i 0.5 * i * x_i with i = 1, 2
            const double s = 0.5 * x + y;
            const double outer = 2.0 * s + 4.0 * s * s * s;
            return {2.0 * x + 0.5 * outer, 2.0 * y + outer};
        }
    }
    throw std::invalid_argument("unknown landscape id");
}

ArmSet default_arms(const LandscapeFn& fn) {
    const double r = fn.reference_rate;
    return {ArmSpec::fixed(r / 10.0), ArmSpec::fixed(r), ArmSpec::fixed(r * 10.0)};
}

double loss_feedback(double loss, const FeedbackConfig& cfg) {
    if (!(cfg.xi > 0.0)) throw std::invalid_argument("feedback xi must be positive");
    return 1.0 / (std::abs(loss) + cfg.xi);
}

Trajectory run_landscape(const LandscapeFn& fn, const LandscapeRunConfig& cfg) {
    if (cfg.steps < 1) throw std::invalid_argument("landscape run needs at least one step");
    validate_arms(cfg.arms);

    Rng rng = make_stream(cfg.seed, 0x1a5d);
    bandit::ArmController controller(cfg.arms.size(), cfg.bandit, rng);

    Trajectory out;
    out.points.reserve(cfg.steps + 1);
    Vec2 x = cfg.start;
    out.points.push_back({0, x, eval(fn, x), -1, 0.0, loss_feedback(eval(fn, x), cfg.feedback)});

    for (std::size_t n = 1; n <= cfg.steps; ++n) {
        const std::size_t arm = controller.current_arm();
        const double rate = cfg.arms[arm].effective_rate(controller.round());
        const Vec2 g = grad(fn, x);
        x = {x[0] - rate * g[0], x[1] - rate * g[1]};
        const double loss = eval(fn, x);
        if (!std::isfinite(x[0]) || !std::isfinite(x[1]) || !std::isfinite(loss)) {
            out.points.push_back({n, x, loss, static_cast<int>(arm), rate, 0.0});
            out.diverged = true;
            out.diverged_at = n;
            break;
        }
        const double f = loss_feedback(loss, cfg.feedback);
        out.points.push_back({n, x, loss, static_cast<int>(arm), rate, f});
        controller.observe(f, rng);
    }
    return out;
}

std::vector<double> normalized_log_loss(const Trajectory& trajectory, double xi) {
    std::vector<double> out;
    out.reserve(trajectory.points.size());
    for (const auto& p : trajectory.points) out.push_back(std::log10(std::abs(p.loss) + xi));
    if (out.empty()) return out;
    const auto [lo, hi] = std::minmax_element(out.begin(), out.end());
    const double min = *lo;
    const double span = *hi - *lo;
    for (double& v : out) v = span > 0.0 ? (v - min) / span : 0.0;
    return out;
}

}  // namespace lrrl::landscapes
