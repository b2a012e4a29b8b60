#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lrrl/arms.hpp"
#include "lrrl/bandit.hpp"

namespace lrrl::landscapes {

using Vec2 = std::array<double, 2>;

enum class LandscapeId { Beale, Bohachevsky, Griewank, Rosenbrock, ThreeHumpCamel, Zakharov };

// Two-dimensional benchmark surface with a known global minimum.
struct LandscapeFn {
    LandscapeId id;
    std::string name;
    Vec2 lower;
    Vec2 upper;
    Vec2 minimizer;
    double min_value = 0.0;
    Vec2 default_start;
    // Middle rate of the default three-arm set {r/10, r, 10r}. The top arm is
    // chosen to be unstable from default_start.
    double reference_rate = 1e-3;
};

// {r/10, r, 10r} with r = fn.reference_rate.
ArmSet default_arms(const LandscapeFn& fn);

const std::vector<LandscapeFn>& all();
const LandscapeFn& get(LandscapeId id);
// Accepts the lower-case names "beale", "bohachevsky", "griewank",
// "rosenbrock", "three_hump_camel" and "zakharov".
const LandscapeFn& by_name(std::string_view name);

double eval(LandscapeId id, const Vec2& x);
Vec2 grad(LandscapeId id, const Vec2& x);
inline double eval(const LandscapeFn& fn, const Vec2& x) { return eval(fn.id, x); }
inline Vec2 grad(const LandscapeFn& fn, const Vec2& x) { return grad(fn.id, x); }

struct FeedbackConfig {
    double xi = 1e-8;
};

// f = 1 / (|loss| + xi)
double loss_feedback(double loss, const FeedbackConfig& cfg);

struct TrajectoryPoint {
    std::size_t step = 0;
    Vec2 x{};
    double loss = 0.0;
    // -1 for the initial point.
    int arm = -1;
    double rate = 0.0;
    double feedback = 0.0;
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    bool diverged = false;
    std::size_t diverged_at = 0;

    const TrajectoryPoint& final_point() const { return points.back(); }
    double final_loss() const { return points.back().loss; }
};

struct LandscapeRunConfig {
    ArmSet arms;
    bandit::BanditConfig bandit;
    Vec2 start{};
    std::size_t steps = 1000;
    std::uint64_t seed = 0;
    FeedbackConfig feedback;
};

// Plain SGD on `fn`. Each gradient step uses the rate of the arm in force;
// the resulting loss is turned into feedback and the controller advances one
// round. A non-finite iterate ends the run with `diverged` set.
Trajectory run_landscape(const LandscapeFn& fn, const LandscapeRunConfig& cfg);

// Per-run min-max scaled log10(loss + xi), as used for normalized loss plots.
std::vector<double> normalized_log_loss(const Trajectory& trajectory, double xi);

}  // namespace lrrl::landscapes
