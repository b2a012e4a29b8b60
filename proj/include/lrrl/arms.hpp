#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lrrl {

// One selectable learning-rate option: a constant rate or an exponential-decay
// schedule eta0 * exp(-decay * n) driven by the global bandit round n.
struct ArmSpec {
    enum class Kind { FixedRate, ExpDecayScheduler };

    Kind kind = Kind::FixedRate;
    double rate = 0.0;
    double eta0 = 0.0;
    double decay = 0.0;

    static ArmSpec fixed(double rate);
    static ArmSpec exp_decay(double eta0, double decay);

    double effective_rate(std::uint64_t round) const;
    std::string describe() const;

    bool operator==(const ArmSpec&) const = default;
};

using ArmSet = std::vector<ArmSpec>;

/// Free-function form of ArmSpec::effective_rate.
double scheduler_rate(const ArmSpec& arm, std::uint64_t round);

// Throws std::invalid_argument if the set is empty or any arm is invalid.
void validate_arms(const ArmSet& arms);

namespace arm_sets {

ArmSet k5();
ArmSet k_lowest3();
ArmSet k_middle3();
ArmSet k_highest3();
ArmSet k_sparse3();
// Three schedulers sharing eta0 = 6.25e-5 with decay rates {1, 2, 3} x 1e-7.
ArmSet schedulers3();

// Looks up one of the names above ("K5", "K_lowest3", ..., "schedulers3").
// Throws std::invalid_argument for unknown names.
ArmSet by_name(std::string_view name);

}  // namespace arm_sets

}  // namespace lrrl
