#include "lrrl/arms.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lrrl {

ArmSpec ArmSpec::fixed(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw std::invalid_argument("fixed arm rate must be positive and finite");
    ArmSpec arm;
    arm.kind = Kind::FixedRate;
    arm.rate = rate;
    return arm;
}

ArmSpec ArmSpec::exp_decay(double eta0, double decay) {
    if (!(eta0 > 0.0) || !std::isfinite(eta0))
        throw std::invalid_argument("scheduler eta0 must be positive and finite");
    if (!(decay >= 0.0) || !std::isfinite(decay))
        throw std::invalid_argument("scheduler decay must be nonnegative and finite");
    ArmSpec arm;
    arm.kind = Kind::ExpDecayScheduler;
    arm.eta0 = eta0;
    arm.decay = decay;
    return arm;
}

double ArmSpec::effective_rate(std::uint64_t round) const {
    if (kind == Kind::FixedRate) return rate;
    if (decay == 0.0) return eta0;
    return eta0 * std::exp(-decay * static_cast<double>(round));
}

std::string ArmSpec::describe() const {
    std::ostringstream os;
    if (kind == Kind::FixedRate)
        os << "fixed(" << rate << ")";
    else
        os << "exp_decay(" << eta0 << "," << decay << ")";
    return os.str();
}

double scheduler_rate(const ArmSpec& arm, std::uint64_t round) { return arm.effective_rate(round); }

void validate_arms(const ArmSet& arms) {
    if (arms.empty()) throw std::invalid_argument("arm set must not be empty");
    for (const auto& arm : arms) {
        if (arm.kind == ArmSpec::Kind::FixedRate) {
            if (!(arm.rate > 0.0) || !std::isfinite(arm.rate))
                throw std::invalid_argument("fixed arm rate must be positive and finite");
        } else {
            if (!(arm.eta0 > 0.0) || !std::isfinite(arm.eta0))
                throw std::invalid_argument("scheduler eta0 must be positive and finite");
            if (!(arm.decay >= 0.0) || !std::isfinite(arm.decay))
                throw std::invalid_argument("scheduler decay must be nonnegative and finite");
        }
    }
}

namespace arm_sets {

namespace {
ArmSet fixed_rates(std::initializer_list<double> rates) {
    ArmSet out;
    for (double r : rates) out.push_back(ArmSpec::fixed(r));
    return out;
}
}  // namespace

ArmSet k5() { return fixed_rates({1.5625e-5, 3.125e-5, 6.25e-5, 1.25e-4, 2.5e-4}); }
ArmSet k_lowest3() { return fixed_rates({1.5625e-5, 3.125e-5, 6.25e-5}); }
ArmSet k_middle3() { return fixed_rates({3.125e-5, 6.25e-5, 1.25e-4}); }
ArmSet k_highest3() { return fixed_rates({6.25e-5, 1.25e-4, 2.5e-4}); }
ArmSet k_sparse3() { return fixed_rates({1.5625e-5, 6.25e-5, 2.5e-4}); }

ArmSet schedulers3() {
    return {ArmSpec::exp_decay(6.25e-5, 1e-7), ArmSpec::exp_decay(6.25e-5, 2e-7),
            ArmSpec::exp_decay(6.25e-5, 3e-7)};
}

ArmSet by_name(std::string_view name) {
    if (name == "K5") return k5();
    if (name == "K_lowest3") return k_lowest3();
    if (name == "K_middle3") return k_middle3();
    if (name == "K_highest3") return k_highest3();
    if (name == "K_sparse3") return k_sparse3();
    if (name == "schedulers3") return schedulers3();
    throw std::invalid_argument("unknown arm set '" + std::string(name) + "'");
}

}  // namespace arm_sets

}  // namespace lrrl
