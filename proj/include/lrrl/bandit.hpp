#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lrrl/rng.hpp"

namespace lrrl::bandit {

// Sliding window of recent feedback values used to turn raw feedback f_n into
// an improvement f'_n = f_n - mean(window).
//
// By default f_n is pushed before the mean is taken, so the window covers
// f_n, f_{n-1}, ..., f_{n-j+1}. With exclude_current set, the mean is taken
// over the previous values only (and f'_n = 0 when there is no history).
class FeedbackWindow {
public:
    FeedbackWindow(std::size_t window, bool exclude_current);

    double improvement(double feedback);

    std::size_t window() const { return window_; }
    bool exclude_current() const { return exclude_current_; }
    const std::deque<double>& history() const { return history_; }

private:
    std::size_t window_;
    bool exclude_current_;
    std::deque<double> history_;
};

struct Exp3Params {
    double alpha = 0.2;
    double delta = 0.99;
    std::size_t window = 5;
    bool exclude_current_feedback = false;
    double weight_bound = 50.0;
};

// Exponential weights with time decay:
//   w(k) <- delta * w(k) + alpha * f' / exp(w(k))   for the pulled arm
//   w(k) <- delta * w(k)                            otherwise
//   p = softmax(w)
class Exp3State {
public:
    Exp3State(std::size_t arms, double alpha, double delta, std::size_t window);
    Exp3State(std::size_t arms, const Exp3Params& params);

    // Pushes f_n into the feedback history and returns f'_n.
    double improvement(double feedback);

    void update(std::size_t pulled_arm, double improvement);

    std::size_t sample(Rng& rng);
    // Inverse-CDF draw for a given uniform variate u in [0, 1).
    std::size_t sample_with(double u);

    // Replaces the weights and recomputes probabilities. Intended for tests
    // and for restoring a saved state.
    void set_weights(std::span<const double> weights);

    std::size_t arms() const { return weights_.size(); }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& probs() const { return probs_; }
    const Exp3Params& params() const { return params_; }
    const std::deque<double>& feedback_history() const { return window_.history(); }
    std::uint64_t round() const { return round_; }
    std::optional<std::size_t> last_arm() const { return last_arm_; }
    std::uint64_t clamp_events() const { return clamp_events_; }

private:
    void recompute_probs();

    Exp3Params params_;
    FeedbackWindow window_;
    std::vector<double> weights_;
    std::vector<double> probs_;
    std::uint64_t round_ = 0;
    std::optional<std::size_t> last_arm_;
    std::uint64_t clamp_events_ = 0;
};

// Numerically stable softmax (max-shifted).
std::vector<double> softmax(std::span<const double> weights);

// Inverse-CDF categorical draw: first k with u < sum_{i<=k} p(i). Falls back
// to the last arm with positive mass when rounding leaves u above the total.
std::size_t sample_categorical(std::span<const double> probs, double u);

// MOSS index policy. Arms never pulled are chosen first (lowest index), then
// argmax of mu_hat(k) + rho * sqrt(max(log(n / (K n_k)), 0) / n_k).
class MossState {
public:
    MossState(std::size_t arms, double rho);

    std::size_t select() const;
    void update(std::size_t arm, double reward);

    // Upper confidence index of one arm; +inf for unpulled arms.
    double index(std::size_t arm) const;

    std::size_t arms() const { return counts_.size(); }
    double rho() const { return rho_; }
    const std::vector<std::uint64_t>& counts() const { return counts_; }
    const std::vector<double>& means() const { return means_; }
    std::uint64_t round() const { return round_; }

private:
    double rho_;
    std::vector<std::uint64_t> counts_;
    std::vector<double> means_;
    std::uint64_t round_ = 0;
};

enum class BanditKind { Exp3, Moss, Fixed };

std::string to_string(BanditKind kind);
BanditKind bandit_kind_from_string(const std::string& name);

struct BanditConfig {
    BanditKind kind = BanditKind::Exp3;
    Exp3Params exp3;
    double rho = 1.0;
    std::size_t fixed_arm = 0;
};

struct RoundOutcome {
    std::uint64_t round = 0;
    std::size_t credited_arm = 0;
    std::size_t next_arm = 0;
    double feedback = 0.0;
    double improvement = 0.0;
};

// Drives arm selection for a training loop: holds the arm in force and
// advances one bandit round per observed feedback value.
//
// Exp3 draws the initial arm from the uniform distribution. MOSS starts at
// its first unpulled arm. Fixed never moves. With a single arm every kind
// degenerates to arm 0, but rounds are still counted so scheduler arms decay
// identically.
class ArmController {
public:
    ArmController(std::size_t arms, const BanditConfig& config, Rng& rng);

    std::size_t current_arm() const { return current_; }
    std::uint64_t round() const { return round_; }
    std::size_t arms() const { return arms_; }
    BanditKind kind() const { return config_.kind; }

    // Credits the arm in force with `feedback`, updates the bandit and picks
    // the next arm.
    RoundOutcome observe(double feedback, Rng& rng);

    // Current selection distribution (indicator for MOSS / Fixed).
    std::vector<double> distribution() const;

    const Exp3State* exp3() const { return exp3_ ? &*exp3_ : nullptr; }
    const MossState* moss() const { return moss_ ? &*moss_ : nullptr; }

private:
    std::size_t arms_;
    BanditConfig config_;
    std::optional<Exp3State> exp3_;
    std::optional<MossState> moss_;
    std::optional<FeedbackWindow> window_;
    std::size_t current_ = 0;
    std::uint64_t round_ = 0;
};

}  // namespace lrrl::bandit
