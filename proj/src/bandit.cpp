#include "lrrl/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace lrrl::bandit {

FeedbackWindow::FeedbackWindow(std::size_t window, bool exclude_current)
    : window_(window), exclude_current_(exclude_current) {
    if (window < 1) throw std::invalid_argument("feedback window j must be >= 1");
}

double FeedbackWindow::improvement(double feedback) {
    if (!std::isfinite(feedback)) throw std::invalid_argument("feedback must be finite");
    auto mean_of_history = [this] {
        double sum = 0.0;
        for (double f : history_) sum += f;
        return sum / static_cast<double>(history_.size());
    };

    double result = 0.0;
    if (exclude_current_) {
        result = history_.empty() ? 0.0 : feedback - mean_of_history();
        history_.push_back(feedback);
        if (history_.size() > window_) history_.pop_front();
    } else {
        history_.push_back(feedback);
        if (history_.size() > window_) history_.pop_front();
        result = feedback - mean_of_history();
    }
    return result;
}

std::vector<double> softmax(std::span<const double> weights) {
    std::vector<double> out(weights.size());
    if (weights.empty()) return out;
    const double shift = *std::max_element(weights.begin(), weights.end());
    double total = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        out[k] = std::exp(weights[k] - shift);
        total += out[k];
    }
    for (double& p : out) p /= total;
    return out;
}

std::size_t sample_categorical(std::span<const double> probs, double u) {
    if (probs.empty()) throw std::invalid_argument("cannot sample from an empty distribution");
    double cumulative = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        cumulative += probs[k];
        if (u < cumulative) return k;
    }
    for (std::size_t k = probs.size(); k-- > 0;)
        if (probs[k] > 0.0) return k;
    return probs.size() - 1;
}

Exp3State::Exp3State(std::size_t arms, double alpha, double delta, std::size_t window)
    : Exp3State(arms, Exp3Params{alpha, delta, window, false, 50.0}) {}

Exp3State::Exp3State(std::size_t arms, const Exp3Params& params)
    : params_(params), window_(params.window < 1 ? 1 : params.window, params.exclude_current_feedback) {
    if (arms < 2) throw std::invalid_argument("Exp3 needs at least 2 arms");
    if (!(params.alpha > 0.0) || !std::isfinite(params.alpha))
        throw std::invalid_argument("Exp3 alpha must be positive");
    if (!(params.delta > 0.0 && params.delta <= 1.0))
        throw std::invalid_argument("Exp3 delta must lie in (0, 1]");
    if (params.window < 1) throw std::invalid_argument("Exp3 window j must be >= 1");
    if (!(params.weight_bound > 0.0)) throw std::invalid_argument("Exp3 weight bound must be positive");
    weights_.assign(arms, 0.0);
    probs_.assign(arms, 1.0 / static_cast<double>(arms));
}

double Exp3State::improvement(double feedback) { return window_.improvement(feedback); }

void Exp3State::update(std::size_t pulled_arm, double improvement) {
    if (pulled_arm >= weights_.size()) throw std::out_of_range("pulled arm out of range");
    if (!std::isfinite(improvement)) throw std::invalid_argument("improvement must be finite");

    const double bound = params_.weight_bound;
    bool clamped = false;
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        double w = params_.delta * weights_[k];
        if (k == pulled_arm) w += params_.alpha * improvement / std::exp(weights_[k]);
        if (std::isnan(w)) {
            w = 0.0;
            clamped = true;
        } else if (w > bound) {
            w = bound;
            clamped = true;
        } else if (w < -bound) {
            w = -bound;
            clamped = true;
        }
        weights_[k] = w;
    }
    if (clamped) ++clamp_events_;
    recompute_probs();
    ++round_;
}

std::size_t Exp3State::sample(Rng& rng) { return sample_with(uniform01(rng)); }

std::size_t Exp3State::sample_with(double u) {
    const auto arm = sample_categorical(probs_, u);
    last_arm_ = arm;
    return arm;
}

void Exp3State::set_weights(std::span<const double> weights) {
    if (weights.size() != weights_.size()) throw std::invalid_argument("weight vector size mismatch");
    for (double w : weights)
        if (!std::isfinite(w)) throw std::invalid_argument("weights must be finite");
    weights_.assign(weights.begin(), weights.end());
    recompute_probs();
}

void Exp3State::recompute_probs() { probs_ = softmax(weights_); }

MossState::MossState(std::size_t arms, double rho) : rho_(rho), counts_(arms, 0), means_(arms, 0.0) {
    if (arms < 1) throw std::invalid_argument("MOSS needs at least 1 arm");
    if (!(rho >= 0.0) || !std::isfinite(rho)) throw std::invalid_argument("MOSS rho must be nonnegative");
}

double MossState::index(std::size_t arm) const {
    if (arm >= counts_.size()) throw std::out_of_range("arm out of range");
    if (counts_[arm] == 0) return std::numeric_limits<double>::infinity();
    const double n = static_cast<double>(round_);
    const double nk = static_cast<double>(counts_[arm]);
    const double K = static_cast<double>(counts_.size());
    const double bonus = std::max(std::log(n / (K * nk)), 0.0);
    return means_[arm] + rho_ * std::sqrt(bonus / nk);
}

std::size_t MossState::select() const {
    for (std::size_t k = 0; k < counts_.size(); ++k)
        if (counts_[k] == 0) return k;
    std::size_t best = 0;
    double best_index = index(0);
    for (std::size_t k = 1; k < counts_.size(); ++k) {
        const double b = index(k);
        if (b > best_index) {
            best = k;
            best_index = b;
        }
    }
    return best;
}

void MossState::update(std::size_t arm, double reward) {
    if (arm >= counts_.size()) throw std::out_of_range("arm out of range");
    if (!std::isfinite(reward)) throw std::invalid_argument("reward must be finite");
    counts_[arm] += 1;
    means_[arm] += (reward - means_[arm]) / static_cast<double>(counts_[arm]);
    ++round_;
}

std::string to_string(BanditKind kind) {
    switch (kind) {
        case BanditKind::Exp3: return "exp3";
        case BanditKind::Moss: return "moss";
        case BanditKind::Fixed: return "fixed";
    }
    return "unknown";
}

BanditKind bandit_kind_from_string(const std::string& name) {
    if (name == "exp3") return BanditKind::Exp3;
    if (name == "moss") return BanditKind::Moss;
    if (name == "fixed") return BanditKind::Fixed;
    throw std::invalid_argument("unknown bandit kind '" + name + "' (expected exp3, moss or fixed)");
}

ArmController::ArmController(std::size_t arms, const BanditConfig& config, Rng& rng)
    : arms_(arms), config_(config) {
    if (arms < 1) throw std::invalid_argument("controller needs at least one arm");
    switch (config.kind) {
        case BanditKind::Exp3:
            if (arms >= 2) {
                exp3_.emplace(arms, config.exp3);
                current_ = exp3_->sample(rng);
            } else {
                window_.emplace(config.exp3.window, config.exp3.exclude_current_feedback);
            }
            break;
        case BanditKind::Moss:
            moss_.emplace(arms, config.rho);
            current_ = moss_->select();
            break;
        case BanditKind::Fixed:
            if (config.fixed_arm >= arms) throw std::invalid_argument("fixed arm index out of range");
            current_ = config.fixed_arm;
            break;
    }
}

RoundOutcome ArmController::observe(double feedback, Rng& rng) {
    if (!std::isfinite(feedback)) throw std::invalid_argument("feedback must be finite");
    RoundOutcome out;
    out.credited_arm = current_;
    out.feedback = feedback;
    if (exp3_) {
        out.improvement = exp3_->improvement(feedback);
        exp3_->update(current_, out.improvement);
        current_ = exp3_->sample(rng);
    } else if (window_) {
        out.improvement = window_->improvement(feedback);
    } else if (moss_) {
        moss_->update(current_, feedback);
        current_ = moss_->select();
    }
    ++round_;
    out.round = round_;
    out.next_arm = current_;
    return out;
}

std::vector<double> ArmController::distribution() const {
    if (exp3_) return exp3_->probs();
    std::vector<double> p(arms_, 0.0);
    p[current_] = 1.0;
    return p;
}

}  // namespace lrrl::bandit
