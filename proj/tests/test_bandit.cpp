#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "lrrl/arms.hpp"
#include "lrrl/bandit.hpp"
#include "lrrl/rng.hpp"

using namespace lrrl;
using namespace lrrl::bandit;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST(Exp3, StartsUniform) {
    Exp3State s(5, 0.2, 0.999, 5);
    for (double p : s.probs()) EXPECT_DOUBLE_EQ(p, 0.2);
    Exp3State t(2, 0.2, 1.0, 1);
    EXPECT_EQ(t.weights(), (std::vector<double>{0.0, 0.0}));
    EXPECT_EQ(t.round(), 0u);
    EXPECT_TRUE(t.feedback_history().empty());
    EXPECT_FALSE(t.last_arm().has_value());
}

TEST(Exp3, RejectsBadConstruction) {
    EXPECT_THROW(Exp3State(1, 0.2, 0.99, 5), std::invalid_argument);
    EXPECT_THROW(Exp3State(0, 0.2, 0.99, 5), std::invalid_argument);
    EXPECT_THROW(Exp3State(3, 0.0, 0.99, 5), std::invalid_argument);
    EXPECT_THROW(Exp3State(3, -1.0, 0.99, 5), std::invalid_argument);
    EXPECT_THROW(Exp3State(3, 0.2, 0.0, 5), std::invalid_argument);
    EXPECT_THROW(Exp3State(3, 0.2, 1.01, 5), std::invalid_argument);
    EXPECT_THROW(Exp3State(3, 0.2, 0.99, 0), std::invalid_argument);
}

TEST(Exp3, ImprovementWindowOfOneIsZero) {
    Exp3State s(2, 0.2, 1.0, 1);
    for (double f : {3.0, -2.0, 100.0, 0.5}) EXPECT_EQ(s.improvement(f), 0.0);
}

TEST(Exp3, ImprovementIncludesCurrentFeedback) {
    Exp3State s(2, 0.2, 1.0, 2);
    s.improvement(1.0);
    EXPECT_DOUBLE_EQ(s.improvement(3.0), 1.0);
}

TEST(Exp3, ConstantFeedbackHasNoImprovement) {
    Exp3State s(2, 0.2, 1.0, 4);
    for (int i = 0; i < 3; ++i) s.improvement(2.0);
    EXPECT_EQ(s.improvement(2.0), 0.0);
}

TEST(Exp3, HistoryIsBounded) {
    Exp3State s(3, 0.2, 0.99, 3);
    for (int i = 0; i < 10; ++i) {
        s.improvement(i);
        EXPECT_LE(s.feedback_history().size(), 3u);
    }
}

TEST(Exp3, ImprovementRejectsNonFinite) {
    Exp3State s(2, 0.2, 1.0, 2);
    EXPECT_THROW(s.improvement(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
    EXPECT_THROW(s.improvement(std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST(FeedbackWindow, ExcludingCurrentUsesHistoryOnly) {
    FeedbackWindow w(2, true);
    EXPECT_EQ(w.improvement(5.0), 0.0);
    EXPECT_DOUBLE_EQ(w.improvement(3.0), -2.0);
    EXPECT_DOUBLE_EQ(w.improvement(7.0), 7.0 - 4.0);
    FeedbackWindow one(1, true);
    one.improvement(1.0);
    EXPECT_DOUBLE_EQ(one.improvement(4.0), 3.0);
}

TEST(Exp3, UpdateMatchesHandValues) {
    Exp3State s(2, 0.2, 1.0, 1);
    s.update(0, 1.0);
    EXPECT_DOUBLE_EQ(s.weights()[0], 0.2);
    EXPECT_DOUBLE_EQ(s.weights()[1], 0.0);
    const double e = std::exp(0.2);
    EXPECT_NEAR(s.probs()[0], e / (e + 1.0), 1e-15);
    EXPECT_NEAR(s.probs()[1], 1.0 / (e + 1.0), 1e-15);
    EXPECT_NEAR(s.probs()[0], 0.5498, 5e-5);
    EXPECT_EQ(s.round(), 1u);
}

TEST(Exp3, ZeroImprovementOnlyDecays) {
    Exp3State s(2, 0.2, 0.9, 1);
    const std::vector<double> w0 = {0.5, 0.3};
    s.set_weights(w0);
    s.update(0, 0.0);
    EXPECT_NEAR(s.weights()[0], 0.45, 1e-15);
    EXPECT_NEAR(s.weights()[1], 0.27, 1e-15);
}

TEST(Exp3, NegativeImprovementLowersPulledArm) {
    Exp3State s(2, 0.2, 1.0, 1);
    s.update(1, -1.0);
    EXPECT_LT(s.probs()[1], 0.5);
}

TEST(Exp3, UpdateRejectsBadInput) {
    Exp3State s(2, 0.2, 1.0, 1);
    EXPECT_THROW(s.update(2, 0.1), std::out_of_range);
    EXPECT_THROW(s.update(0, std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
}

TEST(Exp3, WeightClampIsCounted) {
    Exp3Params p;
    p.alpha = 1.0;
    p.delta = 1.0;
    p.window = 1;
    Exp3State s(2, p);
    s.update(0, -1e6);
    EXPECT_GE(s.clamp_events(), 1u);
    for (double w : s.weights()) EXPECT_LE(std::abs(w), 50.0);
    EXPECT_GT(s.probs()[0], 0.0);
    EXPECT_NEAR(sum(s.probs()), 1.0, 1e-12);
}

TEST(Exp3, InverseCdfSampling) {
    Exp3State s(3, 0.2, 1.0, 1);
    EXPECT_EQ(s.sample_with(0.0), 0u);
    EXPECT_EQ(s.sample_with(0.34), 1u);
    EXPECT_EQ(s.sample_with(0.999999), 2u);
    EXPECT_EQ(s.last_arm(), 2u);
}

TEST(Exp3, NearDegenerateDistribution) {
    const std::vector<double> p = {1.0 - 1e-15, 1e-15};
    Rng rng = make_stream(3, 0);
    int zeros = 0;
    for (int i = 0; i < 100000; ++i) zeros += sample_categorical(p, uniform01(rng)) == 0;
    EXPECT_EQ(zeros, 100000);
}

TEST(Exp3, UniformSamplingFrequencies) {
    Exp3State s(5, 0.2, 0.999, 5);
    Rng rng = make_stream(11, 0);
    std::vector<int> counts(5, 0);
    const int n = 1000000;
    for (int i = 0; i < n; ++i) ++counts[s.sample(rng)];
    for (int c : counts) EXPECT_NEAR(static_cast<double>(c) / n, 0.2, 0.002);
}

TEST(Softmax, ShiftInvariance) {
    Rng rng = make_stream(5, 0);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> w(4);
        for (auto& x : w) x = 20.0 * uniform01(rng) - 10.0;
        const double c = 200.0 * uniform01(rng) - 100.0;
        std::vector<double> shifted = w;
        for (auto& x : shifted) x += c;
        const auto a = softmax(w);
        const auto b = softmax(shifted);
        for (std::size_t k = 0; k < w.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
    }
}

TEST(Exp3, SimplexAndPositivityUnderFuzz) {
    Rng rng = make_stream(17, 0);
    for (int seq = 0; seq < 10000; ++seq) {
        const std::size_t k = 2 + uniform_index(rng, 6);
        Exp3Params p;
        p.alpha = 0.01 + 5.0 * uniform01(rng);
        p.delta = 0.5 + 0.5 * uniform01(rng);
        p.window = 1 + uniform_index(rng, 8);
        Exp3State s(k, p);
        const int steps = 1 + static_cast<int>(uniform_index(rng, 30));
        for (int i = 0; i < steps; ++i) {
            const double scale = uniform01(rng) < 0.1 ? 1e8 : 10.0;
            const double f = scale * (2.0 * uniform01(rng) - 1.0);
            s.update(uniform_index(rng, k), s.improvement(f));
            ASSERT_NEAR(sum(s.probs()), 1.0, 1e-12);
            ASSERT_GT(*std::min_element(s.probs().begin(), s.probs().end()), 0.0);
        }
    }
}

TEST(Exp3, PositiveImprovementIsMonotone) {
    Exp3State s(3, 0.5, 1.0, 1);
    double prev = s.probs()[1];
    for (int i = 0; i < 200; ++i) {
        s.update(1, 0.3);
        EXPECT_GT(s.probs()[1], prev);
        prev = s.probs()[1];
    }
}

TEST(Exp3, DecayNeutrality) {
    Exp3State flat(4, 0.2, 1.0, 3);
    for (int i = 0; i < 50; ++i) flat.update(i % 4, 0.0);
    for (double p : flat.probs()) EXPECT_EQ(p, 0.25);

    Exp3State decaying(4, 0.2, 0.95, 3);
    const std::vector<double> w = {2.0, -1.0, 0.5, 0.0};
    decaying.set_weights(w);
    auto gap = [&] {
        const auto& p = decaying.probs();
        return *std::max_element(p.begin(), p.end()) - *std::min_element(p.begin(), p.end());
    };
    double prev = gap();
    for (int i = 0; i < 100; ++i) {
        decaying.update(i % 4, 0.0);
        EXPECT_LT(gap(), prev);
        prev = gap();
    }
}

TEST(Moss, UnpulledArmFirst) {
    MossState m(2, 1.0);
    for (int i = 0; i < 5; ++i) m.update(1, 0.5);
    EXPECT_EQ(m.select(), 0u);
}

TEST(Moss, IndexHandValue) {
    MossState m(2, 1.0);
    m.update(0, 1.0);
    m.update(0, 0.0);
    m.update(1, 0.5);
    m.update(1, 0.5);
    EXPECT_EQ(m.round(), 4u);
    EXPECT_DOUBLE_EQ(m.index(0), 0.5);
    EXPECT_DOUBLE_EQ(m.index(1), 0.5);
    EXPECT_EQ(m.select(), 0u);
}

TEST(Moss, DominantMeanWins) {
    MossState m(2, 1.0);
    for (int i = 0; i < 500; ++i) {
        m.update(0, 0.9);
        m.update(1, 0.1);
    }
    EXPECT_EQ(m.select(), 0u);
}

TEST(Moss, IncrementalMean) {
    MossState m(3, 1.0);
    m.update(2, 1.0);
    EXPECT_EQ(m.counts()[2], 1u);
    EXPECT_DOUBLE_EQ(m.means()[2], 1.0);
    m.update(2, 0.0);
    EXPECT_DOUBLE_EQ(m.means()[2], 0.5);
    EXPECT_THROW(m.update(0, std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST(Moss, BernoulliMeanEstimate) {
    MossState m(1, 1.0);
    Rng rng = make_stream(23, 0);
    for (int i = 0; i < 1000; ++i) m.update(0, uniform01(rng) < 0.3 ? 1.0 : 0.0);
    EXPECT_NEAR(m.means()[0], 0.3, 0.045);
}

TEST(Moss, CoversEveryArmFirst) {
    for (std::size_t k = 1; k <= 8; ++k) {
        MossState m(k, 1.0);
        std::vector<bool> seen(k, false);
        for (std::size_t i = 0; i < k; ++i) {
            const auto a = m.select();
            seen[a] = true;
            m.update(a, 0.0);
        }
        EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
    }
}

TEST(Moss, StationaryBernoulliCompetence) {
    const std::vector<double> means = {0.2, 0.5, 0.8};
    double fraction = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        MossState m(3, 1.0);
        Rng rng = make_stream(seed, 42);
        int best = 0;
        for (int n = 0; n < 10000; ++n) {
            const auto a = m.select();
            best += a == 2;
            m.update(a, uniform01(rng) < means[a] ? 1.0 : 0.0);
        }
        fraction += best / 10000.0;
    }
    EXPECT_GT(fraction / 20.0, 0.8);
}

TEST(Exp3, AdaptsAfterSwitch) {
    double p_new = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Exp3State s(2, 0.2, 0.99, 5);
        Rng rng = make_stream(seed, 9);
        std::size_t arm = s.sample(rng);
        for (int n = 1; n <= 800; ++n) {
            const std::size_t better = n <= 500 ? 0 : 1;
            const double f = arm == better ? 0.75 : 0.25;
            s.update(arm, s.improvement(f));
            arm = s.sample(rng);
        }
        p_new += s.probs()[1];
    }
    EXPECT_GT(p_new / 20.0, 0.6);
}

TEST(Controller, FixedNeverMoves) {
    BanditConfig cfg;
    cfg.kind = BanditKind::Fixed;
    cfg.fixed_arm = 2;
    Rng rng = make_stream(0, 3);
    ArmController c(4, cfg, rng);
    for (int i = 0; i < 20; ++i) {
        EXPECT_EQ(c.current_arm(), 2u);
        c.observe(i * 0.1, rng);
    }
    EXPECT_EQ(c.round(), 20u);
}

TEST(Controller, SingleArmCountsRounds) {
    BanditConfig cfg;
    Rng rng = make_stream(0, 3);
    ArmController c(1, cfg, rng);
    for (int i = 0; i < 7; ++i) {
        const auto out = c.observe(1.0, rng);
        EXPECT_EQ(out.credited_arm, 0u);
        EXPECT_EQ(out.next_arm, 0u);
    }
    EXPECT_EQ(c.round(), 7u);
}

TEST(Controller, RoundsAreMonotone) {
    BanditConfig cfg;
    cfg.kind = BanditKind::Moss;
    Rng rng = make_stream(1, 3);
    ArmController c(3, cfg, rng);
    std::uint64_t prev = 0;
    for (int i = 0; i < 50; ++i) {
        const auto out = c.observe(uniform01(rng), rng);
        EXPECT_GT(out.round, prev);
        prev = out.round;
    }
}

TEST(Arms, EffectiveRates) {
    const auto flat = ArmSpec::exp_decay(6.25e-5, 0.0);
    EXPECT_EQ(flat.effective_rate(0), 6.25e-5);
    EXPECT_EQ(flat.effective_rate(123456789), 6.25e-5);
    const auto decaying = ArmSpec::exp_decay(6.25e-5, 1e-7);
    EXPECT_EQ(decaying.effective_rate(0), 6.25e-5);
    EXPECT_NEAR(decaying.effective_rate(10000000), 6.25e-5 * std::exp(-1.0), 1e-18);
    EXPECT_NEAR(decaying.effective_rate(10000000), 2.299e-5, 5e-9);
    EXPECT_EQ(scheduler_rate(ArmSpec::fixed(0.3), 99), 0.3);
}

TEST(Arms, Validation) {
    EXPECT_THROW(validate_arms({}), std::invalid_argument);
    EXPECT_THROW(validate_arms({ArmSpec::fixed(0.0)}), std::invalid_argument);
    EXPECT_THROW(validate_arms({ArmSpec::exp_decay(1e-3, -1.0)}), std::invalid_argument);
    EXPECT_NO_THROW(validate_arms(arm_sets::k5()));
}
