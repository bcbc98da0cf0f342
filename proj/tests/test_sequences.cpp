#include "awalk/error.hpp"
#include "awalk/sequences.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace awalk;
using namespace awalk::seq;

TEST(Term, PowerFloorHalf) { EXPECT_EQ(SequenceSpec::power_floor(0.5).term(4), 2.0); }

TEST(Term, LinearIdentity) { EXPECT_EQ(SequenceSpec::linear().term(7), 7.0); }

TEST(Term, LogCeilBlocksMatchFloorLog2) {
    auto spec = SequenceSpec::log_ceil_blocks(2.0);
    EXPECT_EQ(spec.term(5), 2.0);
    for (int i = 1; i <= 600; ++i)
        EXPECT_EQ(spec.term(i), std::floor(std::log2(static_cast<double>(i + 1)))) << i;
}

TEST(Term, PowerFloorAgainstIntegerRoot) {
    auto spec = SequenceSpec::power_floor(0.5);
    for (std::int64_t k = 1; k <= 5000; ++k) {
        std::int64_t r = 0;
        while ((r + 1) * (r + 1) <= k) ++r;
        EXPECT_EQ(spec.integer_term(k), r);
    }
}

TEST(Term, DomainErrors) {
    EXPECT_THROW(SequenceSpec::linear().term(0), DomainError);
    EXPECT_THROW(SequenceSpec::linear().term(-3), DomainError);
    EXPECT_THROW(SequenceSpec::log_continuous(1.0).term(1), DomainError);
    EXPECT_NEAR(SequenceSpec::log_continuous(1.0).term(2), std::log(2.0), 1e-15);
}

TEST(Term, LogContinuousStepsStartAtTwo) {
    auto spec = SequenceSpec::log_continuous(2.0);
    EXPECT_EQ(spec.first_index(), 2u);
    EXPECT_DOUBLE_EQ(spec.step_weight(1), 2.0 * std::log(2.0));
    EXPECT_FALSE(spec.is_integer_valued());
}

TEST(Term, ExplicitRepeatsPeriodically) {
    auto spec = SequenceSpec::explicit_values({1, 2, 3, 5, 8});
    EXPECT_EQ(spec.term(5), 8.0);
    EXPECT_EQ(spec.term(6), 1.0);
    EXPECT_EQ(spec.term(12), 2.0);
}

TEST(Term, IntegerFlag) {
    EXPECT_TRUE(SequenceSpec::constant(1).is_integer_valued());
    EXPECT_FALSE(SequenceSpec::constant(1.5).is_integer_valued());
    EXPECT_TRUE(SequenceSpec::explicit_values({1, 2}).is_integer_valued());
    EXPECT_FALSE(SequenceSpec::explicit_values({1, 2.5}).is_integer_valued());
    EXPECT_THROW(SequenceSpec::constant(1.5).integer_term(1), UnsupportedError);
}

TEST(Term, MonotoneVariants) {
    std::vector<SequenceSpec> specs = {SequenceSpec::linear(), SequenceSpec::power_floor(0.3),
                                       SequenceSpec::power_floor(0.8), SequenceSpec::log_ceil_blocks(1.7),
                                       SequenceSpec::general_blocks(LengthRule::parse("k4lnk")),
                                       SequenceSpec::log_continuous(0.7)};
    for (const auto& spec : specs) {
        const auto w = spec.step_weights(3000);
        for (std::size_t i = 1; i < w.size(); ++i) ASSERT_GE(w[i], w[i - 1]) << spec.canonical();
        for (double v : w) ASSERT_GT(v, 0.0);
    }
}

TEST(Term, StepWeightsMatchTerm) {
    std::vector<SequenceSpec> specs = {SequenceSpec::log_ceil_blocks(2.0),
                                       SequenceSpec::general_blocks(LengthRule::parse("3,1,4,1,5")),
                                       SequenceSpec::general_blocks(LengthRule::parse("geom:1.5"))};
    for (const auto& spec : specs) {
        const auto w = spec.step_weights(14);
        for (std::size_t j = 0; j < w.size(); ++j) EXPECT_EQ(w[j], spec.step_weight(j + 1));
    }
}

TEST(PrefixSumSquares, Examples) {
    EXPECT_EQ(prefix_sum_squares(SequenceSpec::constant(1), 4), 4.0);
    EXPECT_EQ(prefix_sum_squares(SequenceSpec::linear(), 3), 14.0);
    EXPECT_EQ(prefix_sum_squares(SequenceSpec::power_floor(0.5), 5), 11.0);
}

TEST(PrefixSumSquares, StrictlyIncreasing) {
    auto spec = SequenceSpec::log_continuous(1.3);
    double prev = 0.0;
    for (std::uint64_t n = 1; n <= 200; ++n) {
        const double v = prefix_sum_squares(spec, n);
        ASSERT_GT(v, prev);
        prev = v;
    }
}

TEST(BlockStart, Examples) {
    auto b = block_start(SequenceSpec::general_blocks(LengthRule::parse("pow2")), 3);
    EXPECT_EQ(b.first, 7u);
    EXPECT_EQ(b.length, 8u);
    EXPECT_EQ(block_start(SequenceSpec::general_blocks(LengthRule::parse("ones")), 5).first, 5u);
    EXPECT_EQ(block_start(SequenceSpec::log_continuous(1.4426950408889634), 4).first, 16u);
    EXPECT_THROW(block_start(SequenceSpec::linear(), 2), UnsupportedError);
}

TEST(BlockStart, ConsistentWithTerms) {
    for (const char* text : {"blocks:pow2", "blocks:geom:1.3", "logceil:3", "blocks:2,7,1,8"}) {
        auto spec = SequenceSpec::parse(text);
        for (std::uint64_t k = 1; k <= 4; ++k) {
            auto b = block_start(spec, k);
            auto next = block_start(spec, k + 1 <= 4 ? k + 1 : k);
            if (k < 4) EXPECT_EQ(next.first, b.first + b.length);
            for (std::uint64_t i = b.first; i < b.first + b.length; ++i)
                EXPECT_EQ(spec.term(static_cast<std::int64_t>(i)), static_cast<double>(k)) << text;
        }
    }
}

TEST(Checkpoint, OddRuleSmallM) {
    // floor(m ln m) for m = 2..10 is 1,3,5,8,10,13,16,19,23; even values move up by one.
    const std::uint64_t expected[] = {1, 3, 5, 9, 11, 13, 17, 19, 23};
    for (std::uint64_t m = 2; m <= 10; ++m) EXPECT_EQ(checkpoint_index(m, Parity::odd), expected[m - 2]);
    EXPECT_EQ(checkpoint_index(3, Parity::even), 2u);
    EXPECT_THROW(checkpoint_index(1, Parity::odd), DomainError);
}

TEST(Checkpoint, ParityAndDistance) {
    for (std::uint64_t m = 2; m <= 5000; ++m) {
        const double x = static_cast<double>(m) * std::log(static_cast<double>(m));
        const auto odd = checkpoint_index(m, Parity::odd);
        const auto even = checkpoint_index(m, Parity::even);
        ASSERT_EQ(odd % 2, 1u);
        ASSERT_EQ(even % 2, 0u);
        ASSERT_LT(std::fabs(static_cast<double>(odd) - x), 1.0);
        ASSERT_LT(std::fabs(static_cast<double>(even) - x), 2.0);
    }
}

TEST(Tcond, PowersOfTwoPass) {
    auto rep = tcond_check(LengthRule::parse("pow2"), 0.1, 0.4, 20, 200);
    EXPECT_EQ(rep.status, CheckStatus::pass);
    EXPECT_GT(rep.pairs_checked, 0u);
    EXPECT_TRUE(rep.used_log_mode);
}

TEST(Tcond, OnesFailAtFirstK) {
    auto rep = tcond_check(LengthRule::parse("ones"), 0.1, 0.4, 20, 50);
    ASSERT_EQ(rep.status, CheckStatus::fail);
    EXPECT_EQ(rep.first_violation->k, 20u);
    EXPECT_EQ(rep.first_violation->condition, 3);
}

TEST(Tcond, LogPowerBlocksPassForLargeK) {
    auto rep = tcond_check(LengthRule::parse("logpow:2:1"), 0.1, 0.4, 20, 300);
    EXPECT_EQ(rep.status, CheckStatus::pass);
}

TEST(Tcond, BruteForceAgreementOnSmallLists) {
    // Independent re-evaluation of the three inequalities in long double.
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::uint64_t> lengths;
        for (int k = 1; k <= 12; ++k) lengths.push_back(1 + gen() % 30000);
        auto rep = tcond_check(LengthRule::from_list(lengths), 0.1, 0.4, 3, 12);
        bool ok = true;
        for (std::uint64_t k = 3; k <= 12; ++k) {
            const long double lk = lengths[k - 1];
            const long double kk = k;
            if (lk < kk * kk * kk * kk) ok = false;
            for (std::uint64_t kp = 3; kp < k; ++kp) {
                if (static_cast<long double>(k - kp) < kk / std::log(kk) - 2) continue;
                long double head = 0, mid = 0;
                for (std::uint64_t j = 1; j <= kp; ++j) head += lengths[j - 1];
                for (std::uint64_t j = kp + 1; j < k; ++j) mid += lengths[j - 1];
                if (lk / head < 2.1L * std::log(kk)) ok = false;
                if (mid > 0 && lk / mid < 0.8L) ok = false;
            }
        }
        EXPECT_EQ(rep.status == CheckStatus::pass, ok);
    }
}

TEST(Parse, CanonicalRoundTrip) {
    for (const char* text : {"constant:1", "linear", "powfloor:0.5", "logceil:2", "blocks:pow2",
                             "logcont:1.4426950408889634", "explicit:1,2,3", "blocks:geom:1.5",
                             "blocks:1,2,4", "blocks:logpow:2:0.5"}) {
        EXPECT_EQ(SequenceSpec::parse(text).canonical(), text);
        EXPECT_EQ(SequenceSpec::parse(SequenceSpec::parse(text).canonical()), SequenceSpec::parse(text));
    }
}

TEST(Parse, RejectsGarbageWithGrammar) {
    for (const char* text : {"", "linear:3", "powfloor:1.5", "constant:-1", "foo:1", "explicit:1,,2",
                             "powfloor:0,5", "blocks:nosuch", "constant:1e"}) {
        try {
            SequenceSpec::parse(text);
            ADD_FAILURE() << text;
        } catch (const DomainError& e) {
            EXPECT_NE(std::string(e.what()).find("powfloor:<beta>"), std::string::npos);
        }
    }
}

TEST(Registry, SingleRegistrationPoint) {
    EXPECT_TRUE(LengthRule::register_rule("triple", 0, [](const std::vector<double>&) {
        return [](std::uint64_t) { return BlockLength{3, std::log(3.0L)}; };
    }));
    EXPECT_FALSE(LengthRule::register_rule("triple", 0, nullptr));
    auto spec = SequenceSpec::parse("blocks:triple");
    EXPECT_EQ(spec.term(4), 2.0);
    EXPECT_EQ(block_start(spec, 3).first, 7u);
}
