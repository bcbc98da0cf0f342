#include "awalk/error.hpp"
#include "awalk/verify.hpp"

#include <gtest/gtest.h>

using namespace awalk;
using namespace awalk::verify;

// Regression values from the first full sweep.
TEST(Thresholds, LocalLowerBound) {
    const auto s = local_sweep();
    ASSERT_TRUE(s.threshold.has_value());
    EXPECT_EQ(*s.threshold, 1u);
    EXPECT_TRUE(s.failures.empty());
}

TEST(Thresholds, ResidueLowerBound) {
    const auto s = residue_sweep();
    ASSERT_TRUE(s.threshold.has_value());
    EXPECT_EQ(*s.threshold, 1u);
}

TEST(Thresholds, TwoScaleDensity) {
    const auto s = two_scale_sweep();
    ASSERT_TRUE(s.threshold.has_value());
    EXPECT_EQ(*s.threshold, 2u);
}

TEST(Thresholds, SweepsDetectFailures) {
    // c = 1 is far above the true constant, so small m must fail
    const auto s = local_sweep(Rational(1), 200);
    EXPECT_FALSE(s.failures.empty());
    EXPECT_FALSE(s.threshold.has_value());
    const auto d = two_scale_sweep(Rational(10), 6);
    EXPECT_FALSE(d.threshold.has_value());
}

TEST(Suites, Inequalities) {
    const auto r = run_suite(Suite::inequalities);
    EXPECT_TRUE(r.pass());
    const auto* az = r.find("azuma");
    ASSERT_NE(az, nullptr);
    EXPECT_EQ(az->details["lists"], 797160);
    EXPECT_EQ(az->details["failures"], 0);
    EXPECT_EQ(r.find("dominance")->details["cases"], 1140);
}

TEST(Suites, OraclesPatternsBc) {
    for (auto s : {Suite::oracles, Suite::patterns, Suite::bc}) {
        const auto r = run_suite(s);
        EXPECT_TRUE(r.pass()) << to_json(r).dump(1);
    }
}

TEST(Suites, SmallAzumaSweepMatchesCount) {
    const auto c = azuma_sweep(3);
    EXPECT_TRUE(c.pass);
    EXPECT_EQ(c.details["lists"], 3 + 9 + 27);
}

TEST(Suites, JsonShape) {
    const auto j = to_json(run_suite(Suite::patterns));
    EXPECT_EQ(j["schema"], "awalk-verify/1");
    EXPECT_EQ(j["suite"], "patterns");
    EXPECT_TRUE(j["pass"].get<bool>());
    EXPECT_EQ(j["checks"].size(), 2u);
    EXPECT_THROW(parse_suite("bogus"), DomainError);
}

TEST(BruteForce, Counts) {
    EXPECT_EQ(brute_force_counts({1, 2, 3}), (std::vector<std::uint64_t>{1, 1, 1, 2, 1, 1, 1}));
}
