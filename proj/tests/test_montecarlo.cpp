#include "awalk/error.hpp"
#include "awalk/exact.hpp"
#include "awalk/montecarlo.hpp"
#include "awalk/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

using namespace awalk;
using namespace awalk::mc;
using awalk::seq::SequenceSpec;

TEST(Philox, KnownAnswers) {
    using C = Philox4x32::Counter;
    EXPECT_EQ(Philox4x32::generate({0, 0, 0, 0}, {0, 0}), (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(Philox4x32::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
              (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Simulate, HandTraces) {
    auto a = simulate_signs(SequenceSpec::constant(1), {+1, -1});
    EXPECT_EQ(a.zero_hits, 1u);
    EXPECT_EQ(a.sign_changes, 0u);
    EXPECT_EQ(a.max_abs, 1.0);
    EXPECT_EQ(a.last_zero_hit, 2u);

    auto b = simulate_signs(SequenceSpec::linear(), {+1, -1, -1});
    EXPECT_EQ(b.sign_changes, 1u);
    EXPECT_EQ(b.zero_hits, 0u);
    EXPECT_EQ(b.final_value, -4.0);
    EXPECT_EQ(b.max_abs, 4.0);
}

TEST(Simulate, SignChangeThroughZero) {
    // S = 1, 0, -1, 0, 1, 2: two changes, zeros counted separately.
    auto s = simulate_signs(SequenceSpec::constant(1), {+1, -1, -1, +1, +1, +1});
    EXPECT_EQ(s.sign_changes, 2u);
    EXPECT_EQ(s.zero_hits, 2u);
    // S = 1, 0, 1: touching zero without crossing.
    EXPECT_EQ(simulate_signs(SequenceSpec::constant(1), {+1, -1, +1}).sign_changes, 0u);
}

TEST(Simulate, Deterministic) {
    const auto spec = SequenceSpec::power_floor(0.5);
    const RngSpec rng{12345, 7};
    EXPECT_EQ(simulate(spec, 5000, rng, {0, 3}), simulate(spec, 5000, rng, {0, 3}));
    EXPECT_NE(simulate(spec, 5000, rng, {0, 3}).final_value, simulate(spec, 5000, {12345, 8}, {0, 3}).final_value);
}

TEST(Simulate, SingleStepNeverChangesSign) {
    for (std::uint64_t s = 0; s < 50; ++s)
        EXPECT_EQ(simulate(SequenceSpec::explicit_values({1}), 1, {s, s}, {}).sign_changes, 0u);
}

TEST(Simulate, BandMonotoneAndInvariants) {
    const Walk walk(SequenceSpec::log_continuous(1.4426950408889634), 20000);
    SimulationConfig config;
    config.bands = {0.5, 1, 3, 10};
    config.checkpoints = {100, 1000, 20000};
    for (std::uint64_t p = 0; p < 20; ++p) {
        const auto st = simulate(walk, {99, p}, config);
        for (std::size_t b = 1; b < config.bands.size(); ++b) EXPECT_LE(st.band_hits[b - 1], st.band_hits[b]);
        EXPECT_GE(st.max_abs, std::fabs(st.final_value));
        EXPECT_LE(st.zero_hits, st.horizon);
        ASSERT_EQ(st.snapshots.size(), 3u);
        EXPECT_EQ(st.snapshots.back().band_hits, st.band_hits);
        EXPECT_LE(st.snapshots[0].sign_changes, st.snapshots[1].sign_changes);
    }
}

TEST(Simulate, RealWalkZeroTolerance) {
    // 0.1 + 0.2 - 0.3 is not exactly zero in floating point.
    auto s = simulate_signs(SequenceSpec::explicit_values({0.1, 0.2, 0.3}), {+1, +1, -1});
    EXPECT_EQ(s.zero_hits, 1u);
}

TEST(RunPaths, IndependentOfThreadCount) {
    const Walk walk(SequenceSpec::linear(), 3000);
    SimulationConfig config;
    config.bands = {2};
    config.checkpoints = {300, 3000};
    EXPECT_EQ(run_paths(walk, 64, 5, config, 1), run_paths(walk, 64, 5, config, 4));
}

TEST(RunPaths, MeanZeroHitsMatchesExactVisits) {
    for (const char* text : {"constant:1", "powfloor:0.5", "explicit:1,2,3,5,8"}) {
        const auto spec = SequenceSpec::parse(text);
        const std::uint64_t n = 18, paths = 100000;
        const auto stats = run_paths(Walk(spec, n), paths, 2024, SimulationConfig{}, 1);
        std::vector<double> hits;
        for (const auto& s : stats) hits.push_back(static_cast<double>(s.zero_hits));
        const auto agg = aggregate(hits);
        const double expected = static_cast<double>(exact::expected_visits(spec, n, 0).total);
        EXPECT_LE(std::fabs(agg.mean - expected), 3 * agg.std_error) << text;
    }
}

TEST(RunPaths, AzumaEmpirical) {
    const auto spec = SequenceSpec::power_floor(0.8);
    const std::uint64_t n = 200, paths = 20000;
    const auto stats = run_paths(Walk(spec, n), paths, 77, SimulationConfig{}, 1);
    const double ss = seq::prefix_sum_squares(spec, n);
    for (double a : {0.5, 1.0, 1.5, 2.0, 3.0}) {
        const double A = a * std::sqrt(ss);
        double tail = 0;
        for (const auto& s : stats) tail += std::fabs(s.final_value) >= A;
        tail /= paths;
        const double bound = 2 * std::exp(-A * A / (2 * ss));
        EXPECT_LE(tail, bound + 3 * std::sqrt(bound * (1 - std::min(bound, 1.0)) / paths) + 1e-12);
    }
}

TEST(Aggregate, Basics) {
    const auto a = aggregate({0, 1, 2, 3, 4});
    EXPECT_EQ(a.mean, 2.0);
    EXPECT_EQ(a.fraction_positive, 0.8);
    EXPECT_EQ(a.quantiles[2], 2.0);
    EXPECT_NEAR(a.std_error, std::sqrt(2.5 / 5), 1e-15);
}

TEST(Bootstrap, Deterministic) {
    std::vector<double> before{1, 2, 3, 4, 5, 6}, after{2, 4, 6, 8, 10, 12};
    const auto r = bootstrap_ratio(before, after, 500, 3);
    EXPECT_EQ(r.estimate, 2.0);
    EXPECT_EQ(r.lo, 2.0);
    EXPECT_EQ(r.hi, 2.0);
    const auto d1 = bootstrap_difference(before, after, 500, 3);
    const auto d2 = bootstrap_difference(before, after, 500, 3);
    EXPECT_EQ(d1.lo, d2.lo);
    EXPECT_LE(d1.lo, d1.estimate);
    EXPECT_GE(d1.hi, d1.estimate);
}

TEST(Experiments, RecurrenceReportShape) {
    ExperimentOptions opts;
    opts.threads = 2;
    const auto r = recurrence_experiment(SequenceSpec::constant(1), 4000, {0, 2}, 200, 1, opts);
    EXPECT_EQ(r.checkpoints, (std::vector<std::uint64_t>{40, 400, 4000}));
    ASSERT_EQ(r.band_summaries.size(), 3u);
    EXPECT_EQ(r.band_summaries[0].label, "zero");
    EXPECT_TRUE(r.band_summaries[0].growth_ratio.has_value());
    const auto j = to_json(r);
    EXPECT_EQ(j["schema"], "awalk-report/1");
    EXPECT_EQ(to_json(recurrence_experiment(SequenceSpec::constant(1), 4000, {0, 2}, 200, 1)).dump(), j.dump());
    EXPECT_NE(to_csv(r).find("checkpoint,statistic,mean"), std::string::npos);
}

TEST(Experiments, ConstantLocalTimeGrowsLikeSqrtN) {
    ExperimentOptions opts;
    opts.checkpoints = {2500, 10000};
    const auto r = recurrence_experiment(SequenceSpec::constant(1), 10000, {}, 1000, 42, opts);
    const double ratio = r.snapshots[1].zero_hits.mean / r.snapshots[0].zero_hits.mean;
    EXPECT_NEAR(ratio, 2.0, 0.2);
}

TEST(Experiments, SignChangesNeedMonotone) {
    EXPECT_THROW(sign_change_experiment(SequenceSpec::explicit_values({2, 1}), 10, 5, 1), DomainError);
    const auto r = sign_change_experiment(SequenceSpec::explicit_values({1}), 1, 50, 1);
    for (double f : r.sign_change_cdf.back()) EXPECT_EQ(f, 0.0);
}

TEST(Experiments, GrowthStrictAtFirstStep) {
    // |S(1)| = 1 is not > 1^e: a window containing n = 1 never holds.
    const auto r = growth_experiment(SequenceSpec::power_floor(0.5), 1, 0.2, 20, 1);
    EXPECT_EQ(*r.growth_fraction, 0.0);
    EXPECT_THROW(growth_experiment(SequenceSpec::power_floor(0.5), 10, 0.3, 20, 1), DomainError);
    EXPECT_THROW(growth_experiment(SequenceSpec::linear(), 10, 0.1, 20, 1), UnsupportedError);
}

TEST(Tomaszewski, Examples) {
    auto a = tomaszewski_check(SequenceSpec::constant(1), 2, TomaszewskiMode::exact);
    EXPECT_EQ(*a.exact_probability, Rational(1, 2));
    EXPECT_TRUE(a.pass);
    auto b = tomaszewski_check(SequenceSpec::explicit_values({1, 2, 3}), 3, TomaszewskiMode::exact);
    // sums are 6,0,2,-4,4,-2,0,-6; four of them lie within sqrt(14)
    EXPECT_EQ(*b.exact_probability, Rational(1, 2));
    EXPECT_TRUE(b.pass);
    EXPECT_TRUE(tomaszewski_check(SequenceSpec::linear(), 12, TomaszewskiMode::exact).pass);
    auto c = tomaszewski_check(SequenceSpec::log_continuous(1.0), 10, TomaszewskiMode::exact);
    EXPECT_TRUE(c.pass);
    auto d = tomaszewski_check(SequenceSpec::linear(), 12, TomaszewskiMode::mc, 20000, 9);
    const auto e = tomaszewski_check(SequenceSpec::linear(), 12, TomaszewskiMode::exact);
    EXPECT_NEAR(d.probability, e.probability, 4 * d.std_error + 1e-9);
}

TEST(BoundRecursion, Examples) {
    auto one = BcSequence::parse("const:1");
    auto zero = BcSequence::parse("zero");
    EXPECT_EQ(bc_bound_propagation(one, zero, 3, 10).bound, 0.0);
    EXPECT_EQ(bc_bound_propagation(zero, zero, 3, 10).bound, 1.0);
    auto r = bc_bound_propagation(BcSequence::parse("inv"), BcSequence::parse("geom:0.5"), 1, 10000);
    EXPECT_LE(r.bound, 0.01);
    EXPECT_EQ(r.trajectory.size(), 10000u);
    EXPECT_THROW(bc_bound_propagation(BcSequence::parse("const:1.5"), zero, 1, 5), DomainError);
}

TEST(BoundRecursion, NonIncreasingWithoutEps) {
    for (const char* a : {"inv", "pow:0.5", "pow:2", "const:0.01"}) {
        auto r = bc_bound_propagation(BcSequence::parse(a), BcSequence::parse("zero"), 2, 5000);
        for (std::size_t i = 1; i < r.trajectory.size(); ++i) ASSERT_LE(r.trajectory[i], r.trajectory[i - 1]);
    }
    // Divergent sum of alpha with summable eps drives the bound towards 0.
    for (const char* e : {"geom:0.5", "pow:2", "pow:1.5"}) {
        auto r = bc_bound_propagation(BcSequence::parse("inv"), BcSequence::parse(e), 1, 200000);
        EXPECT_LT(r.bound, 0.05) << e;
    }
}

TEST(WorkerCount, Environment) {
    setenv("AWALK_THREADS", "3", 1);
    EXPECT_EQ(worker_count(), 3u);
    setenv("AWALK_THREADS", "zero", 1);
    EXPECT_THROW(worker_count(), DomainError);
    unsetenv("AWALK_THREADS");
    EXPECT_GE(worker_count(), 1u);
}
