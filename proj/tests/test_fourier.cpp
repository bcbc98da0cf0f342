#include "awalk/error.hpp"
#include "awalk/exact.hpp"
#include "awalk/fourier.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace awalk;
using namespace awalk::fourier;
using awalk::seq::SequenceSpec;

TEST(CosineProduct, Examples) {
    EXPECT_EQ(cosine_product(SequenceSpec::linear(), 9, 0.0, false).value(), 1.0);
    EXPECT_NEAR(cosine_product(SequenceSpec::constant(1), 2, std::numbers::pi / 3, false).value(), 0.25, 1e-15);
    EXPECT_NEAR(cosine_product(SequenceSpec::linear(), 3, std::numbers::pi / 2, false).value(), 0.0, 1e-15);
}

TEST(CosineProduct, SignAndUnderflow) {
    auto p = cosine_product(SequenceSpec::constant(1), 3, 2.0, false);
    EXPECT_EQ(p.sign, -1);
    EXPECT_NEAR(p.value(), std::pow(std::cos(2.0), 3), 1e-15);
    EXPECT_EQ(cosine_product(SequenceSpec::constant(1), 3, 2.0, true).sign, 1);
    auto tiny = cosine_product(SequenceSpec::linear(), 5000, 0.7, true);
    EXPECT_LT(tiny.log_magnitude, -1000.0);
    EXPECT_TRUE(std::isfinite(tiny.log_magnitude));
}

TEST(PointMass, Examples) {
    EXPECT_NEAR(point_mass_fourier(SequenceSpec::explicit_values({2}), 1, 2).value, 0.5, 1e-10);
    EXPECT_NEAR(point_mass_fourier(SequenceSpec::linear(), 3, 0).value, 0.25, 1e-10);
    auto q = point_mass_fourier(SequenceSpec::linear(), 8, 0);
    EXPECT_NEAR(q.value, 0.0546875, 1e-10);
    EXPECT_LE(q.abs_error_estimate, 1e-10);
    EXPECT_GE(q.nodes, 1u);
    EXPECT_THROW(point_mass_fourier(SequenceSpec::log_continuous(1.0), 3, 0), UnsupportedError);
}

TEST(PointMass, AgreesWithExactDistribution) {
    for (const char* text : {"constant:1", "linear", "powfloor:0.5", "explicit:1,2,3,5,8"}) {
        const auto spec = SequenceSpec::parse(text);
        for (std::uint64_t n : {5, 17, 40}) {
            const auto dist = exact::distribution(spec, n);
            for (std::int64_t z : {0, 1, -3, 4, 7}) {
                const double exact = to_double(dist.probability(z));
                const auto q = point_mass_fourier(spec, n, z);
                ASSERT_NEAR(q.value, exact, 1e-9) << text << " n=" << n << " z=" << z;
            }
        }
    }
}

TEST(PointMass, FixedGridIsExactForTrigPolynomials) {
    QuadOptions opts;
    opts.scheme = Scheme::fixed_grid;
    const auto spec = SequenceSpec::power_floor(0.8);
    const auto dist = exact::distribution(spec, 30);
    for (std::int64_t z : {0, 1, 2, -6}) {
        const auto q = point_mass_fourier(spec, 30, z, opts);
        EXPECT_EQ(q.scheme, Scheme::fixed_grid);
        EXPECT_NEAR(q.value, to_double(dist.probability(z)), 1e-12);
    }
}

TEST(PointMass, ToleranceErrorCarriesBestValue) {
    QuadOptions opts;
    opts.abs_tol = 1e-30;
    opts.max_nodes = 500;
    try {
        point_mass_fourier(SequenceSpec::linear(), 40, 0, opts);
        FAIL();
    } catch (const ToleranceError& e) {
        EXPECT_GT(e.achieved_error(), 0.0);
    }
}

TEST(AbsIntegral, Examples) {
    EXPECT_NEAR(abs_integral(SequenceSpec::constant(1), 1).value, 4.0, 1e-8);
    EXPECT_NEAR(abs_integral(SequenceSpec::constant(1), 2).value, std::numbers::pi, 1e-8);
    EXPECT_NEAR(abs_integral(SequenceSpec::constant(0.5), 1).value, 4.0, 1e-8);
}

TEST(AbsIntegral, FixedGridAgrees) {
    QuadOptions opts = abs_integral_defaults();
    opts.rel_tol = 1e-7;
    opts.scheme = Scheme::fixed_grid;
    for (std::uint64_t n : {3, 20}) {
        const double a = abs_integral(SequenceSpec::power_floor(0.5), n).value;
        const double b = abs_integral(SequenceSpec::power_floor(0.5), n, opts).value;
        EXPECT_NEAR(a, b, 1e-6 * a);
    }
}

TEST(AbsIntegral, NonIncreasingAndDominatesPointMass) {
    const auto spec = SequenceSpec::explicit_values({1, 2, 3, 5, 8});
    double prev = std::numeric_limits<double>::infinity();
    for (std::uint64_t n = 1; n <= 25; ++n) {
        const double i = abs_integral(spec, n).value;
        EXPECT_LE(i, prev * (1 + 1e-9));
        prev = i;
        for (std::int64_t z : {0, 1, 2, 3}) EXPECT_LE(std::numbers::pi * point_mass_fourier(spec, n, z).value, i + 1e-9);
    }
}

TEST(Sullivan, Targets) {
    EXPECT_NEAR(sullivan_target(0.5), 7.08982, 1e-5);
    EXPECT_NEAR(sullivan_target(1.0), 8.683215, 1e-6);
}

TEST(Sullivan, ScaledSeriesApproachesTarget) {
    const auto rep = sullivan_constant_estimate(0.5, {50, 100, 200, 400});
    ASSERT_EQ(rep.entries.size(), 4u);
    for (const auto& e : rep.entries) EXPECT_TRUE(e.error.empty());
    EXPECT_TRUE(rep.monotone_approach);
    EXPECT_LT(rep.relative_gap, 0.3);
    EXPECT_THROW(sullivan_constant_estimate(0.5, {100, 50}), DomainError);
}

TEST(Transience, LinearExponent) {
    const auto rep = transience_report(SequenceSpec::linear(), 60, 0);
    ASSERT_TRUE(rep.fitted_exponent.has_value());
    EXPECT_NEAR(*rep.fitted_exponent, -1.5, 0.1);
    EXPECT_TRUE(rep.summable_trend);
    for (const auto& e : rep.entries) {
        const double exact = to_double(exact::distribution(SequenceSpec::linear(), e.n).probability(0));
        EXPECT_NEAR(e.value, exact, 1e-9);
    }
}

TEST(Transience, ConstantNotSummable) {
    const auto rep = transience_report(SequenceSpec::constant(1), 60, 0);
    ASSERT_TRUE(rep.fitted_exponent.has_value());
    EXPECT_NEAR(*rep.fitted_exponent, -0.5, 0.05);
    EXPECT_FALSE(rep.summable_trend);
}

TEST(Transience, PowerFloorEnvelope) {
    const auto rep = transience_report(SequenceSpec::power_floor(0.5), 60, 0);
    EXPECT_EQ(rep.envelope_exponent, 1.0);
    ASSERT_TRUE(rep.envelope_nu.has_value());
    for (const auto& e : rep.entries)
        if (e.n > 30) EXPECT_LE(e.value, *rep.envelope_nu / static_cast<double>(e.n) + 1e-12);
}

TEST(Transience, TooFewPoints) {
    const auto rep = transience_report(SequenceSpec::linear(), 6, 0);
    EXPECT_FALSE(rep.fitted_exponent.has_value());
    EXPECT_FALSE(rep.note.empty());
}
