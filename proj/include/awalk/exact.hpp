#pragma once

#include "awalk/numeric.hpp"
#include "awalk/sequences.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace awalk::exact {

/// Exact pmf of S(n) for integer weights. Only points of the right parity are
/// stored: index i holds the number of sign vectors with S(n) = offset + stride * i.
struct LatticeDist {
    std::uint64_t n = 0;
    std::int64_t offset = 0;  ///< -A_n, the minimum of the support
    std::int64_t stride = 2;
    std::vector<BigInt> counts;

    /// A_n = sum of the weights, the support radius.
    std::int64_t radius() const { return -offset; }
    std::int64_t max_point() const { return offset + stride * static_cast<std::int64_t>(counts.size() - 1); }
    BigInt total() const { return pow2(n); }
    /// Count for an arbitrary integer z; zero off the lattice.
    BigInt count(std::int64_t z) const;
    Rational probability(std::int64_t z) const;
    /// Sum of counts over |z| <= c.
    BigInt band_count(std::int64_t c) const;
};

struct DistributionOptions {
    std::uint64_t memory_budget_bytes = 1ULL << 30;
};

/// Bytes the big-integer DP needs for n steps with support radius `radius`.
std::uint64_t distribution_bytes(std::uint64_t n, std::int64_t radius);

LatticeDist distribution(const seq::SequenceSpec& spec, std::uint64_t n,
                         const DistributionOptions& options = {});
LatticeDist distribution_of_weights(std::span<const std::int64_t> weights,
                                    const DistributionOptions& options = {});

/// Same recursion with machine-word counts; valid while the step count is <= 63.
/// Index i holds the count for z = -A + 2i.
std::vector<std::uint64_t> counts_u64(std::span<const std::int64_t> weights);

BigInt signed_count(const seq::SequenceSpec& spec, std::uint64_t n, std::int64_t target,
                    const DistributionOptions& options = {});

enum class PrecisionMode { exact, high_precision };
std::string to_string(PrecisionMode mode);

struct HitOptions {
    /// Exact rationals are used while the horizon N (the bit length of 2^N) stays within this budget.
    std::uint64_t exact_bit_budget = 4096;
    std::uint64_t memory_budget_bytes = 1ULL << 30;
};

struct HitProbability {
    PrecisionMode mode = PrecisionMode::exact;
    std::optional<Rational> exact;
    HpFloat value;
};

/// P(|S(n)| <= C for some n <= N), by a forward recursion that removes mass on first entry.
HitProbability zero_hit_probability(const seq::SequenceSpec& spec, std::uint64_t horizon,
                                    std::int64_t band, const HitOptions& options = {});

struct VisitSeries {
    PrecisionMode mode = PrecisionMode::exact;
    std::vector<HpFloat> series;                 ///< P(|S(n)| <= C), n = 1..N
    std::vector<Rational> exact_series;          ///< filled in exact mode
    HpFloat total;
    std::optional<Rational> exact_total;
};

/// Sum over n <= N of P(|S(n)| <= C), with the per-n series.
VisitSeries expected_visits(const seq::SequenceSpec& spec, std::uint64_t horizon, std::int64_t band,
                            const HitOptions& options = {});

struct HitReport {
    std::uint64_t horizon = 0;
    std::int64_t band = 0;
    HitProbability hit;
    VisitSeries visits;
};

HitReport hit_report(const seq::SequenceSpec& spec, std::uint64_t horizon, std::int64_t band,
                     const HitOptions& options = {});

BigInt binomial(std::uint64_t n, std::uint64_t k);

/// P(T_m = z) for a simple symmetric walk T.
Rational srw_point(std::uint64_t m, std::int64_t z);
/// P(T_m = u mod k).
Rational srw_mod(std::uint64_t m, std::uint64_t k, std::int64_t u);
/// P(T = j) for T = (k-1)(X_1+...+X_n) + k(Y_1+...+Y_n), k even.
Rational two_scale_point(std::uint64_t k, std::uint64_t n, std::int64_t j);

struct DominanceReport {
    std::int64_t r = 0;                  ///< ceil(A / a_{m+1})
    std::vector<Rational> walk_survival; ///< P(tau > j), j = 0..H
    std::vector<Rational> srw_survival;  ///< P(tau~ > j), j = 0..H
    bool pass = false;
};

/// Compares the survival function of the first time the walk started at A
/// drops to <= 0 with that of a simple walk reaching -ceil(A / a_{m+1}).
DominanceReport dominance_check(std::span<const double> tail_weights, double start, std::size_t horizon);

struct AzumaReport {
    Rational tail;      ///< P(|S| >= A)
    double bound = 0;   ///< 2 exp(-A^2 / (2 sum b^2))
    bool pass = false;
};

AzumaReport azuma_check(std::span<const double> weights, double threshold);

/// Number of +-1 strings of length kappa without a consecutive (-1, +1, -1).
BigInt avoid_pattern_count(std::uint64_t kappa);

// Serialization. Binary layout: "AWLD", version u8, n u64, offset i64,
// stride u32, entry count u64, then per count a u32 byte length followed by
// the magnitude in little-endian bytes. All integers little-endian.
void write_binary(std::ostream& out, const LatticeDist& dist);
LatticeDist read_binary(std::istream& in);
/// CSV with header `z,count,prob`, one row per lattice point.
void write_csv(std::ostream& out, const LatticeDist& dist);

}  // namespace awalk::exact
