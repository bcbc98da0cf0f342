#pragma once

#include "awalk/numeric.hpp"
#include "awalk/sequences.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace awalk::verify {

struct Check {
    std::string name;
    bool pass = false;
    nlohmann::ordered_json details = nlohmann::ordered_json::object();
};

struct SuiteReport {
    std::string suite;
    std::vector<Check> checks;

    bool pass() const;
    const Check* find(const std::string& name) const;
};

nlohmann::ordered_json to_json(const SuiteReport& report);

enum class Suite { inequalities, oracles, patterns, bc };
Suite parse_suite(const std::string& text);
std::string to_string(Suite suite);

SuiteReport run_suite(Suite suite);

/// Integer-valued specs used by the oracle and Tomaszewski batteries.
std::vector<seq::SequenceSpec> standard_battery();

/// Exact P(|S| >= A) against 2 exp(-A^2 / (2 sum b^2)) for all lists over {1,2,3}
/// up to `max_length` and integer A in [1, sum b].
Check azuma_sweep(std::uint64_t max_length = 12);

/// Result of a threshold search: the bound holds for every index in [threshold, upper].
struct ThresholdSweep {
    std::optional<std::uint64_t> threshold;  ///< none when it fails at the upper end
    std::uint64_t evaluations = 0;
    std::vector<std::uint64_t> failures;  ///< failing indices, ascending
};

/// P(T_m = z) >= c / sqrt(m) for |z| <= 2 sqrt(m), m + z even, m <= m_max.
ThresholdSweep local_sweep(const Rational& c = Rational(1, 10), std::uint64_t m_max = 2000);
Check local_check(std::uint64_t m0_limit = 64);

/// P(T_m = u mod k) >= c / k for k <= k_max, m in [k^2, m_max], under the parity hypotheses.
ThresholdSweep residue_sweep(const Rational& c = Rational(1, 20), std::uint64_t k_max = 40, std::uint64_t m_max = 4000);
Check residue_check();

/// P(T = j) >= c / n for even k <= k_max, n = k^2, admissible |j| <= n.
ThresholdSweep two_scale_sweep(const Rational& c = Rational(1, 400), std::uint64_t k_max = 20);
Check two_scale_check();

/// Dominance for every non-decreasing list over {1,2,3} of length <= max_length.
Check dominance_sweep(std::uint64_t max_length = 10);

/// Tomaszewski bound over the battery for n <= n_max.
Check tomaszewski_battery(std::uint64_t n_max = 20);

/// Counts of S(n) by enumerating all 2^n sign vectors; index i is z = -A_n + 2i.
std::vector<std::uint64_t> brute_force_counts(const std::vector<std::int64_t>& weights);

Check distribution_oracle(std::uint64_t n_max = 18);
Check signed_count_regression();
Check fourier_agreement();
Check monte_carlo_consistency(std::uint64_t paths = 100000, std::uint64_t horizon = 18);

Check pattern_enumeration(std::uint64_t kappa_max = 20);
Check pattern_ratio(std::uint64_t kappa = 30, double lambda = 0.877, double tolerance = 0.005);

Check bc_harmonic();
Check bc_monotone();
Check bc_degenerate();
Check bc_grid();

}  // namespace awalk::verify
