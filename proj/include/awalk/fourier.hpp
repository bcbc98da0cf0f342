#pragma once

#include "awalk/sequences.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace awalk::fourier {

enum class Scheme { adaptive_panel, fixed_grid };
std::string to_string(Scheme scheme);
Scheme parse_scheme(const std::string& text);

struct QuadratureResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    std::uint64_t nodes = 0;
    Scheme scheme = Scheme::adaptive_panel;
    double lo = 0.0;  ///< integration domain actually meshed
    double hi = 0.0;
    std::uint64_t panels = 0;
    std::uint64_t envelope_panels = 0;  ///< panels bounded instead of integrated
};

/// A real number as sign * exp(log_magnitude); sign is 0 for an exact zero.
struct LogValue {
    int sign = 1;
    double log_magnitude = 0.0;
    double value() const;
};

LogValue cosine_product(const seq::SequenceSpec& spec, std::uint64_t n, double t, bool absolute);

struct QuadOptions {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    std::uint64_t max_nodes = 200'000'000;
    Scheme scheme = Scheme::adaptive_panel;
};

/// Default options for abs_integral: relative tolerance 1e-9.
QuadOptions abs_integral_defaults();

/// P(S(n) = z) = (1/pi) * int_0^pi cos(tz) prod cos(t a_k) dt.
QuadratureResult point_mass_fourier(const seq::SequenceSpec& spec, std::uint64_t n, std::int64_t z,
                                    const QuadOptions& options = {});

/// int_{-pi}^{pi} prod |cos(t a_k)| dt.
QuadratureResult abs_integral(const seq::SequenceSpec& spec, std::uint64_t n,
                              const QuadOptions& options = abs_integral_defaults());

struct SullivanEntry {
    std::uint64_t n = 0;
    std::optional<QuadratureResult> integral;
    double scaled = 0.0;  ///< I_n * n^(beta + 1/2)
    std::string error;
};

struct SullivanReport {
    double beta = 0.0;
    double target = 0.0;  ///< sqrt(8 pi (1 + 2 beta))
    std::vector<SullivanEntry> entries;
    double relative_gap = 0.0;  ///< |c at the largest n - target| / target
    std::optional<double> extrapolated;  ///< Aitken estimate from the last three entries
    bool monotone_approach = false;      ///< |c_n - target| strictly decreasing
};

double sullivan_target(double beta);

SullivanReport sullivan_constant_estimate(double beta, const std::vector<std::uint64_t>& n_list,
                                          const QuadOptions& options = abs_integral_defaults());

struct TransienceEntry {
    std::uint64_t n = 0;
    double value = 0.0;
    double error = 0.0;
    std::uint64_t nodes = 0;
    double partial_sum = 0.0;
    bool parity_forbidden = false;
    std::string note;
};

/// Heuristic summability diagnostic, not a proof.
struct TransienceReport {
    std::int64_t z = 0;
    std::vector<TransienceEntry> entries;
    std::optional<double> fitted_exponent;
    std::optional<double> fitted_intercept;
    std::uint64_t fit_points = 0;
    bool summable_trend = false;
    double envelope_exponent = 0.0;
    std::optional<double> envelope_nu;  ///< max over fit points of value * n^envelope_exponent
    std::string note;
};

TransienceReport transience_report(const seq::SequenceSpec& spec, std::uint64_t n_max, std::int64_t z,
                                   const QuadOptions& options = {});

}  // namespace awalk::fourier
