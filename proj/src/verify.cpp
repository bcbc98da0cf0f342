#include "awalk/verify.hpp"

#include "awalk/error.hpp"
#include "awalk/exact.hpp"
#include "awalk/fourier.hpp"
#include "awalk/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace awalk::verify {

using json = nlohmann::ordered_json;
using seq::SequenceSpec;

bool SuiteReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check* SuiteReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

json to_json(const SuiteReport& report) {
    json j;
    j["schema"] = "awalk-verify/1";
    j["suite"] = report.suite;
    j["pass"] = report.pass();
    json checks = json::array();
    for (const auto& c : report.checks) {
        json e;
        e["name"] = c.name;
        e["pass"] = c.pass;
        for (auto it = c.details.begin(); it != c.details.end(); ++it) e[it.key()] = it.value();
        checks.push_back(std::move(e));
    }
    j["checks"] = std::move(checks);
    return j;
}

Suite parse_suite(const std::string& text) {
    if (text == "inequalities") return Suite::inequalities;
    if (text == "oracles") return Suite::oracles;
    if (text == "patterns") return Suite::patterns;
    if (text == "bc") return Suite::bc;
    throw DomainError("unknown suite '" + text + "'; expected inequalities | oracles | patterns | bc");
}

std::string to_string(Suite suite) {
    switch (suite) {
        case Suite::inequalities: return "inequalities";
        case Suite::oracles: return "oracles";
        case Suite::patterns: return "patterns";
        case Suite::bc: return "bc";
    }
    return "";
}

SuiteReport run_suite(Suite suite) {
    SuiteReport r;
    r.suite = to_string(suite);
    switch (suite) {
        case Suite::inequalities:
            r.checks = {azuma_sweep(), local_check(), residue_check(), two_scale_check(), dominance_sweep(),
                        tomaszewski_battery()};
            break;
        case Suite::oracles:
            r.checks = {distribution_oracle(), signed_count_regression(), fourier_agreement(),
                        monte_carlo_consistency()};
            break;
        case Suite::patterns: r.checks = {pattern_enumeration(), pattern_ratio()}; break;
        case Suite::bc: r.checks = {bc_harmonic(), bc_monotone(), bc_degenerate(), bc_grid()}; break;
    }
    return r;
}

std::vector<SequenceSpec> standard_battery() {
    return {SequenceSpec::constant(1), SequenceSpec::linear(), SequenceSpec::power_floor(0.5),
            SequenceSpec::power_floor(0.8), SequenceSpec::explicit_values({1, 2, 3, 5, 8})};
}

// ---------------------------------------------------------------- Azuma

namespace {

constexpr int kAzumaWeights = 3;

struct AzumaState {
    std::uint64_t max_length;
    std::int64_t radius;  // max possible |S|
    std::vector<int> list;
    std::uint64_t lists = 0;
    std::uint64_t comparisons = 0;
    std::uint64_t failures = 0;
    long double min_slack = 1e300L;
    std::vector<int> tightest;
    std::int64_t tightest_a = 0;
    json first_failure;
};

void azuma_visit(AzumaState& st, const std::vector<std::uint64_t>& counts, std::int64_t sum, std::int64_t sum_sq) {
    const std::size_t len = st.list.size();
    if (len > 0) {
        ++st.lists;
        const std::int64_t r = st.radius;
        const long double total = std::ldexp(1.0L, static_cast<int>(len));
        // tail[A] = #{|S| >= A}, accumulated from the outside in
        std::uint64_t tail = 0;
        for (std::int64_t a = sum; a >= 1; --a) {
            tail += counts[static_cast<std::size_t>(r + a)];
            tail += counts[static_cast<std::size_t>(r - a)];
            const long double p = static_cast<long double>(tail) / total;
            const long double bound =
                2.0L * std::exp(-static_cast<long double>(a * a) / (2.0L * static_cast<long double>(sum_sq)));
            ++st.comparisons;
            const long double slack = bound - p;
            if (slack < st.min_slack) {
                st.min_slack = slack;
                st.tightest = st.list;
                st.tightest_a = a;
            }
            if (p > bound) {
                if (st.failures++ == 0) st.first_failure = {{"weights", st.list}, {"A", a}};
            }
        }
    }
    if (len == st.max_length) return;
    std::vector<std::uint64_t> next(counts.size());
    for (int w = 1; w <= kAzumaWeights; ++w) {
        std::fill(next.begin(), next.end(), 0);
        for (std::size_t i = 0; i < counts.size(); ++i) {
            if (counts[i] == 0) continue;
            next[i + w] += counts[i];
            next[i - w] += counts[i];
        }
        st.list.push_back(w);
        azuma_visit(st, next, sum + w, sum_sq + w * w);
        st.list.pop_back();
    }
}

}  // namespace

Check azuma_sweep(std::uint64_t max_length) {
    AzumaState st;
    st.max_length = max_length;
    st.radius = static_cast<std::int64_t>(max_length) * kAzumaWeights;
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(2 * st.radius + 1), 0);
    counts[static_cast<std::size_t>(st.radius)] = 1;
    azuma_visit(st, counts, 0, 0);
    Check c;
    c.name = "azuma";
    c.pass = st.failures == 0;
    c.details["max_length"] = max_length;
    c.details["weights"] = "{1,2,3}";
    c.details["lists"] = st.lists;
    c.details["comparisons"] = st.comparisons;
    c.details["failures"] = st.failures;
    c.details["min_slack"] = static_cast<double>(st.min_slack);
    c.details["tightest"] = {{"weights", st.tightest}, {"A", st.tightest_a}};
    if (st.failures > 0) c.details["first_failure"] = st.first_failure;
    return c;
}

// ------------------------------------------------------------- threshold sweeps

namespace {

// Smallest t such that no failure lies in [t, upper]; none if upper itself fails.
void finish_sweep(ThresholdSweep& s, std::uint64_t lower, std::uint64_t upper) {
    std::sort(s.failures.begin(), s.failures.end());
    s.failures.erase(std::unique(s.failures.begin(), s.failures.end()), s.failures.end());
    if (s.failures.empty()) {
        s.threshold = lower;
    } else if (s.failures.back() < upper) {
        s.threshold = s.failures.back() + 1;
    }
}

json sweep_json(const ThresholdSweep& s) {
    json j;
    j["threshold"] = s.threshold ? json(*s.threshold) : json(nullptr);
    j["evaluations"] = s.evaluations;
    j["failures"] = s.failures;
    return j;
}

// Near-threshold decisions are redone in exact arithmetic.
constexpr double kRecheckMargin = 1e-6;

}  // namespace

ThresholdSweep local_sweep(const Rational& c, std::uint64_t m_max) {
    ThresholdSweep s;
    const double cd = to_double(c);
    const Rational c2 = c * c;
    for (std::uint64_t m = 1; m <= m_max; ++m) {
        const double md = static_cast<double>(m);
        const double log_rhs = std::log(cd) - 0.5 * std::log(md);
        const double lg = std::lgamma(md + 1.0) - md * std::numbers::ln2;
        bool ok = true;
        for (std::int64_t z = -static_cast<std::int64_t>(m); z <= static_cast<std::int64_t>(m); z += 2) {
            if (static_cast<std::uint64_t>(z * z) > 4 * m) continue;
            ++s.evaluations;
            const double w = (md + static_cast<double>(z)) / 2.0;
            const double log_p = lg - std::lgamma(w + 1.0) - std::lgamma(md - w + 1.0);
            bool holds = log_p >= log_rhs;
            if (std::fabs(log_p - log_rhs) < kRecheckMargin) {
                const Rational p = exact::srw_point(m, z);
                holds = p * p * m >= c2;
            }
            ok = ok && holds;
        }
        if (!ok) s.failures.push_back(m);
    }
    finish_sweep(s, 1, m_max);
    return s;
}

Check local_check(std::uint64_t m0_limit) {
    const std::uint64_t m_max = 2000;
    const auto s = local_sweep(Rational(1, 10), m_max);
    Check c;
    c.name = "local_srw_lower_bound";
    c.pass = s.threshold && *s.threshold <= m0_limit;
    c.details["c1"] = 0.1;
    c.details["m_max"] = m_max;
    c.details["m0_limit"] = m0_limit;
    c.details["m0"] = s.threshold ? json(*s.threshold) : json(nullptr);
    c.details["sweep"] = sweep_json(s);
    return c;
}

ThresholdSweep residue_sweep(const Rational& c, std::uint64_t k_max, std::uint64_t m_max) {
    ThresholdSweep s;
    const double cd = to_double(c);
    for (std::uint64_t k = 1; k <= k_max; ++k) {
        const double rhs = cd / static_cast<double>(k);
        const Rational rhs_exact = c / k;
        std::vector<double> v(k, 0.0), next(k);
        v[0] = 1.0;
        bool ok = true;
        for (std::uint64_t m = 1; m <= m_max; ++m) {
            for (std::uint64_t u = 0; u < k; ++u) next[u] = 0.5 * (v[(u + k - 1) % k] + v[(u + 1) % k]);
            std::swap(v, next);
            if (m < k * k) continue;
            for (std::uint64_t u = 0; u < k; ++u) {
                if (k % 2 == 0 && (m - u) % 2 != 0) continue;
                ++s.evaluations;
                bool holds = v[u] >= rhs;
                if (std::fabs(v[u] - rhs) < kRecheckMargin * rhs)
                    holds = exact::srw_mod(m, k, static_cast<std::int64_t>(u)) >= rhs_exact;
                ok = ok && holds;
            }
        }
        if (!ok) s.failures.push_back(k);
    }
    finish_sweep(s, 1, k_max);
    return s;
}

Check residue_check() {
    const std::uint64_t k_max = 40, m_max = 4000;
    const auto s = residue_sweep(Rational(1, 20), k_max, m_max);
    Check c;
    c.name = "srw_residue_lower_bound";
    c.pass = s.threshold.has_value();
    c.details["constant"] = 0.05;
    c.details["k_max"] = k_max;
    c.details["m_max"] = m_max;
    c.details["k1"] = s.threshold ? json(*s.threshold) : json(nullptr);
    c.details["sweep"] = sweep_json(s);
    return c;
}

ThresholdSweep two_scale_sweep(const Rational& c, std::uint64_t k_max) {
    ThresholdSweep s;
    for (std::uint64_t k = 2; k <= k_max; k += 2) {
        const std::uint64_t n = k * k;
        const Rational rhs = c / n;
        const auto nn = static_cast<std::int64_t>(n);
        // T has the parity of n(2k - 1), which is even here
        bool ok = true;
        for (std::int64_t j = -nn; j <= nn; j += 2) {
            ++s.evaluations;
            if (exact::two_scale_point(k, n, j) < rhs) ok = false;
        }
        if (!ok) s.failures.push_back(k);
    }
    finish_sweep(s, 2, k_max);
    return s;
}

Check two_scale_check() {
    const std::uint64_t k_max = 20;
    const auto s = two_scale_sweep(Rational(1, 400), k_max);
    Check c;
    c.name = "two_scale_density";
    c.pass = s.threshold.has_value();
    c.details["constant"] = 0.0025;
    c.details["k_max"] = k_max;
    c.details["k2"] = s.threshold ? json(*s.threshold) : json(nullptr);
    c.details["sweep"] = sweep_json(s);
    return c;
}

// ------------------------------------------------------------ dominance

namespace {

void nondecreasing_lists(std::vector<double>& cur, std::size_t length, double from,
                         std::vector<std::vector<double>>& out) {
    if (cur.size() == length) {
        out.push_back(cur);
        return;
    }
    for (double w = from; w <= 3.0; w += 1.0) {
        cur.push_back(w);
        nondecreasing_lists(cur, length, w, out);
        cur.pop_back();
    }
}

}  // namespace

Check dominance_sweep(std::uint64_t max_length) {
    const std::array<double, 4> starts = {0.5, 1.0, 1.5, 2.0};
    std::uint64_t cases = 0, failures = 0;
    json first_failure;
    for (std::size_t h = 1; h <= max_length; ++h) {
        std::vector<std::vector<double>> lists;
        std::vector<double> cur;
        nondecreasing_lists(cur, h, 1.0, lists);
        for (const auto& w : lists)
            for (double a : starts) {
                ++cases;
                if (!exact::dominance_check(w, a, h).pass && failures++ == 0)
                    first_failure = {{"weights", w}, {"A", a}};
            }
    }
    Check c;
    c.name = "dominance";
    c.pass = failures == 0;
    c.details["max_length"] = max_length;
    c.details["starts"] = starts;
    c.details["cases"] = cases;
    c.details["failures"] = failures;
    if (failures > 0) c.details["first_failure"] = first_failure;
    return c;
}

Check tomaszewski_battery(std::uint64_t n_max) {
    std::uint64_t cases = 0, failures = 0;
    json worst = json::object();
    Rational min_p = 2;
    for (const auto& spec : standard_battery())
        for (std::uint64_t n = 1; n <= n_max; ++n) {
            const auto r = mc::tomaszewski_check(spec, n, mc::TomaszewskiMode::exact);
            ++cases;
            if (!r.pass) ++failures;
            if (*r.exact_probability < min_p) {
                min_p = *r.exact_probability;
                worst = {{"spec", spec.canonical()}, {"n", n}, {"probability", format_rational(min_p)}};
            }
        }
    Check c;
    c.name = "tomaszewski";
    c.pass = failures == 0;
    c.details["n_max"] = n_max;
    c.details["cases"] = cases;
    c.details["failures"] = failures;
    c.details["minimum"] = worst;
    return c;
}

// -------------------------------------------------------------- oracles

std::vector<std::uint64_t> brute_force_counts(const std::vector<std::int64_t>& weights) {
    if (weights.size() > 30) throw ResourceError("brute force enumeration is limited to 30 steps", 0);
    std::int64_t total = 0;
    for (auto w : weights) total += w;
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(total + 1), 0);
    const std::uint64_t n = weights.size();
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
        std::int64_t s = 0;
        for (std::uint64_t i = 0; i < n; ++i) s += ((mask >> i) & 1U) ? weights[i] : -weights[i];
        ++counts[static_cast<std::size_t>((s + total) / 2)];
    }
    return counts;
}

Check distribution_oracle(std::uint64_t n_max) {
    std::uint64_t cases = 0, mismatches = 0;
    json first;
    for (const auto& spec : standard_battery())
        for (std::uint64_t n = 1; n <= n_max; ++n) {
            ++cases;
            const auto brute = brute_force_counts(spec.integer_step_weights(n));
            const auto dist = exact::distribution(spec, n);
            bool same = dist.counts.size() == brute.size();
            for (std::size_t i = 0; same && i < brute.size(); ++i) same = dist.counts[i] == brute[i];
            if (!same && mismatches++ == 0) first = {{"spec", spec.canonical()}, {"n", n}};
        }
    Check c;
    c.name = "distribution_vs_enumeration";
    c.pass = mismatches == 0;
    c.details["n_max"] = n_max;
    c.details["cases"] = cases;
    c.details["mismatches"] = mismatches;
    if (mismatches > 0) c.details["first_mismatch"] = first;
    return c;
}

Check signed_count_regression() {
    const auto lin = SequenceSpec::linear();
    const std::array<int, 8> expected = {0, 0, 2, 2, 0, 0, 8, 14};
    bool small_ok = true;
    json small = json::array();
    for (std::uint64_t n = 1; n <= 8; ++n) {
        const BigInt q = exact::signed_count(lin, n, 0);
        small.push_back(q.str());
        small_ok = small_ok && q == expected[n - 1];
    }
    bool zeros_ok = true;
    for (std::uint64_t n = 1; n <= 120; ++n)
        if (n % 4 == 1 || n % 4 == 2) zeros_ok = zeros_ok && exact::signed_count(lin, n, 0) == 0;
    json ratios = json::object();
    bool ratio_ok = true;
    for (std::uint64_t n : {103, 104}) {
        const BigInt q = exact::signed_count(lin, n, 0);
        const double frac = to_double(Rational(q, pow2(n)));
        const double ratio =
            frac * std::pow(static_cast<double>(n), 1.5) / std::sqrt(6.0 / std::numbers::pi);
        ratios[std::to_string(n)] = ratio;
        ratio_ok = ratio_ok && ratio >= 0.9 && ratio <= 1.1;
    }
    Check c;
    c.name = "signed_count";
    c.pass = small_ok && zeros_ok && ratio_ok;
    c.details["q_1_to_8"] = small;
    c.details["small_values_match"] = small_ok;
    c.details["zero_when_n_mod_4_in_1_2"] = zeros_ok;
    c.details["asymptotic_ratio"] = ratios;
    return c;
}

Check fourier_agreement() {
    double worst = 0.0;
    std::uint64_t cases = 0;
    json where;
    for (const auto& spec : standard_battery())
        for (std::uint64_t n : {10, 30, 50}) {
            const auto dist = exact::distribution(spec, n);
            for (std::int64_t z : {0, 1, -1, 5, -5}) {
                ++cases;
                const double diff =
                    std::fabs(fourier::point_mass_fourier(spec, n, z).value - to_double(dist.probability(z)));
                if (diff >= worst) {
                    worst = diff;
                    where = {{"spec", spec.canonical()}, {"n", n}, {"z", z}};
                }
            }
        }
    Check c;
    c.name = "fourier_vs_distribution";
    c.pass = worst <= 1e-8;
    c.details["tolerance"] = 1e-8;
    c.details["cases"] = cases;
    c.details["max_abs_difference"] = worst;
    c.details["worst_case"] = where;
    return c;
}

Check monte_carlo_consistency(std::uint64_t paths, std::uint64_t horizon) {
    json rows = json::array();
    bool ok = true;
    std::uint64_t seed = 20240601;
    for (const auto& spec : standard_battery()) {
        const double expected = static_cast<double>(exact::expected_visits(spec, horizon, 0).total);
        const mc::Walk walk(spec, horizon);
        const auto stats = mc::run_paths(walk, paths, seed++, mc::SimulationConfig{});
        std::vector<double> hits;
        hits.reserve(stats.size());
        for (const auto& p : stats) hits.push_back(static_cast<double>(p.zero_hits));
        const auto agg = mc::aggregate(hits);
        const double z = agg.std_error > 0 ? (agg.mean - expected) / agg.std_error : 0.0;
        const bool within = std::fabs(z) <= 3.0 || (agg.std_error == 0 && agg.mean == expected);
        ok = ok && within;
        rows.push_back({{"spec", spec.canonical()},
                        {"expected_visits", expected},
                        {"mean", agg.mean},
                        {"std_error", agg.std_error},
                        {"z_score", z},
                        {"pass", within}});
    }
    Check c;
    c.name = "monte_carlo_vs_expected_visits";
    c.pass = ok;
    c.details["paths"] = paths;
    c.details["horizon"] = horizon;
    c.details["rows"] = rows;
    return c;
}

// -------------------------------------------------------------- patterns

Check pattern_enumeration(std::uint64_t kappa_max) {
    std::uint64_t mismatches = 0;
    json counts = json::array();
    for (std::uint64_t kappa = 1; kappa <= kappa_max; ++kappa) {
        std::uint64_t brute = 0;
        for (std::uint64_t mask = 0; mask < (1ULL << kappa); ++mask) {
            // bit set = +1; forbidden: -1, +1, -1 at consecutive positions
            bool bad = false;
            for (std::uint64_t i = 0; i + 2 < kappa && !bad; ++i)
                bad = !((mask >> i) & 1U) && ((mask >> (i + 1)) & 1U) && !((mask >> (i + 2)) & 1U);
            brute += !bad;
        }
        const BigInt dp = exact::avoid_pattern_count(kappa);
        counts.push_back(brute);
        if (dp != brute) ++mismatches;
    }
    Check c;
    c.name = "pattern_vs_enumeration";
    c.pass = mismatches == 0;
    c.details["kappa_max"] = kappa_max;
    c.details["counts"] = counts;
    c.details["mismatches"] = mismatches;
    return c;
}

Check pattern_ratio(std::uint64_t kappa, double lambda, double tolerance) {
    const double r = to_double(Rational(exact::avoid_pattern_count(kappa + 1), exact::avoid_pattern_count(kappa)));
    json ratios = json::array();
    for (std::uint64_t k = 1; k <= kappa; ++k)
        ratios.push_back(
            to_double(Rational(exact::avoid_pattern_count(k + 1), exact::avoid_pattern_count(k))) / 2.0);
    Check c;
    c.name = "pattern_growth_ratio";
    c.pass = std::fabs(r / 2.0 - lambda) <= tolerance;
    c.details["kappa"] = kappa;
    c.details["half_ratio"] = r / 2.0;
    c.details["lambda"] = lambda;
    c.details["tolerance"] = tolerance;
    c.details["half_ratios"] = ratios;
    return c;
}

// ------------------------------------------------------------------- bc

Check bc_harmonic() {
    const auto r = mc::bc_bound_propagation(mc::BcSequence::parse("inv"), mc::BcSequence::parse("geom:0.5"), 1, 10000);
    Check c;
    c.name = "bc_harmonic_geometric";
    c.pass = r.bound <= 0.01;
    c.details["alpha"] = "inv";
    c.details["eps"] = "geom:0.5";
    c.details["ell"] = r.ell;
    c.details["m"] = r.m;
    c.details["bound"] = r.bound;
    c.details["limit"] = 0.01;
    return c;
}

Check bc_monotone() {
    bool ok = true;
    json rows = json::array();
    for (const char* alpha : {"inv", "pow:0.5", "const:0.01", "pow:2"}) {
        const auto r = mc::bc_bound_propagation(mc::BcSequence::parse(alpha), mc::BcSequence::parse("zero"), 1, 10000);
        const bool mono = std::is_sorted(r.trajectory.rbegin(), r.trajectory.rend());
        ok = ok && mono;
        rows.push_back({{"alpha", alpha}, {"non_increasing", mono}, {"bound", r.bound}});
    }
    Check c;
    c.name = "bc_zero_eps_non_increasing";
    c.pass = ok;
    c.details["rows"] = rows;
    return c;
}

Check bc_degenerate() {
    const auto ones = mc::bc_bound_propagation(mc::BcSequence::parse("const:1"), mc::BcSequence::parse("zero"), 3, 50);
    const auto none = mc::bc_bound_propagation(mc::BcSequence::parse("zero"), mc::BcSequence::parse("zero"), 3, 50);
    Check c;
    c.name = "bc_degenerate_cases";
    c.pass = ones.bound == 0.0 && none.bound == 1.0;
    c.details["alpha_one_bound"] = ones.bound;
    c.details["alpha_zero_bound"] = none.bound;
    return c;
}

Check bc_grid() {
    const std::uint64_t m = 100000;
    bool ok = true;
    json rows = json::array();
    for (const char* alpha : {"inv", "pow:0.75", "pow:0.5"})
        for (const char* eps : {"geom:0.5", "geom:0.9", "pow:2", "pow:1.5"}) {
            const auto r = mc::bc_bound_propagation(mc::BcSequence::parse(alpha), mc::BcSequence::parse(eps), 1, m);
            const double tail_min = *std::min_element(r.trajectory.begin() + static_cast<std::ptrdiff_t>(m / 2),
                                                      r.trajectory.end());
            const bool small = tail_min <= 0.05;
            ok = ok && small;
            rows.push_back({{"alpha", alpha}, {"eps", eps}, {"bound", r.bound}, {"tail_min", tail_min},
                            {"pass", small}});
        }
    Check c;
    c.name = "bc_divergent_alpha_grid";
    c.pass = ok;
    c.details["m"] = m;
    c.details["tail_limit"] = 0.05;
    c.details["rows"] = rows;
    return c;
}

}  // namespace awalk::verify
