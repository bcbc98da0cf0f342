#include "awalk/fourier.hpp"

#include "awalk/error.hpp"
#include "awalk/numeric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <queue>

namespace awalk::fourier {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Group {
    double value;
    std::uint64_t mult;
};

std::vector<Group> group_weights(const seq::SequenceSpec& spec, std::uint64_t n) {
    if (n < 1) throw DomainError("n must be >= 1");
    std::map<double, std::uint64_t> counts;
    for (double a : spec.step_weights(n)) ++counts[a];
    std::vector<Group> out;
    out.reserve(counts.size());
    for (const auto& [v, m] : counts) out.push_back({v, m});
    return out;
}

class Neumaier {
public:
    void add(double x) {
        const double t = sum_ + x;
        comp_ += std::fabs(sum_) >= std::fabs(x) ? (sum_ - t) + x : (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

LogValue product(const std::vector<Group>& groups, double t, bool absolute) {
    LogValue out;
    for (const auto& g : groups) {
        const double c = std::cos(t * g.value);
        if (c == 0.0) return {0, kNegInf};
        if (!absolute && c < 0.0 && (g.mult & 1U)) out.sign = -out.sign;
        out.log_magnitude += static_cast<double>(g.mult) * std::log(std::fabs(c));
    }
    return out;
}

// f(t) = factor * cos(t z) * prod cos(t a_k), or factor * prod |cos(t a_k)|.
struct Integrand {
    std::vector<Group> groups;
    double z = 0.0;
    bool absolute = false;
    double factor = 1.0;

    double operator()(double t) const {
        const LogValue p = product(groups, t, absolute);
        double v = factor * p.value();
        if (!absolute) v *= std::cos(t * z);
        return v;
    }

    // log of an upper bound for |f| on [a, b], a >= 0.
    double log_envelope(double a, double b, double stop_below) const {
        if (factor == 0.0) return kNegInf;
        double acc = std::log(std::fabs(factor));
        for (const auto& g : groups) {
            const double x0 = a * g.value;
            const double x1 = b * g.value;
            if (std::ceil(x0 / kPi) * kPi <= x1) continue;  // contains a multiple of pi
            const double m = std::max(std::fabs(std::cos(x0)), std::fabs(std::cos(x1)));
            if (m == 0.0) return kNegInf;
            acc += static_cast<double>(g.mult) * std::log(m);
            if (acc < stop_below) return acc;
        }
        return acc;
    }

    double frequency_span() const {
        double d = std::fabs(z);
        for (const auto& g : groups) d += g.value * static_cast<double>(g.mult);
        return d;
    }

    double sigma() const {
        double s = 0.0;
        for (const auto& g : groups) s += g.value * g.value * static_cast<double>(g.mult);
        return std::sqrt(s);
    }
};

// Nested Clenshaw-Curtis rules with 33 and 17 nodes on [-1, 1].
struct ClenshawCurtis {
    static constexpr int N = 32;
    std::array<double, N + 1> x{};
    std::array<double, N + 1> w32{};
    std::array<double, N / 2 + 1> w16{};

    static double weight(int n, int j) {
        double s = 0.0;
        for (int k = 1; k <= n / 2; ++k) {
            const double b = (2 * k == n) ? 1.0 : 2.0;
            s += b / (4.0 * k * k - 1.0) * std::cos(2.0 * kPi * k * j / n);
        }
        const double c = (j == 0 || j == n) ? 1.0 : 2.0;
        return c / n * (1.0 - s);
    }

    ClenshawCurtis() {
        for (int j = 0; j <= N; ++j) {
            x[j] = std::cos(kPi * j / N);
            w32[j] = weight(N, j);
        }
        for (int j = 0; j <= N / 2; ++j) w16[j] = weight(N / 2, j);
    }
};

const ClenshawCurtis& cc() {
    static const ClenshawCurtis rule;
    return rule;
}

struct Leaf {
    double a, b;
    double value;
    double error;
    bool envelope;
};

Leaf integrate_leaf(const Integrand& f, double a, double b) {
    const auto& r = cc();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::array<double, ClenshawCurtis::N + 1> fx;
    for (int j = 0; j <= ClenshawCurtis::N; ++j) fx[j] = f(mid + half * r.x[j]);
    double q32 = 0.0, q16 = 0.0;
    for (int j = 0; j <= ClenshawCurtis::N; ++j) q32 += r.w32[j] * fx[j];
    for (int j = 0; j <= ClenshawCurtis::N / 2; ++j) q16 += r.w16[j] * fx[2 * j];
    return {a, b, half * q32, std::fabs(half * (q32 - q16)), false};
}

constexpr std::uint64_t kLeafNodes = ClenshawCurtis::N + 1;

struct AdaptiveOutcome {
    double value;
    double error;
    std::uint64_t nodes;
    std::uint64_t panels;
    std::uint64_t envelope_panels;
    bool converged;
};

// Globally adaptive panel quadrature of f over [lo, hi] to absolute tolerance tol.
AdaptiveOutcome adaptive(const Integrand& f, double lo, double hi, double tol, std::uint64_t max_nodes) {
    const double length = hi - lo;
    const double span = std::max(f.frequency_span(), 1.0);
    const double sigma = std::max(f.sigma(), 1e-300);
    const double leaf_width = std::min({8.0 / span, 0.5 / sigma, length / 8.0});
    // Panels whose envelope density is below this are bounded, not integrated.
    const double log_skip = std::log(1e-3 * tol / length);

    std::vector<Leaf> leaves;
    std::uint64_t nodes = 0;
    std::uint64_t skipped = 0;
    double envelope_error = 0.0;

    // In-order bisection down to the leaf width, pruning by envelope.
    std::vector<std::pair<double, double>> stack{{lo, hi}};
    while (!stack.empty()) {
        auto [a, b] = stack.back();
        stack.pop_back();
        const double lb = f.log_envelope(a, b, log_skip);
        if (lb <= log_skip) {
            const double bound = lb == kNegInf ? 0.0 : std::exp(lb) * (b - a);
            envelope_error += bound;
            leaves.push_back({a, b, 0.0, bound, true});
            ++skipped;
            continue;
        }
        if (b - a > leaf_width) {
            const double m = 0.5 * (a + b);
            stack.push_back({m, b});
            stack.push_back({a, m});
            continue;
        }
        if (nodes + kLeafNodes > max_nodes) {
            return {0.0, std::numeric_limits<double>::infinity(), nodes, leaves.size(), skipped, false};
        }
        leaves.push_back(integrate_leaf(f, a, b));
        nodes += kLeafNodes;
    }

    auto by_error = [&](std::size_t i, std::size_t j) { return leaves[i].error < leaves[j].error; };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(by_error)> heap(by_error);
    double total_error = envelope_error;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        if (!leaves[i].envelope) {
            heap.push(i);
            total_error += leaves[i].error;
        }
    }

    bool converged = true;
    while (total_error > tol && !heap.empty()) {
        if (nodes + 2 * kLeafNodes > max_nodes) {
            converged = false;
            break;
        }
        const std::size_t i = heap.top();
        heap.pop();
        const Leaf parent = leaves[i];
        const double m = 0.5 * (parent.a + parent.b);
        leaves[i] = integrate_leaf(f, parent.a, m);
        leaves.push_back(integrate_leaf(f, m, parent.b));
        nodes += 2 * kLeafNodes;
        total_error += leaves[i].error + leaves.back().error - parent.error;
        heap.push(i);
        heap.push(leaves.size() - 1);
        // Periodically resum to keep cancellation out of the running total.
        if ((nodes / kLeafNodes) % 4096 == 0) {
            Neumaier e;
            for (const auto& l : leaves) e.add(l.error);
            total_error = e.value();
        }
    }

    std::sort(leaves.begin(), leaves.end(), [](const Leaf& x, const Leaf& y) { return x.a < y.a; });
    Neumaier value, error;
    for (const auto& l : leaves) {
        value.add(l.value);
        error.add(l.error);
    }
    return {value.value(), error.value(), nodes, leaves.size(), skipped, converged && error.value() <= tol};
}

// Trapezoid rule with M nodes over a full period of f, scaled to the period length.
double periodic_trapezoid(const Integrand& f, std::uint64_t m) {
    Neumaier s;
    const double h = 2.0 * kPi / static_cast<double>(m);
    for (std::uint64_t j = 0; j < m; ++j) s.add(f(h * static_cast<double>(j)));
    return s.value() * h;
}

std::uint64_t next_pow2_above(double d) {
    std::uint64_t m = 8;
    while (static_cast<double>(m) <= d) m <<= 1;
    return m;
}

bool integer_spec(const seq::SequenceSpec& spec) { return spec.is_integer_valued(); }

}  // namespace

std::string to_string(Scheme scheme) { return scheme == Scheme::adaptive_panel ? "adaptive-panel" : "fixed-grid"; }

Scheme parse_scheme(const std::string& text) {
    if (text == "adaptive-panel" || text == "adaptive") return Scheme::adaptive_panel;
    if (text == "fixed-grid" || text == "fixed") return Scheme::fixed_grid;
    throw DomainError("unknown quadrature scheme '" + text + "' (adaptive-panel | fixed-grid)");
}

double LogValue::value() const { return sign == 0 ? 0.0 : sign * std::exp(log_magnitude); }

LogValue cosine_product(const seq::SequenceSpec& spec, std::uint64_t n, double t, bool absolute) {
    return product(group_weights(spec, n), t, absolute);
}

QuadOptions abs_integral_defaults() {
    QuadOptions o;
    o.abs_tol = 0.0;
    o.rel_tol = 1e-9;
    return o;
}

QuadratureResult point_mass_fourier(const seq::SequenceSpec& spec, std::uint64_t n, std::int64_t z,
                                    const QuadOptions& options) {
    if (!integer_spec(spec))
        throw UnsupportedError("point_mass_fourier needs an integer-valued sequence, got '" + spec.canonical() + "'");
    Integrand f{group_weights(spec, n), static_cast<double>(z), false, 1.0};
    const std::int64_t radius = seq::prefix_sum(spec, n);

    QuadratureResult out;
    out.scheme = options.scheme;
    if (options.scheme == Scheme::fixed_grid) {
        // (1/2pi) int over a period; exact for M above the frequency span.
        const std::uint64_t m = next_pow2_above(f.frequency_span());
        if (3 * m > options.max_nodes)
            throw ToleranceError("fixed grid needs " + std::to_string(3 * m) + " nodes", 0.0,
                                 std::numeric_limits<double>::infinity());
        const double q1 = periodic_trapezoid(f, m) / (2.0 * kPi);
        const double q2 = periodic_trapezoid(f, 2 * m) / (2.0 * kPi);
        out.value = q2;
        out.abs_error_estimate = std::fabs(q2 - q1);
        out.nodes = 3 * m;
        out.lo = 0.0;
        out.hi = 2.0 * kPi;
        out.panels = 1;
        if (out.abs_error_estimate > options.abs_tol)
            throw ToleranceError("fixed grid missed tolerance", out.value, out.abs_error_estimate);
        return out;
    }

    // f(pi - t) = (-1)^(z + A_n) f(t): fold [pi/2, pi] onto [0, pi/2].
    const bool allowed = ((z - radius) % 2 + 2) % 2 == 0;
    f.factor = allowed ? 2.0 / kPi : 0.0;
    out.lo = 0.0;
    out.hi = kPi / 2.0;
    if (!allowed) {
        out.nodes = 1;
        out.panels = 1;
        out.envelope_panels = 1;
        return out;
    }
    const double tol = std::max(options.abs_tol, 0.0);
    const auto r = adaptive(f, 0.0, kPi / 2.0, tol > 0 ? tol : 1e-12, options.max_nodes);
    out.value = r.value;
    out.abs_error_estimate = r.error;
    out.nodes = std::max<std::uint64_t>(r.nodes, 1);
    out.panels = r.panels;
    out.envelope_panels = r.envelope_panels;
    if (!r.converged)
        throw ToleranceError("point mass quadrature did not reach tolerance within the node budget", r.value,
                             r.error);
    return out;
}

QuadratureResult abs_integral(const seq::SequenceSpec& spec, std::uint64_t n, const QuadOptions& options) {
    const bool integral_weights = integer_spec(spec);
    Integrand f{group_weights(spec, n), 0.0, true, 1.0};
    QuadratureResult out;
    out.scheme = options.scheme;

    if (options.scheme == Scheme::fixed_grid) {
        std::uint64_t m = next_pow2_above(16.0 * f.frequency_span());
        double prev = periodic_trapezoid(f, m / 2);
        std::uint64_t nodes = m / 2;
        while (true) {
            const double cur = periodic_trapezoid(f, m);
            nodes += m;
            const double err = std::fabs(cur - prev);
            const double tol = std::max(options.abs_tol, options.rel_tol * std::fabs(cur));
            out.value = cur;
            out.abs_error_estimate = err;
            out.nodes = nodes;
            out.lo = -kPi;
            out.hi = kPi;
            out.panels = 1;
            if (err <= tol) return out;
            if (nodes + 2 * m > options.max_nodes)
                throw ToleranceError("fixed grid missed tolerance", cur, err);
            prev = cur;
            m *= 2;
        }
    }

    // Integer weights: the integrand has period pi and is symmetric about pi/2.
    const double hi = integral_weights ? kPi / 2.0 : kPi;
    f.factor = integral_weights ? 4.0 : 2.0;
    out.lo = 0.0;
    out.hi = hi;

    double tol = options.abs_tol;
    if (options.rel_tol > 0.0) {
        // A rough value from the central peak fixes the absolute target.
        const double peak = std::min(hi, 4.0 / std::max(f.sigma(), 1e-300));
        const auto pilot = adaptive(f, 0.0, peak, 1e-3 * f.factor * peak, options.max_nodes);
        tol = std::max(tol, options.rel_tol * std::fabs(pilot.value));
    }
    if (!(tol > 0.0)) tol = 1e-12;
    const auto r = adaptive(f, 0.0, hi, tol, options.max_nodes);
    out.value = r.value;
    out.abs_error_estimate = r.error;
    out.nodes = std::max<std::uint64_t>(r.nodes, 1);
    out.panels = r.panels;
    out.envelope_panels = r.envelope_panels;
    if (!r.converged)
        throw ToleranceError("abs_integral did not reach tolerance within the node budget", r.value, r.error);
    return out;
}

double sullivan_target(double beta) { return std::sqrt(8.0 * kPi * (1.0 + 2.0 * beta)); }

SullivanReport sullivan_constant_estimate(double beta, const std::vector<std::uint64_t>& n_list,
                                          const QuadOptions& options) {
    if (n_list.empty()) throw DomainError("n list is empty");
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1]) throw DomainError("n list must be increasing");
    const auto spec = seq::SequenceSpec::power_floor(beta);

    SullivanReport report;
    report.beta = beta;
    report.target = sullivan_target(beta);
    for (auto n : n_list) {
        SullivanEntry e;
        e.n = n;
        double value = 0.0;
        try {
            e.integral = abs_integral(spec, n, options);
            value = e.integral->value;
        } catch (const ToleranceError& err) {
            e.error = err.what();
            value = err.best_value();
        }
        e.scaled = value * std::pow(static_cast<double>(n), beta + 0.5);
        report.entries.push_back(std::move(e));
    }
    const auto& last = report.entries.back();
    report.relative_gap = std::fabs(last.scaled - report.target) / report.target;
    report.monotone_approach = report.entries.size() >= 2;
    for (std::size_t i = 1; i < report.entries.size(); ++i)
        if (!(std::fabs(report.entries[i].scaled - report.target) <
              std::fabs(report.entries[i - 1].scaled - report.target)))
            report.monotone_approach = false;
    if (report.entries.size() >= 3) {
        const std::size_t k = report.entries.size();
        const double c1 = report.entries[k - 3].scaled;
        const double c2 = report.entries[k - 2].scaled;
        const double c3 = report.entries[k - 1].scaled;
        const double denom = (c3 - c2) - (c2 - c1);
        if (denom != 0.0 && std::isfinite(denom)) report.extrapolated = c3 - (c3 - c2) * (c3 - c2) / denom;
    }
    return report;
}

TransienceReport transience_report(const seq::SequenceSpec& spec, std::uint64_t n_max, std::int64_t z,
                                   const QuadOptions& options) {
    if (!integer_spec(spec))
        throw UnsupportedError("transience_report needs an integer-valued sequence, got '" + spec.canonical() + "'");
    if (n_max < 1) throw DomainError("n_max must be >= 1");
    TransienceReport report;
    report.z = z;
    Neumaier partial;
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        TransienceEntry e;
        e.n = n;
        try {
            const auto q = point_mass_fourier(spec, n, z, options);
            e.value = q.value;
            e.error = q.abs_error_estimate;
            e.nodes = q.nodes;
        } catch (const ToleranceError& err) {
            e.value = err.best_value();
            e.error = err.achieved_error();
            e.note = err.what();
        }
        e.parity_forbidden = ((z - seq::prefix_sum(spec, n)) % 2 + 2) % 2 != 0;
        partial.add(e.value);
        e.partial_sum = partial.value();
        report.entries.push_back(std::move(e));
    }

    if (auto pf = std::get_if<seq::SequenceSpec::PowerFloor>(&spec.variant())) {
        report.envelope_exponent = 0.5 + pf->beta;
    }

    // Log-log least squares on the last half, skipping forbidden and numerically zero points.
    std::vector<std::pair<double, double>> pts;
    for (const auto& e : report.entries) {
        if (e.n <= n_max / 2 || e.parity_forbidden) continue;
        if (!(e.value > 10.0 * e.error) || !(e.value > 0.0)) continue;
        pts.emplace_back(std::log(static_cast<double>(e.n)), std::log(e.value));
    }
    report.fit_points = pts.size();
    if (pts.size() < 8) {
        report.note = "fit needs at least 8 usable points in the last half, found " + std::to_string(pts.size());
        return report;
    }
    double mx = 0, my = 0;
    for (const auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxx = 0, sxy = 0;
    for (const auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    const double slope = sxy / sxx;
    report.fitted_exponent = slope;
    report.fitted_intercept = my - slope * mx;
    report.summable_trend = slope < -1.0;
    if (report.envelope_exponent == 0.0) report.envelope_exponent = -slope;
    double nu = 0.0;
    for (const auto& [x, y] : pts) nu = std::max(nu, std::exp(y + report.envelope_exponent * x));
    report.envelope_nu = nu;
    report.note = "heuristic diagnostic: finite-n regression, not a summability proof";
    return report;
}

}  // namespace awalk::fourier
