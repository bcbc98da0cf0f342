#include "awalk/montecarlo.hpp"

#include "awalk/error.hpp"
#include "awalk/exact.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <sstream>
#include <thread>

namespace awalk::mc {
namespace {

class BitSource {
public:
    explicit BitSource(const RngSpec& rng) : rng_(rng) {}

    bool next() {
        if (left_ == 0) {
            const auto b = random_block(rng_, block_++);
            lo_ = (static_cast<std::uint64_t>(b[1]) << 32) | b[0];
            hi_ = (static_cast<std::uint64_t>(b[3]) << 32) | b[2];
            left_ = 128;
        }
        const bool bit = lo_ & 1U;
        lo_ = (lo_ >> 1) | (hi_ << 63);
        hi_ >>= 1;
        --left_;
        return bit;
    }

private:
    RngSpec rng_;
    std::uint64_t block_ = 0;
    std::uint64_t lo_ = 0, hi_ = 0;
    int left_ = 0;
};

class VectorSource {
public:
    explicit VectorSource(const std::vector<int>& signs) : signs_(signs) {}
    bool next() { return signs_[pos_++] > 0; }

private:
    const std::vector<int>& signs_;
    std::size_t pos_ = 0;
};

struct IntAccumulator {
    std::int64_t s = 0;
    void add(std::int64_t x) { s += x; }
    double value() const { return static_cast<double>(s); }
};

struct RealAccumulator {
    double s = 0.0, c = 0.0;
    void add(double x) {
        const double t = s + x;
        c += std::fabs(s) >= std::fabs(x) ? (s - t) + x : (x - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

std::vector<double> growth_thresholds(const SimulationConfig& config, std::uint64_t horizon) {
    std::vector<double> thr;
    if (!config.growth_exponent) return thr;
    const std::uint64_t from = std::max<std::uint64_t>(config.growth_from, 1);
    if (from > horizon) return thr;
    thr.resize(horizon - from + 1);
    for (std::uint64_t n = from; n <= horizon; ++n)
        thr[n - from] = std::pow(static_cast<double>(n), *config.growth_exponent);
    return thr;
}

template <bool Integer, typename Source>
PathStats run_path(const Walk& walk, std::uint64_t horizon, Source& source, const SimulationConfig& config,
                   const std::vector<double>& thresholds) {
    using Acc = std::conditional_t<Integer, IntAccumulator, RealAccumulator>;
    const std::size_t nb = config.bands.size();
    PathStats st;
    st.horizon = horizon;
    st.band_hits.assign(nb, 0);
    st.last_band_hit.assign(nb, std::nullopt);
    if (config.growth_exponent) st.growth_held = true;

    const std::int64_t* iw = Integer ? walk.int_weights().data() : nullptr;
    const double* dw = Integer ? nullptr : walk.weights().data();
    const double* bands = config.bands.data();
    const double tol = config.zero_tolerance;
    const std::uint64_t growth_from = std::max<std::uint64_t>(config.growth_from, 1);
    bool growth_ok = config.growth_exponent.has_value() && !thresholds.empty();
    if (config.growth_exponent && thresholds.empty()) st.growth_held = true;  // empty window

    Acc acc;
    int last_sign = 0;
    double max_abs = 0.0;
    std::uint64_t last_zero = 0;
    std::vector<std::uint64_t> last_band(nb, 0);

    std::size_t next_cp = 0;
    std::uint64_t n = 0;
    while (n < horizon) {
        const std::uint64_t seg_end =
            next_cp < config.checkpoints.size() ? std::min(config.checkpoints[next_cp], horizon) : horizon;
        for (; n < seg_end; ++n) {
            const bool up = source.next();
            double abs_s;
            bool zero;
            if constexpr (Integer) {
                const std::int64_t w = iw[n];
                acc.add(up ? w : -w);
                const std::int64_t a = acc.s < 0 ? -acc.s : acc.s;
                abs_s = static_cast<double>(a);
                zero = a == 0;
            } else {
                const double w = dw[n];
                acc.add(up ? w : -w);
                abs_s = std::fabs(acc.value());
                zero = abs_s <= tol;
            }
            if (abs_s > max_abs) max_abs = abs_s;
            if (zero) {
                ++st.zero_hits;
                last_zero = n + 1;
            } else {
                const int sign = acc.value() > 0 ? 1 : -1;
                if (sign != last_sign) {
                    if (last_sign != 0) ++st.sign_changes;
                    last_sign = sign;
                }
            }
            for (std::size_t b = 0; b < nb; ++b) {
                if (abs_s <= bands[b]) {
                    ++st.band_hits[b];
                    last_band[b] = n + 1;
                }
            }
            if (growth_ok && n + 1 >= growth_from && !(abs_s > thresholds[n + 1 - growth_from])) growth_ok = false;
        }
        if (next_cp < config.checkpoints.size() && n == config.checkpoints[next_cp]) {
            st.snapshots.push_back({n, st.zero_hits, st.band_hits, st.sign_changes, max_abs});
            ++next_cp;
        }
    }
    st.max_abs = max_abs;
    st.final_value = acc.value();
    if (last_zero) st.last_zero_hit = last_zero;
    for (std::size_t b = 0; b < nb; ++b)
        if (last_band[b]) st.last_band_hit[b] = last_band[b];
    if (config.growth_exponent && !thresholds.empty()) st.growth_held = growth_ok;
    return st;
}

void validate_config(const SimulationConfig& config, std::uint64_t horizon) {
    for (std::size_t i = 0; i < config.checkpoints.size(); ++i) {
        if (config.checkpoints[i] < 1 || config.checkpoints[i] > horizon)
            throw DomainError("checkpoints must lie in [1, N]");
        if (i > 0 && config.checkpoints[i] <= config.checkpoints[i - 1])
            throw DomainError("checkpoints must be increasing");
    }
    for (double c : config.bands)
        if (!(c >= 0.0)) throw DomainError("band half-widths must be >= 0");
    if (!(config.zero_tolerance >= 0.0)) throw DomainError("zero tolerance must be >= 0");
}

template <typename Source>
PathStats dispatch(const Walk& walk, std::uint64_t horizon, Source& source, const SimulationConfig& config,
                   const std::vector<double>& thresholds) {
    return walk.integer_valued() ? run_path<true>(walk, horizon, source, config, thresholds)
                                 : run_path<false>(walk, horizon, source, config, thresholds);
}

double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    // Type-7 linear interpolation.
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<std::uint64_t> default_checkpoints(std::uint64_t horizon, const std::vector<std::uint64_t>& given) {
    if (!given.empty()) return given;
    std::vector<std::uint64_t> cps;
    for (std::uint64_t c : {horizon / 100, horizon / 10, horizon})
        if (c >= 1 && (cps.empty() || c > cps.back())) cps.push_back(c);
    return cps;
}

std::string band_label(double c) { return "C=" + format_double(c); }

nlohmann::ordered_json aggregate_json(const Aggregate& a) {
    nlohmann::ordered_json j;
    j["mean"] = a.mean;
    j["std_error"] = a.std_error;
    j["fraction_positive"] = a.fraction_positive;
    j["quantiles"] = {{"q05", a.quantiles[0]}, {"q25", a.quantiles[1]}, {"q50", a.quantiles[2]},
                      {"q75", a.quantiles[3]}, {"q95", a.quantiles[4]}};
    return j;
}

nlohmann::ordered_json interval_json(const Interval& i) {
    return {{"estimate", i.estimate}, {"lo95", i.lo}, {"hi95", i.hi}, {"resamples", i.resamples}};
}

ExperimentReport base_report(const std::string& name, const Walk& walk, std::uint64_t paths, std::uint64_t seed,
                             const SimulationConfig& config, const std::vector<PathStats>& stats) {
    ExperimentReport r;
    r.experiment = name;
    r.spec = walk.spec().canonical();
    r.horizon = walk.horizon();
    r.paths = paths;
    r.seed = seed;
    r.bands = config.bands;
    r.checkpoints = config.checkpoints;
    for (std::size_t c = 0; c < config.checkpoints.size(); ++c) {
        CheckpointAggregate ca;
        ca.n = config.checkpoints[c];
        std::vector<double> zero, signs, maxes;
        std::vector<std::vector<double>> bands(config.bands.size());
        for (const auto& s : stats) {
            const auto& snap = s.snapshots[c];
            zero.push_back(static_cast<double>(snap.zero_hits));
            signs.push_back(static_cast<double>(snap.sign_changes));
            maxes.push_back(snap.max_abs);
            for (std::size_t b = 0; b < bands.size(); ++b) bands[b].push_back(static_cast<double>(snap.band_hits[b]));
        }
        ca.zero_hits = aggregate(zero);
        ca.sign_changes = aggregate(signs);
        ca.max_abs = aggregate(maxes);
        for (auto& b : bands) ca.band_hits.push_back(aggregate(b));
        r.snapshots.push_back(std::move(ca));
    }
    return r;
}

void validate_experiment(std::uint64_t horizon, std::uint64_t paths) {
    if (horizon < 1) throw DomainError("horizon N must be >= 1");
    if (paths < 1) throw DomainError("path count P must be >= 1");
}

unsigned resolve_threads(const ExperimentOptions& o) { return o.threads ? o.threads : worker_count(); }

}  // namespace

// ------------------------------------------------------------------ Walk

Walk::Walk(const seq::SequenceSpec& spec, std::uint64_t horizon) : spec_(spec), horizon_(horizon) {
    if (horizon < 1) throw DomainError("horizon N must be >= 1");
    if (spec.is_integer_valued())
        int_weights_ = spec.integer_step_weights(horizon);
    else
        weights_ = spec.step_weights(horizon);
}

// -------------------------------------------------------------- simulate

PathStats simulate(const Walk& walk, const RngSpec& rng, const SimulationConfig& config) {
    validate_config(config, walk.horizon());
    BitSource source(rng);
    return dispatch(walk, walk.horizon(), source, config, growth_thresholds(config, walk.horizon()));
}

PathStats simulate(const seq::SequenceSpec& spec, std::uint64_t horizon, const RngSpec& rng,
                   const std::vector<double>& bands) {
    SimulationConfig config;
    config.bands = bands;
    return simulate(Walk(spec, horizon), rng, config);
}

PathStats simulate_signs(const seq::SequenceSpec& spec, const std::vector<int>& signs,
                         const SimulationConfig& config) {
    if (signs.empty()) throw DomainError("sign vector is empty");
    for (int s : signs)
        if (s != 1 && s != -1) throw DomainError("signs must be +1 or -1");
    const Walk walk(spec, signs.size());
    validate_config(config, walk.horizon());
    VectorSource source(signs);
    return dispatch(walk, walk.horizon(), source, config, growth_thresholds(config, walk.horizon()));
}

unsigned worker_count() {
    if (const char* env = std::getenv("AWALK_THREADS")) {
        try {
            const auto v = parse_int(env);
            if (v >= 1) return static_cast<unsigned>(std::min<std::int64_t>(v, 1024));
        } catch (const DomainError&) {
        }
        throw DomainError(std::string("AWALK_THREADS must be a positive integer, got '") + env + "'");
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

std::vector<PathStats> run_paths(const Walk& walk, std::uint64_t paths, std::uint64_t seed,
                                 const SimulationConfig& config, unsigned threads) {
    validate_config(config, walk.horizon());
    const auto thresholds = growth_thresholds(config, walk.horizon());
    std::vector<PathStats> out(paths);
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::uint64_t p = next.fetch_add(1);
            if (p >= paths) return;
            BitSource source(RngSpec{seed, p});
            out[p] = dispatch(walk, walk.horizon(), source, config, thresholds);
        }
    };
    threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::uint64_t>(paths, 1024))));
    if (threads == 1) {
        worker();
        return out;
    }
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    pool.clear();
    return out;
}

// ------------------------------------------------------------ statistics

Aggregate aggregate(const std::vector<double>& values) {
    Aggregate a;
    if (values.empty()) {
        a.quantiles.assign(5, 0.0);
        return a;
    }
    const double n = static_cast<double>(values.size());
    double sum = 0.0, positive = 0.0;
    for (double v : values) {
        sum += v;
        positive += v > 0.0;
    }
    a.mean = sum / n;
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    a.std_error = values.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    a.fraction_positive = positive / n;
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    for (double q : {0.05, 0.25, 0.5, 0.75, 0.95}) a.quantiles.push_back(quantile(sorted, q));
    return a;
}

namespace {

template <typename Stat>
Interval bootstrap(std::size_t size, std::uint64_t resamples, std::uint64_t seed, Stat&& stat) {
    if (size == 0) throw DomainError("bootstrap needs at least one observation");
    std::vector<std::size_t> all(size);
    for (std::size_t i = 0; i < size; ++i) all[i] = i;
    Interval out;
    out.estimate = stat(all);
    out.resamples = resamples;
    if (resamples == 0) {
        out.lo = out.hi = out.estimate;
        return out;
    }
    // A dedicated stream far from the path streams.
    RandomStream rng(RngSpec{seed, 0xB007'5742'0000'0000ULL});
    std::vector<double> draws;
    draws.reserve(resamples);
    std::vector<std::size_t> idx(size);
    for (std::uint64_t r = 0; r < resamples; ++r) {
        for (auto& i : idx) i = static_cast<std::size_t>(rng.below(size));
        draws.push_back(stat(idx));
    }
    std::sort(draws.begin(), draws.end());
    out.lo = quantile(draws, 0.025);
    out.hi = quantile(draws, 0.975);
    return out;
}

}  // namespace

Interval bootstrap_ratio(const std::vector<double>& before, const std::vector<double>& after,
                         std::uint64_t resamples, std::uint64_t seed) {
    if (before.size() != after.size()) throw DomainError("bootstrap samples differ in size");
    return bootstrap(before.size(), resamples, seed, [&](const std::vector<std::size_t>& idx) {
        double b = 0.0, a = 0.0;
        for (auto i : idx) {
            b += before[i];
            a += after[i];
        }
        if (b == 0.0) return a == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
        return a / b;
    });
}

Interval bootstrap_difference(const std::vector<double>& before, const std::vector<double>& after,
                              std::uint64_t resamples, std::uint64_t seed) {
    if (before.size() != after.size()) throw DomainError("bootstrap samples differ in size");
    return bootstrap(before.size(), resamples, seed, [&](const std::vector<std::size_t>& idx) {
        double d = 0.0;
        for (auto i : idx) d += after[i] - before[i];
        return d / static_cast<double>(idx.size());
    });
}

// ------------------------------------------------------------ experiments

ExperimentReport recurrence_experiment(const seq::SequenceSpec& spec, std::uint64_t horizon,
                                       const std::vector<double>& bands, std::uint64_t paths, std::uint64_t seed,
                                       const ExperimentOptions& options) {
    validate_experiment(horizon, paths);
    const Walk walk(spec, horizon);
    SimulationConfig config;
    config.bands = bands;
    config.checkpoints = default_checkpoints(horizon, options.checkpoints);
    config.zero_tolerance = options.zero_tolerance;
    const auto stats = run_paths(walk, paths, seed, config, resolve_threads(options));

    auto report = base_report("recurrence", walk, paths, seed, config, stats);
    const std::uint64_t decade = std::max<std::uint64_t>(1, (horizon + 9) / 10);
    const std::size_t first = 0, last = config.checkpoints.size() - 1;

    auto summarize = [&](const std::string& label, auto hits_at, auto last_hit) {
        BandSummary s;
        s.label = label;
        double any = 0, late = 0;
        std::vector<double> before, after;
        for (const auto& p : stats) {
            const auto lh = last_hit(p);
            any += lh.has_value();
            late += lh.has_value() && *lh >= decade;
            before.push_back(static_cast<double>(hits_at(p.snapshots[first])));
            after.push_back(static_cast<double>(hits_at(p.snapshots[last])));
        }
        s.any_hit_fraction = any / static_cast<double>(paths);
        s.final_decade_fraction = late / static_cast<double>(paths);
        if (last > first) {
            s.growth_ratio = bootstrap_ratio(before, after, options.bootstrap_resamples, seed);
            s.growth_difference = bootstrap_difference(before, after, options.bootstrap_resamples, seed);
        }
        report.band_summaries.push_back(std::move(s));
    };
    summarize("zero", [](const Snapshot& s) { return s.zero_hits; },
              [](const PathStats& p) { return p.last_zero_hit; });
    for (std::size_t b = 0; b < bands.size(); ++b)
        summarize(band_label(bands[b]), [b](const Snapshot& s) { return s.band_hits[b]; },
                  [b](const PathStats& p) { return p.last_band_hit[b]; });
    report.notes.push_back("finite-horizon proxy; no almost-sure statement is established by simulation");
    report.notes.push_back("final_decade_fraction counts paths whose last hit is at n >= ceil(N/10) = " +
                           std::to_string(decade));
    return report;
}

ExperimentReport sign_change_experiment(const seq::SequenceSpec& spec, std::uint64_t horizon, std::uint64_t paths,
                                        std::uint64_t seed, const ExperimentOptions& options) {
    validate_experiment(horizon, paths);
    if (!spec.is_non_decreasing())
        throw DomainError("sign_change_experiment needs a non-decreasing sequence, got '" + spec.canonical() + "'");
    const Walk walk(spec, horizon);
    SimulationConfig config;
    config.checkpoints = default_checkpoints(horizon, options.checkpoints);
    config.zero_tolerance = options.zero_tolerance;
    const auto stats = run_paths(walk, paths, seed, config, resolve_threads(options));

    auto report = base_report("signs", walk, paths, seed, config, stats);
    for (std::size_t c = 0; c < config.checkpoints.size(); ++c) {
        std::vector<double> cdf(20, 0.0);
        for (const auto& p : stats)
            for (std::uint64_t k = 1; k <= 20; ++k)
                if (p.snapshots[c].sign_changes >= k) cdf[k - 1] += 1.0;
        for (auto& v : cdf) v /= static_cast<double>(paths);
        report.sign_change_cdf.push_back(std::move(cdf));
    }
    report.notes.push_back("finite-horizon proxy for infinitely many sign changes");
    return report;
}

ExperimentReport growth_experiment(const seq::SequenceSpec& spec, std::uint64_t horizon, double delta,
                                   std::uint64_t paths, std::uint64_t seed, const ExperimentOptions& options) {
    validate_experiment(horizon, paths);
    const auto* pf = std::get_if<seq::SequenceSpec::PowerFloor>(&spec.variant());
    if (!pf) throw UnsupportedError("growth_experiment needs a powfloor sequence, got '" + spec.canonical() + "'");
    const double beta = pf->beta;
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("growth_experiment needs beta in (0,1)");
    if (!(delta > 0.0 && delta < beta / 2.0)) throw DomainError("growth_experiment needs delta in (0, beta/2)");

    const Walk walk(spec, horizon);
    SimulationConfig config;
    config.checkpoints = default_checkpoints(horizon, options.checkpoints);
    config.zero_tolerance = options.zero_tolerance;
    config.growth_exponent = beta / 2.0 - delta;
    config.growth_from = std::max<std::uint64_t>(1, (horizon + 9) / 10);
    const auto stats = run_paths(walk, paths, seed, config, resolve_threads(options));

    auto report = base_report("growth", walk, paths, seed, config, stats);
    double held = 0;
    for (const auto& p : stats) held += p.growth_held.value_or(false);
    report.growth_fraction = held / static_cast<double>(paths);
    report.growth_exponent = *config.growth_exponent;
    report.growth_from = config.growth_from;
    report.extra["delta"] = delta;
    report.extra["beta"] = beta;
    report.notes.push_back("finite-horizon proxy: strict inequality |S(n)| > n^(beta/2-delta) on [ceil(N/10), N]");
    return report;
}

// ------------------------------------------------------------ Tomaszewski

TomaszewskiReport tomaszewski_check(const seq::SequenceSpec& spec, std::uint64_t n, TomaszewskiMode mode,
                                    std::uint64_t paths, std::uint64_t seed) {
    if (n < 1) throw DomainError("n must be >= 1");
    TomaszewskiReport r;
    r.mode = mode;
    r.n = n;
    if (mode == TomaszewskiMode::exact) {
        if (spec.is_integer_valued()) {
            const auto w = spec.integer_step_weights(n);
            BigInt sum_sq = 0;
            for (auto a : w) sum_sq += BigInt(a) * a;
            r.threshold = std::sqrt(static_cast<double>(sum_sq));
            const auto dist = exact::distribution_of_weights(w);
            BigInt inside = 0;
            for (std::size_t i = 0; i < dist.counts.size(); ++i) {
                const BigInt z = dist.offset + 2 * static_cast<std::int64_t>(i);
                if (z * z <= sum_sq) inside += dist.counts[i];
            }
            r.exact_probability = Rational(inside, dist.total());
            r.probability = to_double(*r.exact_probability);
            r.pass = *r.exact_probability >= Rational(1, 2);
            return r;
        }
        if (n > 24) throw DomainError("exact Tomaszewski check of a real sequence enumerates 2^n; n must be <= 24");
        const auto w = spec.step_weights(n);
        long double sum_sq = 0.0L;
        for (double a : w) sum_sq += static_cast<long double>(a) * a;
        r.threshold = static_cast<double>(std::sqrt(sum_sq));
        std::uint64_t inside = 0;
        for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
            long double s = 0.0L;
            for (std::uint64_t i = 0; i < n; ++i) s += ((mask >> i) & 1U) ? w[i] : -w[i];
            if (s * s <= sum_sq) ++inside;
        }
        r.exact_probability = Rational(BigInt(inside), pow2(n));
        r.probability = to_double(*r.exact_probability);
        r.pass = *r.exact_probability >= Rational(1, 2);
        return r;
    }
    if (paths < 1) throw DomainError("Monte Carlo Tomaszewski check needs paths >= 1");
    const Walk walk(spec, n);
    r.threshold = std::sqrt(seq::prefix_sum_squares(spec, n));
    const auto stats = run_paths(walk, paths, seed, SimulationConfig{});
    double inside = 0;
    for (const auto& p : stats) inside += std::fabs(p.final_value) <= r.threshold;
    r.probability = inside / static_cast<double>(paths);
    r.std_error = std::sqrt(r.probability * (1.0 - r.probability) / static_cast<double>(paths));
    r.pass = r.probability >= 0.5;
    return r;
}

// -------------------------------------------------------- bound recursion

BcSequence BcSequence::from_function(std::string name, Fn fn) {
    BcSequence s;
    s.name_ = std::move(name);
    s.fn_ = std::move(fn);
    return s;
}

BcSequence BcSequence::parse(const std::string& text) {
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const bool has_arg = colon != std::string::npos;
    const auto arg = [&] {
        if (!has_arg) throw DomainError("sequence '" + head + "' needs a parameter");
        return parse_double(text.substr(colon + 1));
    };
    if (head == "zero" && !has_arg) return from_function("zero", [](std::uint64_t) { return 0.0; });
    if (head == "inv" && !has_arg)
        return from_function("inv", [](std::uint64_t m) { return 1.0 / static_cast<double>(m); });
    if (head == "const") {
        const double x = arg();
        return from_function("const:" + format_double(x), [x](std::uint64_t) { return x; });
    }
    if (head == "pow") {
        const double p = arg();
        return from_function("pow:" + format_double(p),
                             [p](std::uint64_t m) { return std::pow(static_cast<double>(m), -p); });
    }
    if (head == "geom") {
        const double r = arg();
        return from_function("geom:" + format_double(r),
                             [r](std::uint64_t m) { return std::pow(r, static_cast<double>(m)); });
    }
    throw DomainError("unknown bound sequence '" + text + "'; expected const:<x> | inv | pow:<p> | geom:<r> | zero");
}

BcReport bc_bound_propagation(const BcSequence& alpha, const BcSequence& eps, std::uint64_t ell, std::uint64_t m) {
    if (ell < 1) throw DomainError("ell must be >= 1");
    if (m < ell) throw DomainError("m must be >= ell");
    BcReport r;
    r.ell = ell;
    r.m = m;
    r.trajectory.reserve(m - ell + 1);
    double b = 1.0;
    r.trajectory.push_back(b);
    for (std::uint64_t j = ell + 1; j <= m; ++j) {
        const double a = alpha(j);
        const double e = eps(j - 1);
        if (!(a >= 0.0 && a <= 1.0)) throw DomainError("alpha_" + std::to_string(j) + " = " + format_double(a) + " lies outside [0,1]");
        if (!(e >= 0.0)) throw DomainError("eps_" + std::to_string(j - 1) + " must be >= 0");
        b = std::min(1.0, (1.0 - a) * b + e);
        r.trajectory.push_back(b);
    }
    r.bound = b;
    return r;
}

// ------------------------------------------------------------ serialization

nlohmann::ordered_json to_json(const ExperimentReport& r) {
    nlohmann::ordered_json j;
    j["schema"] = "awalk-report/1";
    j["experiment"] = r.experiment;
    j["spec"] = r.spec;
    j["horizon"] = r.horizon;
    j["paths"] = r.paths;
    j["seed"] = r.seed;
    j["bands"] = r.bands;
    j["checkpoints"] = r.checkpoints;
    auto& snaps = j["snapshots"] = nlohmann::ordered_json::array();
    for (const auto& s : r.snapshots) {
        nlohmann::ordered_json e;
        e["n"] = s.n;
        e["zero_hits"] = aggregate_json(s.zero_hits);
        auto& bh = e["band_hits"] = nlohmann::ordered_json::array();
        for (std::size_t b = 0; b < s.band_hits.size(); ++b) {
            auto a = aggregate_json(s.band_hits[b]);
            a["C"] = r.bands[b];
            bh.push_back(std::move(a));
        }
        e["sign_changes"] = aggregate_json(s.sign_changes);
        e["max_abs"] = aggregate_json(s.max_abs);
        snaps.push_back(std::move(e));
    }
    if (!r.band_summaries.empty()) {
        auto& bs = j["hit_summaries"] = nlohmann::ordered_json::array();
        for (const auto& s : r.band_summaries) {
            nlohmann::ordered_json e;
            e["target"] = s.label;
            e["any_hit_fraction"] = s.any_hit_fraction;
            e["final_decade_fraction"] = s.final_decade_fraction;
            if (s.growth_ratio) e["growth_ratio"] = interval_json(*s.growth_ratio);
            if (s.growth_difference) e["growth_difference"] = interval_json(*s.growth_difference);
            bs.push_back(std::move(e));
        }
    }
    if (!r.sign_change_cdf.empty()) {
        auto& sc = j["sign_change_cdf"] = nlohmann::ordered_json::array();
        for (std::size_t c = 0; c < r.sign_change_cdf.size(); ++c)
            sc.push_back({{"n", r.checkpoints[c]}, {"fraction_at_least_k", r.sign_change_cdf[c]}});
    }
    if (r.growth_fraction) {
        j["growth"] = {{"exponent", *r.growth_exponent},
                       {"window_from", r.growth_from},
                       {"window_to", r.horizon},
                       {"fraction", *r.growth_fraction}};
    }
    if (!r.extra.is_null()) j["parameters"] = r.extra;
    j["notes"] = r.notes;
    return j;
}

std::string to_csv(const ExperimentReport& r) {
    std::ostringstream out;
    out << "checkpoint,statistic,mean,std_error,fraction_positive,q05,q25,q50,q75,q95\n";
    auto row = [&](std::uint64_t n, const std::string& name, const Aggregate& a) {
        out << n << ',' << name << ',' << format_double(a.mean) << ',' << format_double(a.std_error) << ','
            << format_double(a.fraction_positive);
        for (double q : a.quantiles) out << ',' << format_double(q);
        out << '\n';
    };
    for (const auto& s : r.snapshots) {
        row(s.n, "zero_hits", s.zero_hits);
        for (std::size_t b = 0; b < s.band_hits.size(); ++b) row(s.n, "band_hits_" + band_label(r.bands[b]), s.band_hits[b]);
        row(s.n, "sign_changes", s.sign_changes);
        row(s.n, "max_abs", s.max_abs);
    }
    return out.str();
}

}  // namespace awalk::mc
