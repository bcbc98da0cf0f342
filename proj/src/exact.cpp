#include "awalk/exact.hpp"

#include "awalk/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <iterator>
#include <ostream>

namespace awalk::exact {
namespace {

void check_weights(std::span<const std::int64_t> weights) {
    for (auto a : weights)
        if (a < 0) throw DomainError("weights must be non-negative");
}

std::int64_t checked_radius(std::span<const std::int64_t> weights) {
    std::int64_t radius = 0;
    for (auto a : weights) {
        if (a > std::numeric_limits<std::int64_t>::max() - radius)
            throw ResourceError("support radius overflows 64 bits", std::numeric_limits<std::uint64_t>::max());
        radius += a;
    }
    return radius;
}

// One convolution step on the parity-compressed lattice: adding weight a maps
// index i to i (sign -) and i + a (sign +).
template <typename Count>
void convolve_step(std::vector<Count>& counts, std::int64_t a) {
    const std::size_t shift = static_cast<std::size_t>(a);
    if (shift == 0) {
        for (auto& c : counts) c += c;
        return;
    }
    const std::size_t old_size = counts.size();
    counts.resize(old_size + shift);
    for (std::size_t i = counts.size(); i-- > shift;) counts[i] += counts[i - shift];
}

std::vector<std::int64_t> band_indices(std::int64_t offset, std::size_t size, std::int64_t band) {
    std::vector<std::int64_t> out;
    if (band < 0) return out;
    // z = offset + 2i with |z| <= band
    const std::int64_t d = -band - offset;
    const std::int64_t lo = d <= 0 ? 0 : (d + 1) / 2;
    for (std::int64_t i = lo; i < static_cast<std::int64_t>(size); ++i) {
        const std::int64_t z = offset + 2 * i;
        if (z > band) break;
        if (z >= -band) out.push_back(i);
    }
    return out;
}

void write_u64(std::ostream& out, std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t read_u64(std::istream& in, int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
        const int c = in.get();
        if (c == std::char_traits<char>::eof()) throw DomainError("truncated AWLD stream");
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
    }
    return v;
}

}  // namespace

// -------------------------------------------------------------- LatticeDist

BigInt LatticeDist::count(std::int64_t z) const {
    const std::int64_t d = z - offset;
    if (d < 0 || d % stride != 0) return 0;
    const auto i = static_cast<std::size_t>(d / stride);
    return i < counts.size() ? counts[i] : BigInt(0);
}

Rational LatticeDist::probability(std::int64_t z) const { return Rational(count(z), total()); }

BigInt LatticeDist::band_count(std::int64_t c) const {
    BigInt acc = 0;
    for (auto i : band_indices(offset, counts.size(), c)) acc += counts[static_cast<std::size_t>(i)];
    return acc;
}

// ------------------------------------------------------------- distribution

std::uint64_t distribution_bytes(std::uint64_t n, std::int64_t radius) {
    const std::uint64_t entries = static_cast<std::uint64_t>(radius) + 1;
    return entries * (sizeof(BigInt) + n / 8 + 16);
}

std::vector<std::uint64_t> counts_u64(std::span<const std::int64_t> weights) {
    if (weights.size() > 63) throw DomainError("64-bit counts need at most 63 steps");
    check_weights(weights);
    std::vector<std::uint64_t> counts{1};
    for (auto a : weights) convolve_step(counts, a);
    return counts;
}

LatticeDist distribution_of_weights(std::span<const std::int64_t> weights, const DistributionOptions& options) {
    check_weights(weights);
    const std::int64_t radius = checked_radius(weights);
    const std::uint64_t bytes = distribution_bytes(weights.size(), radius);
    if (bytes > options.memory_budget_bytes)
        throw ResourceError("distribution needs " + std::to_string(bytes) + " bytes, budget is " +
                                std::to_string(options.memory_budget_bytes),
                            bytes);
    LatticeDist dist;
    dist.n = weights.size();
    dist.offset = -radius;
    dist.counts.reserve(static_cast<std::size_t>(radius) + 1);
    dist.counts.emplace_back(1);
    for (auto a : weights) convolve_step(dist.counts, a);
    return dist;
}

LatticeDist distribution(const seq::SequenceSpec& spec, std::uint64_t n, const DistributionOptions& options) {
    if (n < 1) throw DomainError("distribution needs n >= 1");
    const auto weights = spec.integer_step_weights(n);
    return distribution_of_weights(weights, options);
}

BigInt signed_count(const seq::SequenceSpec& spec, std::uint64_t n, std::int64_t target,
                    const DistributionOptions& options) {
    return distribution(spec, n, options).count(target);
}

// ------------------------------------------------------------ hit / visits

std::string to_string(PrecisionMode mode) {
    return mode == PrecisionMode::exact ? "exact" : "high_precision";
}

namespace {

struct Window {
    std::vector<std::int64_t> weights;
    std::int64_t radius = 0;
};

Window prepare(const seq::SequenceSpec& spec, std::uint64_t horizon, std::int64_t band, const HitOptions& options) {
    if (horizon < 1) throw DomainError("horizon must be >= 1");
    if (band < 0) throw DomainError("band C must be >= 0");
    Window w;
    w.weights = spec.integer_step_weights(horizon);
    w.radius = checked_radius(w.weights);
    const std::uint64_t bytes = distribution_bytes(horizon, w.radius);
    if (bytes > options.memory_budget_bytes)
        throw ResourceError("hit computation needs " + std::to_string(bytes) + " bytes", bytes);
    return w;
}

// Runs the forward recursion; `on_step(n, counts, offset)` may read or modify counts.
template <typename Count, typename Fn>
void forward(const Window& w, Fn&& on_step) {
    std::vector<Count> counts;
    counts.reserve(static_cast<std::size_t>(w.radius) + 1);
    counts.emplace_back(1);
    std::int64_t offset = 0;
    std::uint64_t n = 0;
    for (auto a : w.weights) {
        convolve_step(counts, a);
        offset -= a;
        ++n;
        on_step(n, counts, offset);
    }
}

template <typename Count>
void halve(std::vector<Count>& counts) {
    for (auto& c : counts) c /= 2;
}

}  // namespace

HitProbability zero_hit_probability(const seq::SequenceSpec& spec, std::uint64_t horizon, std::int64_t band,
                                    const HitOptions& options) {
    const Window w = prepare(spec, horizon, band, options);
    HitProbability out;
    if (horizon <= options.exact_bit_budget) {
        out.mode = PrecisionMode::exact;
        BigInt numerator = 0;  // sum of h_n 2^(n_cur - n) over 2^n_cur
        forward<BigInt>(w, [&](std::uint64_t, std::vector<BigInt>& counts, std::int64_t offset) {
            numerator <<= 1;
            for (auto i : band_indices(offset, counts.size(), band)) {
                auto& c = counts[static_cast<std::size_t>(i)];
                numerator += c;
                c = 0;
            }
        });
        out.exact = Rational(numerator, pow2(horizon));
        out.value = HpFloat(numerator) / HpFloat(pow2(horizon));
    } else {
        out.mode = PrecisionMode::high_precision;
        HpFloat acc = 0;
        forward<HpFloat>(w, [&](std::uint64_t, std::vector<HpFloat>& probs, std::int64_t offset) {
            halve(probs);
            for (auto i : band_indices(offset, probs.size(), band)) {
                auto& p = probs[static_cast<std::size_t>(i)];
                acc += p;
                p = 0;
            }
        });
        out.value = acc;
    }
    return out;
}

VisitSeries expected_visits(const seq::SequenceSpec& spec, std::uint64_t horizon, std::int64_t band,
                            const HitOptions& options) {
    const Window w = prepare(spec, horizon, band, options);
    VisitSeries out;
    out.series.reserve(horizon);
    if (horizon <= options.exact_bit_budget) {
        out.mode = PrecisionMode::exact;
        Rational total = 0;
        forward<BigInt>(w, [&](std::uint64_t n, std::vector<BigInt>& counts, std::int64_t offset) {
            BigInt hits = 0;
            for (auto i : band_indices(offset, counts.size(), band)) hits += counts[static_cast<std::size_t>(i)];
            Rational p(hits, pow2(n));
            total += p;
            out.series.push_back(HpFloat(hits) / HpFloat(pow2(n)));
            out.exact_series.push_back(std::move(p));
        });
        out.total = HpFloat(numerator(total)) / HpFloat(denominator(total));
        out.exact_total = std::move(total);
    } else {
        out.mode = PrecisionMode::high_precision;
        HpFloat total = 0;
        forward<HpFloat>(w, [&](std::uint64_t, std::vector<HpFloat>& probs, std::int64_t offset) {
            halve(probs);
            HpFloat p = 0;
            for (auto i : band_indices(offset, probs.size(), band)) p += probs[static_cast<std::size_t>(i)];
            total += p;
            out.series.push_back(p);
        });
        out.total = total;
    }
    return out;
}

HitReport hit_report(const seq::SequenceSpec& spec, std::uint64_t horizon, std::int64_t band,
                     const HitOptions& options) {
    HitReport report;
    report.horizon = horizon;
    report.band = band;
    report.hit = zero_hit_probability(spec, horizon, band, options);
    report.visits = expected_visits(spec, horizon, band, options);
    return report;
}

// ------------------------------------------------------- simple-walk oracles

BigInt binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    BigInt r = 1;
    for (std::uint64_t i = 0; i < k; ++i) {
        r *= n - i;
        r /= i + 1;
    }
    return r;
}

Rational srw_point(std::uint64_t m, std::int64_t z) {
    const std::uint64_t az = static_cast<std::uint64_t>(z < 0 ? -z : z);
    if (az > m || (m + az) % 2 != 0) return 0;
    return Rational(binomial(m, (m + az) / 2), pow2(m));
}

Rational srw_mod(std::uint64_t m, std::uint64_t k, std::int64_t u) {
    if (k == 0) throw DomainError("srw_mod needs k >= 1");
    const auto kk = static_cast<std::int64_t>(k);
    const std::int64_t target = ((u % kk) + kk) % kk;
    BigInt c = 1;  // C(m, w)
    BigInt acc = 0;
    for (std::uint64_t w = 0; w <= m; ++w) {
        const std::int64_t z = 2 * static_cast<std::int64_t>(w) - static_cast<std::int64_t>(m);
        if (((z % kk) + kk) % kk == target) acc += c;
        c *= m - w;
        c /= w + 1;
    }
    return Rational(acc, pow2(m));
}

Rational two_scale_point(std::uint64_t k, std::uint64_t n, std::int64_t j) {
    if (k < 2 || k % 2 != 0) throw DomainError("two_scale_point needs an even k >= 2");
    if (n < 1) throw DomainError("two_scale_point needs n >= 1");
    std::vector<BigInt> row(n + 1);
    row[0] = 1;
    for (std::uint64_t w = 0; w < n; ++w) row[w + 1] = row[w] * (n - w) / (w + 1);
    const auto kk = static_cast<std::int64_t>(k);
    const auto nn = static_cast<std::int64_t>(n);
    BigInt acc = 0;
    for (std::int64_t a = 0; a <= nn; ++a) {
        const std::int64_t x = 2 * a - nn;
        const std::int64_t rem = j - (kk - 1) * x;
        if (rem % kk != 0) continue;
        const std::int64_t y = rem / kk;
        if (y < -nn || y > nn || (y + nn) % 2 != 0) continue;
        acc += row[static_cast<std::size_t>(a)] * row[static_cast<std::size_t>((y + nn) / 2)];
    }
    return Rational(acc, pow2(2 * n));
}

// ------------------------------------------------------------- dominance

namespace {

// alive[j] = number of length-j sign prefixes whose running value stayed > 0 through step j.
template <typename Step>
void count_alive(std::size_t depth, std::size_t horizon, double value, const Step& step,
                 std::vector<std::uint64_t>& alive) {
    ++alive[depth];
    if (depth == horizon) return;
    for (int sign : {+1, -1}) {
        const double next = value + sign * step(depth);
        if (next > 0.0) count_alive(depth + 1, horizon, next, step, alive);
    }
}

}  // namespace

DominanceReport dominance_check(std::span<const double> tail_weights, double start, std::size_t horizon) {
    if (!(start > 0.0)) throw DomainError("dominance_check needs A > 0");
    if (horizon > 24) throw DomainError("dominance_check enumerates 2^H paths; H must be <= 24");
    if (tail_weights.size() < std::max<std::size_t>(horizon, 1))
        throw DomainError("dominance_check needs at least H (and at least one) weights");
    for (std::size_t i = 0; i < horizon; ++i) {
        if (!(tail_weights[i] > 0.0)) throw DomainError("weights must be positive");
        if (i > 0 && tail_weights[i] < tail_weights[i - 1])
            throw DomainError("weights must be non-decreasing");
    }
    DominanceReport report;
    report.r = static_cast<std::int64_t>(std::ceil(start / tail_weights[0]));

    std::vector<std::uint64_t> walk(horizon + 1, 0), srw(horizon + 1, 0);
    count_alive(0, horizon, start, [&](std::size_t d) { return tail_weights[d]; }, walk);
    // Simple walk absorbed at -r: shift so that the barrier sits at 0.
    count_alive(0, horizon, static_cast<double>(report.r), [](std::size_t) { return 1.0; }, srw);

    report.pass = true;
    for (std::size_t j = 0; j <= horizon; ++j) {
        report.walk_survival.emplace_back(BigInt(walk[j]), pow2(j));
        report.srw_survival.emplace_back(BigInt(srw[j]), pow2(j));
        if (walk[j] > srw[j]) report.pass = false;
    }
    return report;
}

// ----------------------------------------------------------------- Azuma

AzumaReport azuma_check(std::span<const double> weights, double threshold) {
    if (!(threshold > 0.0)) throw DomainError("azuma_check needs A > 0");
    long double sum_sq = 0.0L;
    bool integral = true;
    for (double b : weights) {
        if (!(b >= 0.0) || !std::isfinite(b)) throw DomainError("weights must be non-negative");
        sum_sq += static_cast<long double>(b) * b;
        integral = integral && std::floor(b) == b && b < 1e15;
    }
    AzumaReport report;
    report.bound = sum_sq == 0.0L
                       ? 0.0
                       : static_cast<double>(2.0L * std::exp(-static_cast<long double>(threshold) * threshold /
                                                             (2.0L * sum_sq)));
    const auto m = weights.size();
    if (integral) {
        std::vector<std::int64_t> w(weights.begin(), weights.end());
        const auto dist = distribution_of_weights(w);
        BigInt tail = 0;
        for (std::size_t i = 0; i < dist.counts.size(); ++i) {
            const std::int64_t z = dist.offset + 2 * static_cast<std::int64_t>(i);
            if (std::fabs(static_cast<double>(z)) >= threshold) tail += dist.counts[i];
        }
        report.tail = Rational(tail, dist.total());
    } else {
        if (m > 24) throw DomainError("exact Azuma check of real weights enumerates 2^m paths; m must be <= 24");
        std::uint64_t tail = 0;
        for (std::uint64_t mask = 0; mask < (1ULL << m); ++mask) {
            long double s = 0.0L;
            for (std::size_t i = 0; i < m; ++i) s += ((mask >> i) & 1U) ? weights[i] : -weights[i];
            if (std::fabs(s) >= threshold) ++tail;
        }
        report.tail = Rational(BigInt(tail), pow2(m));
    }
    report.pass = to_double(report.tail) <= report.bound;
    return report;
}

// --------------------------------------------------------- pattern count

BigInt avoid_pattern_count(std::uint64_t kappa) {
    if (kappa < 1) throw DomainError("avoid_pattern_count needs kappa >= 1");
    // States by the longest suffix that is a prefix of (-1,+1,-1): none, "-", "-+".
    BigInt none = 1, minus = 0, minus_plus = 0;
    for (std::uint64_t i = 0; i < kappa; ++i) {
        BigInt next_none = none + minus_plus;  // append +1
        BigInt next_minus = none + minus;      // append -1 (from "-+" it completes the pattern)
        BigInt next_minus_plus = minus;        // append +1 after "-"
        none = std::move(next_none);
        minus = std::move(next_minus);
        minus_plus = std::move(next_minus_plus);
    }
    return none + minus + minus_plus;
}

// --------------------------------------------------------- serialization

void write_binary(std::ostream& out, const LatticeDist& dist) {
    out.write("AWLD", 4);
    out.put(1);
    write_u64(out, dist.n, 8);
    write_u64(out, static_cast<std::uint64_t>(dist.offset), 8);
    write_u64(out, static_cast<std::uint64_t>(dist.stride), 4);
    write_u64(out, dist.counts.size(), 8);
    std::vector<unsigned char> bytes;
    for (const auto& c : dist.counts) {
        bytes.clear();
        if (c != 0) boost::multiprecision::export_bits(c, std::back_inserter(bytes), 8, false);
        write_u64(out, bytes.size(), 4);
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    }
}

LatticeDist read_binary(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "AWLD", 4) != 0) throw DomainError("not an AWLD stream");
    const int version = in.get();
    if (version != 1) throw DomainError("unsupported AWLD version " + std::to_string(version));
    LatticeDist dist;
    dist.n = read_u64(in, 8);
    dist.offset = static_cast<std::int64_t>(read_u64(in, 8));
    dist.stride = static_cast<std::int64_t>(read_u64(in, 4));
    const auto size = read_u64(in, 8);
    dist.counts.reserve(size);
    std::vector<unsigned char> bytes;
    for (std::uint64_t i = 0; i < size; ++i) {
        const auto len = read_u64(in, 4);
        bytes.resize(len);
        if (len && !in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(len)))
            throw DomainError("truncated AWLD stream");
        BigInt c = 0;
        if (len) boost::multiprecision::import_bits(c, bytes.begin(), bytes.end(), 8, false);
        dist.counts.push_back(std::move(c));
    }
    return dist;
}

void write_csv(std::ostream& out, const LatticeDist& dist) {
    out << "z,count,prob\n";
    const HpFloat total(dist.total());
    for (std::size_t i = 0; i < dist.counts.size(); ++i) {
        const std::int64_t z = dist.offset + dist.stride * static_cast<std::int64_t>(i);
        out << z << ',' << dist.counts[i].str() << ','
            << format_double(static_cast<double>(HpFloat(dist.counts[i]) / total)) << '\n';
    }
}

}  // namespace awalk::exact
