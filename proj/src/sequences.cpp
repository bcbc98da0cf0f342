#include "awalk/sequences.hpp"

#include "awalk/error.hpp"
#include "awalk/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

namespace awalk::seq {
namespace {

constexpr long double kNegInf = -std::numeric_limits<long double>::infinity();

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = text.find(sep, start);
        out.emplace_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

BlockLength from_u128(unsigned __int128 value) {
    BlockLength out;
    out.exact = value;
    out.log_value = value == 0 ? kNegInf : std::log(static_cast<long double>(value));
    return out;
}

// ceil(x) for a non-negative finite long double, exact when it fits.
BlockLength from_real(long double x) {
    BlockLength out;
    out.log_value = x <= 0 ? kNegInf : std::log(x);
    if (x < 1.0e38L) out.exact = static_cast<unsigned __int128>(x);
    return out;
}

struct RuleEntry {
    std::size_t param_count;
    LengthRule::Factory factory;
};

std::map<std::string, RuleEntry>& registry() {
    static std::map<std::string, RuleEntry> rules = [] {
        std::map<std::string, RuleEntry> r;
        r["ones"] = {0, [](const std::vector<double>&) -> LengthRule::Generator {
                         return [](std::uint64_t) { return from_u128(1); };
                     }};
        r["pow2"] = {0, [](const std::vector<double>&) -> LengthRule::Generator {
                         return [](std::uint64_t k) {
                             if (k < 127) return from_u128(static_cast<unsigned __int128>(1) << k);
                             BlockLength out;
                             out.log_value = static_cast<long double>(k) * std::log(2.0L);
                             return out;
                         };
                     }};
        // floor(gamma^k)
        r["geom"] = {1, [](const std::vector<double>& p) -> LengthRule::Generator {
                         long double gamma = p[0];
                         if (!(gamma > 1.0L)) throw DomainError("geom block rule needs gamma > 1");
                         return [gamma](std::uint64_t k) {
                             long double lg = static_cast<long double>(k) * std::log(gamma);
                             BlockLength out;
                             out.log_value = lg;
                             if (lg < 87.0L) {
                                 out.exact = static_cast<unsigned __int128>(
                                     std::floor(std::pow(gamma, static_cast<long double>(k))));
                                 out.log_value = std::log(static_cast<long double>(*out.exact));
                             }
                             return out;
                         };
                     }};
        // max(1, ceil(k^4 ln k))
        r["k4lnk"] = {0, [](const std::vector<double>&) -> LengthRule::Generator {
                          return [](std::uint64_t k) {
                              long double kk = static_cast<long double>(k);
                              long double v = std::ceil(kk * kk * kk * kk * std::log(kk));
                              return from_real(std::max(v, 1.0L));
                          };
                      }};
        // Blocks realizing a_i = floor((log_gamma i)^beta): value k occupies
        // gamma^(k^(1/beta)) <= i < gamma^((k+1)^(1/beta)).
        r["logpow"] = {2, [](const std::vector<double>& p) -> LengthRule::Generator {
                           long double gamma = p[0];
                           long double beta = p[1];
                           if (!(gamma > 1.0L) || !(beta > 0.0L) || beta > 1.0L)
                               throw DomainError("logpow block rule needs gamma > 1, beta in (0,1]");
                           return [gamma, beta](std::uint64_t k) {
                               long double lo = std::pow(static_cast<long double>(k), 1.0L / beta) *
                                                std::log(gamma);
                               long double hi =
                                   std::pow(static_cast<long double>(k + 1), 1.0L / beta) *
                                   std::log(gamma);
                               if (hi < 87.0L) {
                                   auto first = static_cast<unsigned __int128>(std::ceil(std::exp(lo)));
                                   auto next = static_cast<unsigned __int128>(std::ceil(std::exp(hi)));
                                   return from_u128(next - first);
                               }
                               BlockLength out;
                               // exp(hi) - exp(lo), in logs.
                               out.log_value = hi + std::log1p(-std::exp(lo - hi));
                               return out;
                           };
                       }};
        return r;
    }();
    return rules;
}

std::mutex& registry_mutex() {
    static std::mutex m;
    return m;
}

bool is_integral(double x) {
    return std::isfinite(x) && std::floor(x) == x && std::fabs(x) <= 9007199254740992.0;
}

double positive_param(const std::string& text, const char* what) {
    double v = parse_double(text);
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive");
    return v;
}

// Locates the block containing term index i for a length rule; returns (k, i_k).
std::pair<std::uint64_t, std::uint64_t> locate_block(const LengthRule& rule, std::uint64_t i) {
    std::uint64_t start = 1;
    const auto count = rule.block_count();
    for (std::uint64_t k = 1;; ++k) {
        if (count && k > *count)
            throw DomainError("index " + std::to_string(i) + " lies beyond the last listed block");
        BlockLength len = rule.length(k);
        if (!len.exact || *len.exact >= static_cast<unsigned __int128>(i - start + 1)) return {k, start};
        start += static_cast<std::uint64_t>(*len.exact);
    }
}

std::uint64_t ceil_pow(long double gamma, std::uint64_t k) {
    long double v = std::ceil(std::pow(gamma, static_cast<long double>(k)));
    if (v > 1.8e19L) throw DomainError("block start overflows 64 bits");
    return static_cast<std::uint64_t>(v);
}

long double log_gamma_of(const SequenceSpec::LogContinuous& lc) {
    return static_cast<long double>(std::exp(1.0 / lc.c));
}

}  // namespace

// ---------------------------------------------------------------- LengthRule

bool LengthRule::register_rule(const std::string& name, std::size_t param_count, Factory factory) {
    std::lock_guard lock(registry_mutex());
    return registry().emplace(name, RuleEntry{param_count, std::move(factory)}).second;
}

LengthRule LengthRule::from_list(std::vector<std::uint64_t> lengths) {
    if (lengths.empty()) throw DomainError("block length list is empty");
    for (auto l : lengths)
        if (l == 0) throw DomainError("block lengths must be positive");
    LengthRule rule;
    rule.list_ = std::move(lengths);
    rule.generator_ = [list = rule.list_](std::uint64_t k) {
        if (k == 0 || k > list.size()) throw DomainError("block " + std::to_string(k) + " not listed");
        return from_u128(list[k - 1]);
    };
    return rule;
}

LengthRule LengthRule::parse(std::string_view text) {
    if (text.empty()) throw DomainError("empty block length rule");
    if (std::isdigit(static_cast<unsigned char>(text.front()))) {
        std::vector<std::uint64_t> lengths;
        for (const auto& item : split(text, ',')) {
            auto v = parse_int(item);
            if (v <= 0) throw DomainError("block lengths must be positive");
            lengths.push_back(static_cast<std::uint64_t>(v));
        }
        return from_list(std::move(lengths));
    }
    auto parts = split(text, ':');
    RuleEntry entry;
    {
        std::lock_guard lock(registry_mutex());
        auto it = registry().find(parts[0]);
        if (it == registry().end()) throw DomainError("unknown block length rule '" + parts[0] + "'");
        entry = it->second;
    }
    if (parts.size() - 1 != entry.param_count)
        throw DomainError("block rule '" + parts[0] + "' takes " + std::to_string(entry.param_count) +
                          " parameter(s)");
    LengthRule rule;
    rule.name_ = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) rule.params_.push_back(parse_double(parts[i]));
    rule.generator_ = entry.factory(rule.params_);
    return rule;
}

BlockLength LengthRule::length(std::uint64_t k) const {
    if (k == 0) throw DomainError("block labels start at 1");
    return generator_(k);
}

std::optional<std::uint64_t> LengthRule::block_count() const {
    if (list_.empty()) return std::nullopt;
    return list_.size();
}

std::string LengthRule::canonical() const {
    std::string out;
    if (!list_.empty()) {
        for (std::size_t i = 0; i < list_.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(list_[i]);
        }
        return out;
    }
    out = name_;
    for (double p : params_) out += ":" + format_double(p);
    return out;
}

// -------------------------------------------------------------- SequenceSpec

SequenceSpec SequenceSpec::constant(double value) {
    if (!(value > 0.0) || !std::isfinite(value)) throw DomainError("constant weight must be positive");
    return SequenceSpec(Constant{value});
}

SequenceSpec SequenceSpec::linear() { return SequenceSpec(Linear{}); }

SequenceSpec SequenceSpec::power_floor(double beta) {
    if (!(beta > 0.0) || beta > 1.0) throw DomainError("powfloor exponent must lie in (0,1]");
    return SequenceSpec(PowerFloor{beta});
}

SequenceSpec SequenceSpec::log_ceil_blocks(double gamma) {
    if (!(gamma > 1.0) || !std::isfinite(gamma)) throw DomainError("logceil base must exceed 1");
    return SequenceSpec(LogCeilBlocks{gamma});
}

SequenceSpec SequenceSpec::general_blocks(LengthRule lengths) {
    return SequenceSpec(GeneralBlocks{std::move(lengths)});
}

SequenceSpec SequenceSpec::log_continuous(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("logcont scale must be positive");
    return SequenceSpec(LogContinuous{c});
}

SequenceSpec SequenceSpec::explicit_values(std::vector<double> values) {
    if (values.empty()) throw DomainError("explicit sequence is empty");
    for (double v : values)
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("explicit weights must be positive");
    return SequenceSpec(Explicit{std::move(values)});
}

const char* SequenceSpec::grammar() {
    return "constant:<a> | linear | powfloor:<beta> | logceil:<gamma> | blocks:<rule> | "
           "logcont:<c> | explicit:<a1>,<a2>,...   where <rule> is pow2 | ones | k4lnk | "
           "geom:<gamma> | logpow:<gamma>:<beta> | <L1>,<L2>,...";
}

SequenceSpec SequenceSpec::parse(std::string_view text) {
    try {
        auto colon = text.find(':');
        std::string head(text.substr(0, colon));
        std::string rest = colon == std::string_view::npos ? std::string() : std::string(text.substr(colon + 1));
        const bool has_arg = colon != std::string_view::npos;
        if (head == "linear" && !has_arg) return linear();
        if (!has_arg) throw DomainError("missing parameter");
        if (head == "constant") return constant(positive_param(rest, "constant"));
        if (head == "powfloor") return power_floor(parse_double(rest));
        if (head == "logceil") return log_ceil_blocks(parse_double(rest));
        if (head == "blocks") return general_blocks(LengthRule::parse(rest));
        if (head == "logcont") return log_continuous(positive_param(rest, "logcont"));
        if (head == "explicit") {
            std::vector<double> values;
            for (const auto& item : split(rest, ',')) values.push_back(parse_double(item));
            return explicit_values(std::move(values));
        }
        throw DomainError("unknown variant '" + head + "'");
    } catch (const DomainError& e) {
        throw DomainError("invalid sequence spec '" + std::string(text) + "': " + e.what() +
                          "; expected " + grammar());
    }
}

std::string SequenceSpec::canonical() const {
    struct Visitor {
        std::string operator()(const Constant& v) const { return "constant:" + format_double(v.value); }
        std::string operator()(const Linear&) const { return "linear"; }
        std::string operator()(const PowerFloor& v) const { return "powfloor:" + format_double(v.beta); }
        std::string operator()(const LogCeilBlocks& v) const { return "logceil:" + format_double(v.gamma); }
        std::string operator()(const GeneralBlocks& v) const { return "blocks:" + v.lengths.canonical(); }
        std::string operator()(const LogContinuous& v) const { return "logcont:" + format_double(v.c); }
        std::string operator()(const Explicit& v) const {
            std::string out = "explicit:";
            for (std::size_t i = 0; i < v.values.size(); ++i) {
                if (i) out += ',';
                out += format_double(v.values[i]);
            }
            return out;
        }
    };
    return std::visit(Visitor{}, variant_);
}

bool SequenceSpec::is_integer_valued() const {
    if (auto c = std::get_if<Constant>(&variant_)) return is_integral(c->value);
    if (std::holds_alternative<LogContinuous>(variant_)) return false;
    if (auto e = std::get_if<Explicit>(&variant_))
        return std::all_of(e->values.begin(), e->values.end(), is_integral);
    return true;
}

bool SequenceSpec::is_non_decreasing() const {
    if (auto e = std::get_if<Explicit>(&variant_))
        return std::all_of(e->values.begin(), e->values.end(),
                           [&](double v) { return v == e->values.front(); });
    return true;
}

bool SequenceSpec::is_block_variant() const {
    return std::holds_alternative<LogCeilBlocks>(variant_) || std::holds_alternative<GeneralBlocks>(variant_);
}

std::uint64_t SequenceSpec::first_index() const {
    return std::holds_alternative<LogContinuous>(variant_) ? 2 : 1;
}

double SequenceSpec::term(std::int64_t k) const {
    if (k < 1) throw DomainError("sequence index must be >= 1, got " + std::to_string(k));
    const auto uk = static_cast<std::uint64_t>(k);
    struct Visitor {
        std::uint64_t k;
        double operator()(const Constant& v) const { return v.value; }
        double operator()(const Linear&) const { return static_cast<double>(k); }
        double operator()(const PowerFloor& v) const {
            if (v.beta == 1.0) return static_cast<double>(k);
            if (v.beta == 0.5) {
                auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(k)));
                while (r * r > k) --r;
                while ((r + 1) * (r + 1) <= k) ++r;
                return static_cast<double>(r);
            }
            return std::floor(std::pow(static_cast<double>(k), v.beta));
        }
        double operator()(const LogCeilBlocks& v) const {
            return static_cast<double>(locate_block(LengthRule::parse("geom:" + format_double(v.gamma)), k).first);
        }
        double operator()(const GeneralBlocks& v) const {
            return static_cast<double>(locate_block(v.lengths, k).first);
        }
        double operator()(const LogContinuous& v) const {
            if (k < 2) throw DomainError("logcont term a_1 = c ln 1 = 0 is not a positive weight");
            return v.c * std::log(static_cast<double>(k));
        }
        double operator()(const Explicit& v) const { return v.values[(k - 1) % v.values.size()]; }
    };
    return std::visit(Visitor{uk}, variant_);
}

std::int64_t SequenceSpec::integer_term(std::int64_t k) const {
    if (!is_integer_valued())
        throw UnsupportedError("sequence '" + canonical() + "' is not integer-valued");
    return static_cast<std::int64_t>(term(k));
}

double SequenceSpec::step_weight(std::uint64_t step) const {
    if (step < 1) throw DomainError("walk steps start at 1");
    return term(static_cast<std::int64_t>(step + first_index() - 1));
}

std::int64_t SequenceSpec::integer_step_weight(std::uint64_t step) const {
    if (step < 1) throw DomainError("walk steps start at 1");
    return integer_term(static_cast<std::int64_t>(step + first_index() - 1));
}

std::vector<double> SequenceSpec::step_weights(std::uint64_t n) const {
    std::vector<double> out;
    out.reserve(n);
    const LengthRule* rule = nullptr;
    std::optional<LengthRule> geom;
    if (auto b = std::get_if<GeneralBlocks>(&variant_)) rule = &b->lengths;
    if (auto l = std::get_if<LogCeilBlocks>(&variant_)) {
        geom = LengthRule::parse("geom:" + format_double(l->gamma));
        rule = &*geom;
    }
    if (rule) {
        // Walk the blocks once instead of locating each index.
        const auto count = rule->block_count();
        for (std::uint64_t k = 1; out.size() < n; ++k) {
            if (count && k > *count)
                throw DomainError("index " + std::to_string(out.size() + 1) + " lies beyond the last listed block");
            BlockLength len = rule->length(k);
            unsigned __int128 remaining = n - out.size();
            unsigned __int128 take = len.exact ? std::min(*len.exact, remaining) : remaining;
            out.insert(out.end(), static_cast<std::size_t>(take), static_cast<double>(k));
        }
        return out;
    }
    for (std::uint64_t j = 1; j <= n; ++j) out.push_back(step_weight(j));
    return out;
}

std::vector<std::int64_t> SequenceSpec::integer_step_weights(std::uint64_t n) const {
    if (!is_integer_valued())
        throw UnsupportedError("sequence '" + canonical() + "' is not integer-valued");
    auto w = step_weights(n);
    return {w.begin(), w.end()};
}

// --------------------------------------------------------------- operations

double prefix_sum_squares(const SequenceSpec& spec, std::uint64_t n) {
    if (n < 1) throw DomainError("prefix_sum_squares needs n >= 1");
    if (spec.is_integer_valued()) {
        unsigned __int128 acc = 0;
        for (auto a : spec.integer_step_weights(n))
            acc += static_cast<unsigned __int128>(a) * static_cast<unsigned __int128>(a);
        return static_cast<double>(acc);
    }
    long double acc = 0.0L;
    for (double a : spec.step_weights(n)) acc += static_cast<long double>(a) * a;
    return static_cast<double>(acc);
}

std::int64_t prefix_sum(const SequenceSpec& spec, std::uint64_t n) {
    std::int64_t acc = 0;
    for (auto a : spec.integer_step_weights(n)) acc += a;
    return acc;
}

BlockIndex block_start(const SequenceSpec& spec, std::uint64_t k) {
    if (k < 1) throw DomainError("block labels start at 1");
    if (auto lc = std::get_if<SequenceSpec::LogContinuous>(&spec.variant())) {
        const long double gamma = log_gamma_of(*lc);
        const std::uint64_t first = ceil_pow(gamma, k);
        const std::uint64_t next = ceil_pow(gamma, k + 1);
        return {k, first, next - first};
    }
    std::optional<LengthRule> geom;
    const LengthRule* rule = nullptr;
    if (auto b = std::get_if<SequenceSpec::GeneralBlocks>(&spec.variant())) rule = &b->lengths;
    if (auto l = std::get_if<SequenceSpec::LogCeilBlocks>(&spec.variant())) {
        geom = LengthRule::parse("geom:" + format_double(l->gamma));
        rule = &*geom;
    }
    if (!rule) throw UnsupportedError("block_start needs a block or logcont sequence, got '" + spec.canonical() + "'");
    unsigned __int128 first = 1;
    for (std::uint64_t j = 1; j < k; ++j) {
        auto len = rule->length(j);
        if (!len.exact) throw DomainError("block start overflows 128 bits");
        first += *len.exact;
    }
    auto len = rule->length(k);
    if (!len.exact || first + *len.exact > std::numeric_limits<std::uint64_t>::max())
        throw DomainError("block index overflows 64 bits");
    return {k, static_cast<std::uint64_t>(first), static_cast<std::uint64_t>(*len.exact)};
}

std::uint64_t checkpoint_index(std::uint64_t m, Parity parity) {
    if (m < 2) throw DomainError("checkpoint_index needs m >= 2");
    const double x = static_cast<double>(m) * std::log(static_cast<double>(m));
    auto base = static_cast<std::uint64_t>(std::floor(x));
    const bool odd = base % 2 == 1;
    if (parity == Parity::odd) return odd ? base : base + 1;
    return odd ? base - 1 : base;
}

std::string to_string(CheckStatus status) {
    switch (status) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        case CheckStatus::indeterminate: return "indeterminate";
    }
    return "?";
}

TcondReport tcond_check(const LengthRule& lengths, double epsilon, double r, std::uint64_t k0,
                        std::uint64_t k_max) {
    if (!(epsilon > 0.0) || !(r > 0.0)) throw DomainError("tcond needs epsilon > 0 and r > 0");
    if (k0 < 3 || k_max < k0) throw DomainError("tcond needs 3 <= k0 <= k_max");
    if (auto count = lengths.block_count(); count && *count < k_max)
        throw DomainError("length list shorter than k_max");

    constexpr long double kSlack = 1e-12L;
    using u128 = unsigned __int128;

    // Prefix sums P_j = L_1 + ... + L_j, exact while they fit, plus log prefix sums.
    std::vector<BlockLength> len(k_max + 1);
    std::vector<std::optional<u128>> prefix(k_max + 1);
    std::vector<long double> log_prefix(k_max + 1, kNegInf);
    prefix[0] = 0;
    for (std::uint64_t j = 1; j <= k_max; ++j) {
        len[j] = lengths.length(j);
        if (prefix[j - 1] && len[j].exact && *len[j].exact <= std::numeric_limits<u128>::max() - *prefix[j - 1])
            prefix[j] = *prefix[j - 1] + *len[j].exact;
        const long double a = log_prefix[j - 1];
        const long double b = len[j].log_value;
        const long double hi = std::max(a, b);
        log_prefix[j] = hi == kNegInf ? kNegInf : hi + std::log1p(std::exp(std::min(a, b) - hi));
    }

    TcondReport report;
    auto record = [&](std::uint64_t k, std::optional<std::uint64_t> kp, int cond, long double lhs,
                      long double rhs, bool log_mode) {
        if (log_mode) report.used_log_mode = true;
        const long double slack = log_mode ? kSlack * std::max(1.0L, std::fabs(rhs)) : 0.0L;
        if (lhs >= rhs + slack) return;
        if (log_mode && lhs >= rhs - slack) {
            if (report.indeterminate_k.empty() || report.indeterminate_k.back() != k)
                report.indeterminate_k.push_back(k);
            return;
        }
        if (!report.first_violation) report.first_violation = TcondViolation{k, kp, cond, lhs, rhs};
    };

    for (std::uint64_t k = k0; k <= k_max; ++k) {
        const long double kk = static_cast<long double>(k);
        // L_k >= k^4
        if (len[k].exact) {
            record(k, std::nullopt, 3, static_cast<long double>(*len[k].exact), kk * kk * kk * kk, false);
        } else {
            record(k, std::nullopt, 3, len[k].log_value, 4.0L * std::log(kk), true);
        }
        const long double gap = kk / std::log(kk) - 2.0L;
        for (std::uint64_t kp = k0; kp < k; ++kp) {
            if (static_cast<long double>(k - kp) < gap) break;
            ++report.pairs_checked;
            const long double head_rhs = (2.0L + epsilon) * std::log(kk);
            const long double gap_rhs = 2.0L * r;
            const bool exact = len[k].exact && prefix[kp] && prefix[k - 1];
            if (exact) {
                const long double lk = static_cast<long double>(*len[k].exact);
                record(k, kp, 1, lk / static_cast<long double>(*prefix[kp]), head_rhs, false);
                const u128 middle = *prefix[k - 1] - *prefix[kp];
                if (middle > 0) record(k, kp, 2, lk / static_cast<long double>(middle), gap_rhs, false);
            } else {
                record(k, kp, 1, len[k].log_value - log_prefix[kp], std::log(head_rhs), true);
                if (k - 1 > kp) {
                    // log(P_{k-1} - P_{k'})
                    const long double log_mid =
                        log_prefix[k - 1] + std::log1p(-std::exp(log_prefix[kp] - log_prefix[k - 1]));
                    record(k, kp, 2, len[k].log_value - log_mid, std::log(gap_rhs), true);
                }
            }
        }
    }
    if (report.first_violation)
        report.status = CheckStatus::fail;
    else if (!report.indeterminate_k.empty())
        report.status = CheckStatus::indeterminate;
    return report;
}

}  // namespace awalk::seq
