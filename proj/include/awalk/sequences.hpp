#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace awalk::seq {

/// Length of one block, exact when it fits in 128 bits. `log_value` is always
/// set (natural log, -inf for an empty block).
struct BlockLength {
    std::optional<unsigned __int128> exact;
    long double log_value = 0.0L;
};

/// A rule k -> L_k for block lengths. Built from a registered name with
/// numeric parameters (`pow2`, `geom:1.5`, `logpow:2:1`) or from an explicit
/// comma list (`1,2,4`).
class LengthRule {
public:
    using Generator = std::function<BlockLength(std::uint64_t)>;
    using Factory = std::function<Generator(const std::vector<double>&)>;

    static LengthRule parse(std::string_view text);
    static LengthRule from_list(std::vector<std::uint64_t> lengths);

    /// Registration point for named rules. Returns false if the name is taken.
    static bool register_rule(const std::string& name, std::size_t param_count, Factory factory);

    BlockLength length(std::uint64_t k) const;
    /// Number of blocks for a finite list, nullopt for an infinite rule.
    std::optional<std::uint64_t> block_count() const;
    std::string canonical() const;

    bool operator==(const LengthRule& other) const { return canonical() == other.canonical(); }

private:
    std::string name_;
    std::vector<double> params_;
    std::vector<std::uint64_t> list_;
    Generator generator_;
};

/// Declarative description of the weight sequence a_1, a_2, ...
class SequenceSpec {
public:
    struct Constant { double value; };
    struct Linear {};
    struct PowerFloor { double beta; };
    /// Blocks of value k with length floor(gamma^k); gamma = 2 gives a_i = floor(log2(i+1)).
    struct LogCeilBlocks { double gamma; };
    struct GeneralBlocks { LengthRule lengths; };
    /// a_k = c ln k, defined from k = 2 on.
    struct LogContinuous { double c; };
    /// Finite list, repeated periodically beyond its length.
    struct Explicit { std::vector<double> values; };

    using Variant = std::variant<Constant, Linear, PowerFloor, LogCeilBlocks, GeneralBlocks,
                                 LogContinuous, Explicit>;

    static SequenceSpec constant(double value);
    static SequenceSpec linear();
    static SequenceSpec power_floor(double beta);
    static SequenceSpec log_ceil_blocks(double gamma);
    static SequenceSpec general_blocks(LengthRule lengths);
    static SequenceSpec log_continuous(double c);
    static SequenceSpec explicit_values(std::vector<double> values);

    /// Parses the canonical text form, e.g. `powfloor:0.5` or `explicit:1,2,3`.
    static SequenceSpec parse(std::string_view text);
    static const char* grammar();
    std::string canonical() const;

    const Variant& variant() const { return variant_; }
    bool is_integer_valued() const;
    /// True when the variant is non-decreasing by construction.
    bool is_non_decreasing() const;
    bool is_block_variant() const;

    /// Index of the first admissible term: 2 for LogContinuous, else 1.
    std::uint64_t first_index() const;

    double term(std::int64_t k) const;
    std::int64_t integer_term(std::int64_t k) const;

    /// Weight of walk step j >= 1, i.e. term(j + first_index() - 1).
    double step_weight(std::uint64_t step) const;
    std::int64_t integer_step_weight(std::uint64_t step) const;

    /// Weights of walk steps 1..n.
    std::vector<double> step_weights(std::uint64_t n) const;
    std::vector<std::int64_t> integer_step_weights(std::uint64_t n) const;

    bool operator==(const SequenceSpec& other) const { return canonical() == other.canonical(); }

private:
    explicit SequenceSpec(Variant v) : variant_(std::move(v)) {}
    Variant variant_;
};

struct BlockIndex {
    std::uint64_t k = 0;
    std::uint64_t first = 0;   ///< i_k
    std::uint64_t length = 0;  ///< L_k
};

/// Sum of squared step weights over steps 1..n; exact integer arithmetic for
/// integer-valued specs.
double prefix_sum_squares(const SequenceSpec& spec, std::uint64_t n);

/// Sum of step weights over steps 1..n for integer specs (the support radius of S(n)).
std::int64_t prefix_sum(const SequenceSpec& spec, std::uint64_t n);

/// First index and length of block k for block variants and LogContinuous.
BlockIndex block_start(const SequenceSpec& spec, std::uint64_t k);

enum class Parity { odd, even };

/// floor(m ln m) moved to the requested parity: odd adds one to an even value,
/// even subtracts one from an odd value (so m = 2 with even parity yields 0).
std::uint64_t checkpoint_index(std::uint64_t m, Parity parity);

enum class CheckStatus { pass, fail, indeterminate };

struct TcondViolation {
    std::uint64_t k = 0;
    std::optional<std::uint64_t> k_prime;
    int condition = 0;  ///< 1: head ratio, 2: gap ratio, 3: L_k >= k^4
    long double lhs = 0.0L;
    long double rhs = 0.0L;
};

struct TcondReport {
    CheckStatus status = CheckStatus::pass;
    std::optional<TcondViolation> first_violation;
    std::vector<std::uint64_t> indeterminate_k;
    std::uint64_t pairs_checked = 0;
    bool used_log_mode = false;
};

/// Checks the three block-length growth conditions for all k0 <= k' < k <= k_max
/// with k - k' >= k / ln k - 2; L_k >= k^4 is checked for every k in [k0, k_max].
TcondReport tcond_check(const LengthRule& lengths, double epsilon, double r, std::uint64_t k0,
                        std::uint64_t k_max);

std::string to_string(CheckStatus status);

}  // namespace awalk::seq
