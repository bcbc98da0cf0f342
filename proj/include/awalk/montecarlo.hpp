#pragma once

#include "awalk/numeric.hpp"
#include "awalk/rng.hpp"
#include "awalk/sequences.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace awalk::mc {

struct Snapshot {
    std::uint64_t n = 0;
    std::uint64_t zero_hits = 0;
    std::vector<std::uint64_t> band_hits;
    std::uint64_t sign_changes = 0;
    double max_abs = 0.0;

    bool operator==(const Snapshot&) const = default;
};

struct PathStats {
    std::uint64_t horizon = 0;
    std::uint64_t zero_hits = 0;
    std::vector<std::uint64_t> band_hits;  ///< one per configured band
    std::uint64_t sign_changes = 0;
    std::optional<std::uint64_t> last_zero_hit;
    std::vector<std::optional<std::uint64_t>> last_band_hit;
    double max_abs = 0.0;
    double final_value = 0.0;
    std::vector<Snapshot> snapshots;  ///< one per configured checkpoint
    /// Set when a growth window is configured: |S(n)| > n^exponent throughout the window.
    std::optional<bool> growth_held;

    bool operator==(const PathStats&) const = default;
};

struct SimulationConfig {
    std::vector<double> bands;               ///< band half-widths C, compared as |S| <= C
    std::vector<std::uint64_t> checkpoints;  ///< increasing step indices <= horizon
    double zero_tolerance = 1e-9;            ///< real-valued walks only
    std::optional<double> growth_exponent;
    std::uint64_t growth_from = 1;
};

/// Precomputed step weights shared read-only by all paths.
class Walk {
public:
    Walk(const seq::SequenceSpec& spec, std::uint64_t horizon);

    const seq::SequenceSpec& spec() const { return spec_; }
    std::uint64_t horizon() const { return horizon_; }
    bool integer_valued() const { return !int_weights_.empty(); }
    const std::vector<std::int64_t>& int_weights() const { return int_weights_; }
    const std::vector<double>& weights() const { return weights_; }

private:
    seq::SequenceSpec spec_;
    std::uint64_t horizon_;
    std::vector<std::int64_t> int_weights_;
    std::vector<double> weights_;
};

/// Streams one path; sign of step n is bit n-1 of the (seed, stream) block sequence.
PathStats simulate(const Walk& walk, const RngSpec& rng, const SimulationConfig& config);
PathStats simulate(const seq::SequenceSpec& spec, std::uint64_t horizon, const RngSpec& rng,
                   const std::vector<double>& bands);
/// Same statistics for a given sign vector (entries +1 / -1).
PathStats simulate_signs(const seq::SequenceSpec& spec, const std::vector<int>& signs,
                         const SimulationConfig& config = {});

/// Worker count from AWALK_THREADS, else the hardware concurrency.
unsigned worker_count();

/// Runs P paths, path p on stream p, results in path order.
std::vector<PathStats> run_paths(const Walk& walk, std::uint64_t paths, std::uint64_t seed,
                                 const SimulationConfig& config, unsigned threads = worker_count());

struct Aggregate {
    double mean = 0.0;
    double std_error = 0.0;
    double fraction_positive = 0.0;
    std::vector<double> quantiles;  ///< at 0.05, 0.25, 0.5, 0.75, 0.95
};

Aggregate aggregate(const std::vector<double>& values);

struct CheckpointAggregate {
    std::uint64_t n = 0;
    Aggregate zero_hits;
    std::vector<Aggregate> band_hits;
    Aggregate sign_changes;
    Aggregate max_abs;
};

struct Interval {
    double estimate = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    std::uint64_t resamples = 0;
};

/// Percentile bootstrap of mean(after) / mean(before) over paths.
Interval bootstrap_ratio(const std::vector<double>& before, const std::vector<double>& after,
                         std::uint64_t resamples, std::uint64_t seed);
/// Percentile bootstrap of mean(after - before).
Interval bootstrap_difference(const std::vector<double>& before, const std::vector<double>& after,
                              std::uint64_t resamples, std::uint64_t seed);

struct BandSummary {
    std::string label;  ///< "zero" or "C=<value>"
    double any_hit_fraction = 0.0;
    double final_decade_fraction = 0.0;  ///< last hit at n >= N/10
    std::optional<Interval> growth_ratio;       ///< mean hits, last vs first checkpoint
    std::optional<Interval> growth_difference;
};

struct ExperimentReport {
    std::string experiment;
    std::string spec;
    std::uint64_t horizon = 0;
    std::uint64_t paths = 0;
    std::uint64_t seed = 0;
    std::vector<double> bands;
    std::vector<std::uint64_t> checkpoints;
    std::vector<CheckpointAggregate> snapshots;
    std::vector<BandSummary> band_summaries;
    /// sign_change_cdf[i][k-1]: fraction of paths with >= k sign changes by checkpoint i.
    std::vector<std::vector<double>> sign_change_cdf;
    std::optional<double> growth_fraction;
    std::optional<double> growth_exponent;
    std::uint64_t growth_from = 0;
    nlohmann::ordered_json extra;
    std::vector<std::string> notes;
};

nlohmann::ordered_json to_json(const ExperimentReport& report);
std::string to_csv(const ExperimentReport& report);

struct ExperimentOptions {
    std::vector<std::uint64_t> checkpoints;  ///< empty: N/100, N/10, N
    std::uint64_t bootstrap_resamples = 2000;
    unsigned threads = 0;                    ///< 0: worker_count()
    double zero_tolerance = 1e-9;
};

ExperimentReport recurrence_experiment(const seq::SequenceSpec& spec, std::uint64_t horizon,
                                       const std::vector<double>& bands, std::uint64_t paths, std::uint64_t seed,
                                       const ExperimentOptions& options = {});

ExperimentReport sign_change_experiment(const seq::SequenceSpec& spec, std::uint64_t horizon, std::uint64_t paths,
                                        std::uint64_t seed, const ExperimentOptions& options = {});

/// Fraction of paths with |S(n)| > n^(beta/2 - delta) for every n in [ceil(N/10), N].
ExperimentReport growth_experiment(const seq::SequenceSpec& spec, std::uint64_t horizon, double delta,
                                   std::uint64_t paths, std::uint64_t seed, const ExperimentOptions& options = {});

enum class TomaszewskiMode { exact, mc };

struct TomaszewskiReport {
    TomaszewskiMode mode = TomaszewskiMode::exact;
    std::uint64_t n = 0;
    double threshold = 0.0;  ///< sqrt(sum a_k^2)
    std::optional<Rational> exact_probability;
    double probability = 0.0;
    double std_error = 0.0;  ///< Monte Carlo only
    bool pass = false;
};

TomaszewskiReport tomaszewski_check(const seq::SequenceSpec& spec, std::uint64_t n, TomaszewskiMode mode,
                                    std::uint64_t paths = 0, std::uint64_t seed = 0);

/// A numeric sequence m -> x_m for the bound recursion.
class BcSequence {
public:
    using Fn = std::function<double(std::uint64_t)>;

    /// `const:<x>`, `inv` (1/m), `pow:<p>` (m^-p), `geom:<r>` (r^m), `zero`.
    static BcSequence parse(const std::string& text);
    static BcSequence from_function(std::string name, Fn fn);

    double operator()(std::uint64_t m) const { return fn_(m); }
    const std::string& canonical() const { return name_; }

private:
    std::string name_;
    Fn fn_;
};

struct BcReport {
    std::uint64_t ell = 0;
    std::uint64_t m = 0;
    double bound = 1.0;
    std::vector<double> trajectory;  ///< bounds for indices ell..m
};

/// Iterates b_ell = 1, b_j = min(1, (1 - alpha_j) b_{j-1} + eps_{j-1}) for j = ell+1..m.
BcReport bc_bound_propagation(const BcSequence& alpha, const BcSequence& eps, std::uint64_t ell, std::uint64_t m);

}  // namespace awalk::mc
