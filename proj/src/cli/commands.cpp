#include "commands.hpp"

#include "awalk/cli.hpp"
#include "awalk/error.hpp"
#include "awalk/exact.hpp"
#include "awalk/fourier.hpp"
#include "awalk/montecarlo.hpp"
#include "awalk/numeric.hpp"
#include "awalk/verify.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace awalk::cli {

using json = nlohmann::ordered_json;
using seq::SequenceSpec;

seq::SequenceSpec parse_spec(const std::string& text) {
    try {
        return SequenceSpec::parse(text);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

std::vector<std::uint64_t> parse_index_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    const auto as_index = [&](const std::string& t) {
        const std::int64_t v = parse_int(t);
        if (v < 0) throw UsageError("negative index '" + t + "' in '" + text + "'");
        return static_cast<std::uint64_t>(v);
    };
    try {
        if (text.find(':') != std::string::npos) {
            std::vector<std::string> parts;
            std::stringstream ss(text);
            for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
            if (parts.size() < 2 || parts.size() > 3) throw UsageError("range must be lo:hi or lo:hi:step");
            const std::uint64_t lo = as_index(parts[0]), hi = as_index(parts[1]);
            const std::uint64_t step = parts.size() == 3 ? as_index(parts[2]) : 1;
            if (step == 0 || lo > hi) throw UsageError("empty range '" + text + "'");
            for (std::uint64_t v = lo; v <= hi; v += step) out.push_back(v);
            return out;
        }
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ',');) out.push_back(as_index(p));
    } catch (const Error& e) {
        throw UsageError(std::string("bad index list: ") + e.what());
    }
    if (out.empty()) throw UsageError("empty index list");
    return out;
}

std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    try {
        for (std::string p; std::getline(ss, p, ',');) out.push_back(parse_double(p));
    } catch (const Error& e) {
        throw UsageError(std::string("bad number list: ") + e.what());
    }
    return out;
}

namespace {

std::string fmt(double x) { return format_double(x); }

void add_io(CLI::App* sub, Session& s) {
    sub->add_option("--out", s.out_path, "Output file; stdout when omitted");
    sub->add_flag("--force", s.force, "Overwrite existing output and manifest files");
    sub->add_option("--manifest", s.manifest_override, "Run manifest path; defaults to <out>.manifest.json");
    static std::string config_placeholder;
    sub->add_option("--config", config_placeholder, "JSON file of default flag values; explicit flags win");
}

CLI::Option* add_spec(CLI::App* sub, std::string& target) {
    return sub->add_option("--spec", target, "Weight sequence spec, e.g. linear, constant:1, powfloor:0.5");
}

SequenceSpec use_spec(Session& s, const std::string& text) {
    const auto spec = parse_spec(text);
    s.spec_canonical = spec.canonical();
    return spec;
}

void require_positive(std::uint64_t v, const char* name) {
    if (v < 1) throw DomainError(std::string(name) + " must be >= 1");
}

std::string experiment_output(const mc::ExperimentReport& r, const std::string& format) {
    if (format == "csv") return mc::to_csv(r);
    return mc::to_json(r).dump(2) + "\n";
}

json path_json(const mc::PathStats& p, const std::vector<double>& bands) {
    const auto opt = [](const std::optional<std::uint64_t>& v) { return v ? json(*v) : json(nullptr); };
    json j;
    j["zero_hits"] = p.zero_hits;
    json bh = json::array();
    for (std::size_t b = 0; b < bands.size(); ++b)
        bh.push_back({{"C", bands[b]}, {"hits", p.band_hits[b]}, {"last_hit", opt(p.last_band_hit[b])}});
    j["band_hits"] = bh;
    j["sign_changes"] = p.sign_changes;
    j["last_zero_hit"] = opt(p.last_zero_hit);
    j["max_abs"] = p.max_abs;
    j["final_value"] = p.final_value;
    json snaps = json::array();
    for (const auto& s : p.snapshots)
        snaps.push_back({{"n", s.n}, {"zero_hits", s.zero_hits}, {"band_hits", s.band_hits},
                         {"sign_changes", s.sign_changes}, {"max_abs", s.max_abs}});
    j["snapshots"] = snaps;
    return j;
}

struct QuadFlags {
    CLI::Option* abs_tol = nullptr;
    CLI::Option* rel_tol = nullptr;
    double abs = 0, rel = 0;
    std::uint64_t max_nodes = fourier::QuadOptions{}.max_nodes;
    std::string scheme = "adaptive-panel";

    void add(CLI::App* sub, const char* abs_help, const char* rel_help) {
        abs_tol = sub->add_option("--abs-tol", abs, abs_help);
        rel_tol = sub->add_option("--rel-tol", rel, rel_help);
        sub->add_option("--max-nodes", max_nodes, "Integrand evaluation budget per integral");
        sub->add_option("--scheme", scheme, "Quadrature scheme")->check(CLI::IsMember({"adaptive-panel", "fixed-grid"}));
    }

    fourier::QuadOptions options(fourier::QuadOptions base) const {
        if (abs_tol->count()) base.abs_tol = abs;
        if (rel_tol->count()) base.rel_tol = rel;
        base.max_nodes = max_nodes;
        base.scheme = fourier::parse_scheme(scheme);
        return base;
    }
};

std::string series_row(std::uint64_t n, double value, double error, std::uint64_t nodes) {
    return std::to_string(n) + "," + fmt(value) + "," + fmt(error) + "," + std::to_string(nodes) + "\n";
}

}  // namespace

std::vector<Command> register_commands(CLI::App& app, Session& s) {
    std::vector<Command> cmds;

    {  // dist
        struct O {
            std::string spec, format = "csv";
            std::uint64_t n = 0, memory_mb = 1024;
        };
        auto o = std::make_shared<O>();
        auto* sub = app.add_subcommand("dist", "Exact distribution of S(n) for an integer-valued spec");
        add_spec(sub, o->spec)->required();
        sub->add_option("--n", o->n, "Number of steps")->required();
        sub->add_option("--format", o->format, "Output format")->check(CLI::IsMember({"csv", "binary"}));
        sub->add_option("--memory-mb", o->memory_mb, "Memory budget for the big-integer table, MiB");
        add_io(sub, s);
        cmds.emplace_back(sub, [o, &s] {
            const auto spec = use_spec(s, o->spec);
            require_positive(o->n, "--n");
            const auto dist = exact::distribution(spec, o->n, {o->memory_mb << 20});
            std::ostringstream buf;
            if (o->format == "binary") exact::write_binary(buf, dist);
            else exact::write_csv(buf, dist);
            s.emit(buf.str());
            s.summary = {{"n", dist.n}, {"radius", dist.radius()}, {"lattice_points", dist.counts.size()}};
            return kExitOk;
        });
    }

    {  // qn
        struct O {
            std::string spec = "linear";
            std::uint64_t n_max = 0;
            std::int64_t z = 0;
        };
        auto o = std::make_shared<O>();
        auto* sub = app.add_subcommand("qn", "Signed counts #{signs : S(n) = z} for n = 1..n-max");
        add_spec(sub, o->spec);
        sub->add_option("--n-max", o->n_max, "Largest n")->required();
        sub->add_option("--z", o->z, "Target value");
        add_io(sub, s);
        cmds.emplace_back(sub, [o, &s] {
            const auto spec = use_spec(s, o->spec);
            require_positive(o->n_max, "--n-max");
            std::string csv = "n,count,probability\n";
            for (std::uint64_t n = 1; n <= o->n_max; ++n) {
                const BigInt q = exact::signed_count(spec, n, o->z);
                csv += std::to_string(n) + "," + q.str() + "," + fmt(to_double(Rational(q, pow2(n)))) + "\n";
            }
            s.emit(csv);
            return kExitOk;
        });
    }

    {  // hit
        struct O {
            std::string spec;
            std::uint64_t horizon = 0, exact_bits = exact::HitOptions{}.exact_bit_budget;
            std::int64_t band = 0;
        };
        auto o = std::make_shared<O>();
        auto* sub = app.add_subcommand("hit", "Probability that |S(n)| <= C for some n <= N");
        add_spec(sub, o->spec)->required();
        sub->add_option("--horizon", o->horizon, "Horizon N")->required();
        sub->add_option("--band", o->band, "Band half-width C (0 for zero hits)");
        sub->add_option("--exact-bits", o->exact_bits, "Largest N computed in exact rationals");
        add_io(sub, s);
        cmds.emplace_back(sub, [o, &s] {
            const auto spec = use_spec(s, o->spec);
            require_positive(o->horizon, "--horizon");
            exact::HitOptions ho;
            ho.exact_bit_budget = o->exact_bits;
            const auto r = exact::hit_report(spec, o->horizon, o->band, ho);
            json j;
            j["spec"] = spec.canonical();
            j["horizon"] = r.horizon;
            j["band"] = r.band;
            j["mode"] = exact::to_string(r.hit.mode);
            j["hit_probability"] = {
                {"exact", r.hit.exact ? json(format_rational(*r.hit.exact)) : json(nullptr)},
                {"decimal", format_hp(r.hit.value)},
                {"value", static_cast<double>(r.hit.value)}};
            j["expected_visits"] = {
                {"exact", r.visits.exact_total ? json(format_rational(*r.visits.exact_total)) : json(nullptr)},
                {"decimal", format_hp(r.visits.total)},
                {"value", static_cast<double>(r.visits.total)}};
            s.emit(j.dump(2) + "\n");
            s.summary = {{"mode", j["mode"]}, {"hit_probability", j["hit_probability"]["value"]}};
            return kExitOk;
        });
    }

    {  // visits
        struct O {
            std::string spec;
            std::uint64_t horizon = 0, exact_bits = exact::HitOptions{}.exact_bit_budget;
            std::int64_t band = 0;
        };
        auto o = std::make_shared<O>();
        auto* sub = app.add_subcommand("visits", "Per-step P(|S(n)| <= C) and expected visit counts");
        add_spec(sub, o->spec)->required();
        sub->add_option("--horizon", o->horizon, "Horizon N")->required();
        sub->add_option("--band", o->band, "Band half-width C");
        sub->add_option("--exact-bits", o->exact_bits, "Largest N computed in exact rationals");
        add_io(sub, s);
        cmds.emplace_back(sub, [o, &s] {
            const auto spec = use_spec(s, o->spec);
            require_positive(o->horizon, "--horizon");
            exact::HitOptions ho;
            ho.exact_bit_budget = o->exact_bits;
            const auto v = exact::expected_visits(spec, o->horizon, o->band, ho);
            std::string csv = "n,probability,cumulative\n";
            HpFloat cum = 0;
            for (std::size_t i = 0; i < v.series.size(); ++i) {
                cum += v.series[i];
                csv += std::to_string(i + 1) + "," + fmt(static_cast<double>(v.series[i])) + "," +
                       fmt(static_cast<double>(cum)) + "\n";
            }
            s.emit(csv);
            s.summary = {{"mode", exact::to_string(v.mode)}, {"total", format_hp(v.total)}};
            return kExitOk;
        });
    }

    {  // fourier
        struct O {
            std::string op = "point-mass", spec, n;
            std::int64_t z = 0;
            QuadFlags q;
        };
        auto o = std::make_shared<O>();
        auto* sub = app.add_subcommand("fourier", "Fourier point masses or absolute cosine-product integrals");
        sub->add_option("--op", o->op, "Operation")->check(CLI::IsMember({"point-mass", "abs-integral"}));
        add_spec(sub, o->spec)->required();
        sub->add_option("--n", o->n, "Step counts: a,b,c or lo:hi[:step]")->required();
        sub->add_option("--z", o->z, "Lattice point for point-mass");
        o->q.add(sub, "Absolute tolerance (point-mass default 1e-10)", "Relative tolerance (abs-integral default 1e-9)");
        add_io(sub, s);
        cmds.emplace_back(sub, [o, &s] {
            const auto spec = use_spec(s, o->spec);
            const auto ns = parse_index_list(o->n);
            const bool point = o->op == "point-mass";
            const auto opts = o->q.options(point ? fourier::QuadOptions{} : fourier::abs_integral_defaults());
            std::string csv = "n,value,error,nodes\n";
            for (auto n : ns) {
                require_positive(n, "--n");
                const auto r = point ? fourier::point_mass_fourier(spec, n, o->z, opts) : fourier::abs_integral(spec, n, opts);
                csv += series_row(n, r.value, r.abs_error_estimate, r.nodes);
            }
            s.emit(csv);
            return kExitOk;
        });
    }

    {  // sullivan
        struct O {
            double beta = 0.5;
            std::string n = "250,500,1000,2000";
            QuadFlags q;
        };
        auto o = std::make_shared<O>();
        auto* sub = app.add_subcommand("sullivan", "Scaled integrals I_n n^(beta+1/2) for the powfloor sequence");
        sub->add_option("--beta", o->beta, "Exponent beta in (0,1]");
        sub->add_option("--n", o->n, "Increasing step counts: a,b,c or lo:hi[:step]");
        o->q.add(sub, "Absolute tolerance", "Relative tolerance (default 1e-9)");
        add_io(sub, s);
        cmds.emplace_back(sub, [o, &s] {
            const auto ns = parse_index_list(o->n);
            s.spec_canonical = SequenceSpec::power_floor(o->beta).canonical();
            const auto rep = fourier::sullivan_constant_estimate(o->beta, ns, o->q.options(fourier::abs_integral_defaults()));
            std::string csv = "n,value,error,nodes\n";
            bool failed = false;
            json errors = json::array();
            for (const auto& e : rep.entries) {
                if (!e.integral) {
                    failed = true;
                    errors.push_back({{"n", e.n}, {"error", e.error}});
                    csv += std::to_string(e.n) + ",nan,nan,0\n";
                    continue;
                }
                const double scale = std::pow(static_cast<double>(e.n), o->beta + 0.5);
                csv += series_row(e.n, e.scaled, e.integral->abs_error_estimate * scale, e.integral->nodes);
            }
            s.emit(csv);
            s.summary = {{"target", rep.target},
                         {"relative_gap", rep.relative_gap},
                         {"monotone_approach", rep.monotone_approach},
                         {"extrapolated", rep.extrapolated ? json(*rep.extrapolated) : json(nullptr)},
                         {"errors", errors}};
            s.err << "target " << fmt(rep.target) << ", relative gap " << fmt(rep.relative_gap) << ", monotone "
                  << (rep.monotone_approach ? "yes" : "no") << "\n";
            return failed ? kExitCheckFailed : kExitOk;
        });
    }

    {  // transience
        struct O {
            std::string spec;
            std::uint64_t n_max = 0;
            std::int64_t z = 0;
            QuadFlags q;
        };
        auto o = std::make_shared<O>();
        auto* sub = app.add_subcommand("transience", "Series P(S(n)=z) by Fourier inversion with a tail-exponent fit");
        add_spec(sub, o->spec)->required();
        sub->add_option("--n-max", o->n_max, "Largest n")->required();
        sub->add_option("--z", o->z, "Lattice point");
        o->q.add(sub, "Absolute tolerance (default 1e-10)", "Relative tolerance");
        add_io(sub, s);
        cmds.emplace_back(sub, [o, &s] {
            const auto spec = use_spec(s, o->spec);
            require_positive(o->n_max, "--n-max");
            const auto rep = fourier::transience_report(spec, o->n_max, o->z, o->q.options({}));
            std::string csv = "n,value,error,nodes\n";
            json notes = json::array();
            for (const auto& e : rep.entries) {
                csv += series_row(e.n, e.value, e.error, e.nodes);
                if (!e.note.empty()) notes.push_back({{"n", e.n}, {"note", e.note}});
            }
            s.emit(csv);
            const auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
            s.summary = {{"diagnostic", "heuristic"},
                         {"fitted_exponent", opt(rep.fitted_exponent)},
                         {"fitted_intercept", opt(rep.fitted_intercept)},
                         {"fit_points", rep.fit_points},
                         {"summable_trend", rep.summable_trend},
                         {"partial_sum", rep.entries.empty() ? 0.0 : rep.entries.back().partial_sum},
                         {"envelope_exponent", rep.envelope_exponent},
                         {"envelope_nu", opt(rep.envelope_nu)},
                         {"note", rep.note},
                         {"entry_notes", notes}};
            s.err << "fitted exponent "
                  << (rep.fitted_exponent ? fmt(*rep.fitted_exponent) : std::string("n/a (") + rep.note + ")")
                  << ", summable trend " << (rep.summable_trend ? "yes" : "no") << "\n";
            return kExitOk;
        });
    }

    {  // simulate
        struct O {
            std::string spec, bands = "0", checkpoints;
            std::uint64_t horizon = 0, seed = 0, stream = 0, paths = 1;
            double zero_tol = 1e-9;
        };
        auto o = std::make_shared<O>();
        auto* sub = app.add_subcommand("simulate", "Simulate individual paths and print their statistics");
        add_spec(sub, o->spec)->required();
        sub->add_option("--horizon", o->horizon, "Steps per path")->required();
        sub->add_option("--seed", o->seed, "Generator seed")->required();
        sub->add_option("--stream", o->stream, "First stream index");
        sub->add_option("--paths", o->paths, "Number of consecutive streams to simulate");
        sub->add_option("--bands", o->bands, "Band half-widths C, comma separated");
        sub->add_option("--checkpoints", o->checkpoints, "Snapshot step indices, comma separated");
        sub->add_option("--zero-tol", o->zero_tol, "Zero tolerance for real-valued walks");
        add_io(sub, s);
        cmds.emplace_back(sub, [o, &s] {
            const auto spec = use_spec(s, o->spec);
            require_positive(o->horizon, "--horizon");
            require_positive(o->paths, "--paths");
            s.seed = o->seed;
            mc::SimulationConfig cfg;
            cfg.bands = parse_real_list(o->bands);
            if (!o->checkpoints.empty()) cfg.checkpoints = parse_index_list(o->checkpoints);
            cfg.zero_tolerance = o->zero_tol;
            const mc::Walk walk(spec, o->horizon);
            json j;
            j["schema"] = "awalk-paths/1";
            j["spec"] = spec.canonical();
            j["horizon"] = o->horizon;
            j["seed"] = o->seed;
            json paths = json::array();
            for (std::uint64_t p = 0; p < o->paths; ++p) {
                auto pj = path_json(mc::simulate(walk, {o->seed, o->stream + p}, cfg), cfg.bands);
                json e;
                e["stream"] = o->stream + p;
                for (auto it = pj.begin(); it != pj.end(); ++it) e[it.key()] = it.value();
                paths.push_back(std::move(e));
            }
            j["paths"] = paths;
            s.emit(j.dump(2) + "\n");
            return kExitOk;
        });
    }

    struct ExpO {
        std::string spec, checkpoints, format = "json", bands = "0";
        std::uint64_t horizon = 0, paths = 0, seed = 0, resamples = 2000;
        double zero_tol = 1e-9, delta = 0.2;
    };
    const auto add_experiment = [&](CLI::App* sub, ExpO& o) {
        add_spec(sub, o.spec)->required();
        sub->add_option("--horizon", o.horizon, "Steps per path N")->required();
        sub->add_option("--paths", o.paths, "Number of paths P")->required();
        sub->add_option("--seed", o.seed, "Generator seed (path p uses stream p)")->required();
        sub->add_option("--checkpoints", o.checkpoints, "Snapshot step indices; default N/100,N/10,N");
        sub->add_option("--resamples", o.resamples, "Bootstrap resamples");
        sub->add_option("--zero-tol", o.zero_tol, "Zero tolerance for real-valued walks");
        sub->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    };
    const auto experiment_options = [&s](const ExpO& o) {
        require_positive(o.horizon, "--horizon");
        require_positive(o.paths, "--paths");
        s.seed = o.seed;
        mc::ExperimentOptions eo;
        if (!o.checkpoints.empty()) eo.checkpoints = parse_index_list(o.checkpoints);
        eo.bootstrap_resamples = o.resamples;
        eo.zero_tolerance = o.zero_tol;
        s.threads = mc::worker_count();
        return eo;
    };

    {  // recurrence
        auto o = std::make_shared<ExpO>();
        auto* sub = app.add_subcommand("recurrence", "Monte Carlo band-hit counts across checkpoints");
        add_experiment(sub, *o);
        sub->add_option("--bands", o->bands, "Band half-widths C, comma separated");
        add_io(sub, s);
        cmds.emplace_back(sub, [o, &s, experiment_options] {
            const auto spec = use_spec(s, o->spec);
            const auto eo = experiment_options(*o);
            const auto r = mc::recurrence_experiment(spec, o->horizon, parse_real_list(o->bands), o->paths, o->seed, eo);
            s.emit(experiment_output(r, o->format));
            return kExitOk;
        });
    }

    {  // signs
        auto o = std::make_shared<ExpO>();
        auto* sub = app.add_subcommand("signs", "Monte Carlo distribution of sign-change counts");
        add_experiment(sub, *o);
        add_io(sub, s);
        cmds.emplace_back(sub, [o, &s, experiment_options] {
            const auto spec = use_spec(s, o->spec);
            const auto eo = experiment_options(*o);
            s.emit(experiment_output(mc::sign_change_experiment(spec, o->horizon, o->paths, o->seed, eo), o->format));
            return kExitOk;
        });
    }

    {  // growth
        auto o = std::make_shared<ExpO>();
        auto* sub = app.add_subcommand("growth", "Fraction of paths with |S(n)| > n^(beta/2 - delta) on [N/10, N]");
        add_experiment(sub, *o);
        sub->add_option("--delta", o->delta, "Exponent slack delta in (0, beta/2)");
        add_io(sub, s);
        cmds.emplace_back(sub, [o, &s, experiment_options] {
            const auto spec = use_spec(s, o->spec);
            const auto eo = experiment_options(*o);
            s.emit(experiment_output(mc::growth_experiment(spec, o->horizon, o->delta, o->paths, o->seed, eo), o->format));
            return kExitOk;
        });
    }

    {  // tomaszewski
        struct O {
            std::string spec, mode = "exact";
            std::uint64_t n = 0, paths = 100000, seed = 0;
            CLI::Option* seed_opt = nullptr;
        };
        auto o = std::make_shared<O>();
        auto* sub = app.add_subcommand("tomaszewski", "Check P(|S(n)| <= sqrt(sum a_k^2)) >= 1/2");
        add_spec(sub, o->spec)->required();
        sub->add_option("--n", o->n, "Number of steps")->required();
        sub->add_option("--mode", o->mode, "exact or mc")->check(CLI::IsMember({"exact", "mc"}));
        sub->add_option("--paths", o->paths, "Paths in mc mode");
        o->seed_opt = sub->add_option("--seed", o->seed, "Generator seed, required in mc mode");
        add_io(sub, s);
        cmds.emplace_back(sub, [o, &s] {
            const auto spec = use_spec(s, o->spec);
            const bool mc_mode = o->mode == "mc";
            if (mc_mode && !o->seed_opt->count()) throw UsageError("--seed is required with --mode mc");
            if (mc_mode) {
                s.seed = o->seed;
                s.threads = mc::worker_count();
            }
            const auto r = mc::tomaszewski_check(spec, o->n, mc_mode ? mc::TomaszewskiMode::mc : mc::TomaszewskiMode::exact,
                                                 o->paths, o->seed);
            json j;
            j["spec"] = spec.canonical();
            j["n"] = r.n;
            j["mode"] = o->mode;
            j["threshold"] = r.threshold;
            j["exact_probability"] = r.exact_probability ? json(format_rational(*r.exact_probability)) : json(nullptr);
            j["probability"] = r.probability;
            if (mc_mode) {
                j["paths"] = o->paths;
                j["seed"] = o->seed;
                j["std_error"] = r.std_error;
            }
            j["pass"] = r.pass;
            s.emit(j.dump(2) + "\n");
            s.summary = {{"pass", r.pass}, {"probability", r.probability}};
            return r.pass ? kExitOk : kExitCheckFailed;
        });
    }

    {  // verify
        auto suite = std::make_shared<std::string>();
        auto* sub = app.add_subcommand("verify", "Exhaustive and exact verification suites");
        sub->add_option("--suite", *suite, "Suite to run")
            ->required()
            ->check(CLI::IsMember({"inequalities", "oracles", "patterns", "bc"}));
        add_io(sub, s);
        cmds.emplace_back(sub, [suite, &s] {
            const auto r = verify::run_suite(verify::parse_suite(*suite));
            s.emit(verify::to_json(r).dump(2) + "\n");
            json checks = json::object();
            for (const auto& c : r.checks) checks[c.name] = c.pass;
            s.summary = {{"pass", r.pass()}, {"checks", checks}};
            for (const auto& c : r.checks) s.err << (c.pass ? "PASS " : "FAIL ") << c.name << "\n";
            return r.pass() ? kExitOk : kExitCheckFailed;
        });
    }

    {  // pattern
        auto kappa_max = std::make_shared<std::uint64_t>(30);
        auto* sub = app.add_subcommand("pattern", "Counts of +-1 strings avoiding the consecutive pattern (-,+,-)");
        sub->add_option("--kappa-max", *kappa_max, "Largest string length");
        add_io(sub, s);
        cmds.emplace_back(sub, [kappa_max, &s] {
            require_positive(*kappa_max, "--kappa-max");
            std::string csv = "kappa,count,half_ratio\n";
            BigInt cur = exact::avoid_pattern_count(1);
            for (std::uint64_t k = 1; k <= *kappa_max; ++k) {
                const BigInt next = exact::avoid_pattern_count(k + 1);
                csv += std::to_string(k) + "," + cur.str() + "," + fmt(to_double(Rational(next, cur * 2))) + "\n";
                cur = next;
            }
            s.emit(csv);
            return kExitOk;
        });
    }

    {  // bc
        struct O {
            std::string alpha = "inv", eps = "geom:0.5";
            std::uint64_t ell = 1, m = 10000, every = 1;
        };
        auto o = std::make_shared<O>();
        auto* sub = app.add_subcommand("bc", "Iterate the bound b_j = min(1, (1 - alpha_j) b_{j-1} + eps_{j-1})");
        sub->add_option("--alpha", o->alpha, "alpha sequence: const:<x> | inv | pow:<p> | geom:<r> | zero");
        sub->add_option("--eps", o->eps, "eps sequence, same grammar");
        sub->add_option("--ell", o->ell, "Start index");
        sub->add_option("--m", o->m, "Final index");
        sub->add_option("--every", o->every, "Write every k-th trajectory point");
        add_io(sub, s);
        cmds.emplace_back(sub, [o, &s] {
            require_positive(o->every, "--every");
            const auto alpha = mc::BcSequence::parse(o->alpha);
            const auto eps = mc::BcSequence::parse(o->eps);
            const auto r = mc::bc_bound_propagation(alpha, eps, o->ell, o->m);
            std::string csv = "m,bound\n";
            for (std::size_t i = 0; i < r.trajectory.size(); ++i)
                if (i % o->every == 0 || i + 1 == r.trajectory.size())
                    csv += std::to_string(r.ell + i) + "," + fmt(r.trajectory[i]) + "\n";
            s.emit(csv);
            s.summary = {{"alpha", alpha.canonical()}, {"eps", eps.canonical()}, {"bound", r.bound}};
            return kExitOk;
        });
    }

    {  // replay
        auto from = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto force = std::make_shared<bool>(false);
        auto* sub = app.add_subcommand("replay", "Re-run a manifest and compare output digests");
        sub->add_option("--from", *from, "Manifest to replay")->required();
        sub->add_option("--out", *out, "Output path for the re-run; default <recorded out>.replay");
        sub->add_flag("--force", *force, "Overwrite existing files");
        cmds.emplace_back(sub, [from, out, force, &s] {
            std::ifstream in(*from);
            if (!in) throw UsageError("cannot read manifest '" + *from + "'");
            nlohmann::json m;
            try {
                in >> m;
            } catch (const nlohmann::json::exception& e) {
                throw UsageError("manifest is not valid JSON: " + std::string(e.what()));
            }
            const auto recorded = m.at("argv").get<std::vector<std::string>>();
            if (recorded.empty() || recorded.front() == "replay") throw UsageError("manifest has no replayable command");
            const auto& outputs = m.at("outputs");
            if (outputs.empty()) throw UsageError("manifest records no outputs");
            const std::string old_path = outputs.front().at("path").get<std::string>();
            const std::string old_digest = outputs.front().at("sha256").get<std::string>();

            std::vector<std::string> args = {"awalk"};
            for (std::size_t i = 0; i < recorded.size(); ++i) {
                const std::string& a = recorded[i];
                if (a == "--out" || a == "--manifest") {
                    ++i;
                    continue;
                }
                if (a == "--force" || a.rfind("--out=", 0) == 0 || a.rfind("--manifest=", 0) == 0) continue;
                args.push_back(a);
            }
            std::string new_path;
            if (old_path != "-") {
                new_path = out->empty() ? old_path + ".replay" : *out;
                args.insert(args.end(), {"--out", new_path});
            } else if (!out->empty()) {
                new_path = *out;
                args.insert(args.end(), {"--out", new_path});
            }
            if (*force) args.push_back("--force");

            std::ostringstream captured;
            const int code = run(args, new_path.empty() ? captured : s.out, s.err);
            if (code != kExitOk) return code;
            std::string digest;
            if (new_path.empty()) {
                digest = sha256_hex(captured.str());
                s.out << captured.str();
            } else {
                std::ifstream f(new_path, std::ios::binary);
                std::stringstream bytes;
                bytes << f.rdbuf();
                digest = sha256_hex(bytes.str());
            }
            const bool match = digest == old_digest;
            s.err << (match ? "MATCH " : "MISMATCH ") << digest << "\n";
            return match ? kExitOk : kExitCheckFailed;
        });
    }

    return cmds;
}

}  // namespace awalk::cli
