// Acceptance runner: one PASS/FAIL line per criterion, sub-checks indented.
// Usage: acceptance <path-to-awalk> <work-dir>

#include "awalk/exact.hpp"
#include "awalk/fourier.hpp"
#include "awalk/montecarlo.hpp"
#include "awalk/verify.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

namespace fs = std::filesystem;
using namespace awalk;
using seq::SequenceSpec;

namespace {

struct Line {
    std::string id;
    bool pass;
    std::string detail;
};

struct Outcome {
    std::vector<Line> sub;
    bool pass() const {
        for (const auto& l : sub)
            if (!l.pass) return false;
        return true;
    }
};

std::string num(double x) {
    std::ostringstream s;
    s.precision(6);
    s << x;
    return s.str();
}

std::vector<SequenceSpec> battery() {
    return {SequenceSpec::constant(1), SequenceSpec::linear(), SequenceSpec::power_floor(0.5),
            SequenceSpec::power_floor(0.8), SequenceSpec::explicit_values({1, 2, 3, 5, 8})};
}

// Gray-code walk over all sign vectors; counts[(s + A) / 2].
std::vector<std::uint64_t> enumerate(const std::vector<std::int64_t>& w) {
    std::int64_t total = 0;
    for (auto a : w) total += a;
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(total + 1), 0);
    std::int64_t s = -total;
    std::vector<int> sign(w.size(), -1);
    const std::uint64_t n = w.size();
    ++counts[static_cast<std::size_t>((s + total) / 2)];
    for (std::uint64_t g = 1; g < (1ULL << n); ++g) {
        const int bit = __builtin_ctzll(g);
        s += 2 * sign[bit] * -w[bit];
        sign[bit] = -sign[bit];
        ++counts[static_cast<std::size_t>((s + total) / 2)];
    }
    return counts;
}

Outcome criterion1() {
    std::uint64_t cases = 0, bad = 0;
    for (const auto& spec : battery())
        for (std::uint64_t n = 1; n <= 18; ++n) {
            ++cases;
            const auto brute = enumerate(spec.integer_step_weights(n));
            const auto dist = exact::distribution(spec, n);
            bool same = dist.counts.size() == brute.size();
            for (std::size_t i = 0; same && i < brute.size(); ++i) same = dist.counts[i] == brute[i];
            bad += !same;
        }
    return {{{"1", bad == 0, std::to_string(cases) + " (spec, n) pairs, " + std::to_string(bad) + " mismatches"}}};
}

Outcome criterion2() {
    const auto lin = SequenceSpec::linear();
    const int expected[8] = {0, 0, 2, 2, 0, 0, 8, 14};
    bool small = true;
    for (std::uint64_t n = 1; n <= 8; ++n) small = small && exact::signed_count(lin, n, 0) == expected[n - 1];
    bool zeros = true;
    for (std::uint64_t n = 1; n <= 120; ++n)
        if (n % 4 == 1 || n % 4 == 2) zeros = zeros && exact::signed_count(lin, n, 0) == 0;
    Outcome o;
    o.sub.push_back({"2.small", small, "Q_1..Q_8 = 0,0,2,2,0,0,8,14"});
    o.sub.push_back({"2.zeros", zeros, "Q_n = 0 for n mod 4 in {1,2}, n <= 120"});
    for (std::uint64_t n : {103, 104}) {
        const double frac = to_double(Rational(exact::signed_count(lin, n, 0), pow2(n)));
        const double ratio = frac * std::pow(static_cast<double>(n), 1.5) / std::sqrt(6.0 / std::numbers::pi);
        o.sub.push_back({"2.ratio" + std::to_string(n), ratio >= 0.9 && ratio <= 1.1, "ratio " + num(ratio)});
    }
    return o;
}

Outcome criterion3() {
    double worst = 0;
    for (const auto& spec : battery())
        for (std::uint64_t n : {10, 30, 50}) {
            const auto dist = exact::distribution(spec, n);
            for (std::int64_t z : {0, 1, -1, 5, -5})
                worst = std::max(worst, std::fabs(fourier::point_mass_fourier(spec, n, z).value -
                                                  to_double(dist.probability(z))));
        }
    return {{{"3", worst <= 1e-8, "max |fourier - exact| = " + num(worst)}}};
}

Outcome criterion4() {
    const auto r = fourier::sullivan_constant_estimate(0.5, {250, 500, 1000, 2000});
    std::string values;
    for (const auto& e : r.entries) values += (values.empty() ? "" : ", ") + num(e.scaled);
    Outcome o;
    o.sub.push_back({"4.monotone", r.monotone_approach, "c_n = " + values});
    o.sub.push_back({"4.gap", r.relative_gap <= 0.15,
                     "|c_2000 - " + num(r.target) + "| / target = " + num(r.relative_gap)});
    return o;
}

Outcome criterion5() {
    Outcome o;
    const auto add = [&](const std::string& id, const verify::Check& c, const std::string& detail) {
        o.sub.push_back({id, c.pass, detail});
    };
    const auto az = verify::azuma_sweep(12);
    add("5a", az, az.details["lists"].dump() + " lists, " + az.details["comparisons"].dump() + " comparisons, min slack " +
                      num(az.details["min_slack"].get<double>()));

    const auto ld = verify::local_sweep(Rational(1, 10), 2000);
    o.sub.push_back({"5b", ld.threshold && *ld.threshold <= 64 && *ld.threshold == 1,
                     "m0 = " + (ld.threshold ? std::to_string(*ld.threshold) : std::string("none")) +
                         " (limit 64, frozen 1)"});
    const auto cd = verify::residue_sweep(Rational(1, 20), 40, 4000);
    o.sub.push_back({"5c", cd.threshold && *cd.threshold == 1,
                     "k1 = " + (cd.threshold ? std::to_string(*cd.threshold) : std::string("none")) + " (frozen 1)"});
    const auto dn = verify::two_scale_sweep(Rational(1, 400), 20);
    o.sub.push_back({"5d", dn.threshold && *dn.threshold == 2,
                     "k2 = " + (dn.threshold ? std::to_string(*dn.threshold) : std::string("none")) + " (frozen 2)"});

    const auto dom = verify::dominance_sweep(10);
    add("5e", dom, dom.details["cases"].dump() + " cases, " + dom.details["failures"].dump() + " failures");
    const auto tom = verify::tomaszewski_battery(20);
    add("5f", tom, tom.details["cases"].dump() + " cases, minimum " + tom.details["minimum"]["probability"].get<std::string>() +
                       " at " + tom.details["minimum"]["spec"].get<std::string>());
    return o;
}

Outcome criterion6() {
    bool match = true;
    for (std::uint64_t k = 1; k <= 20; ++k) {
        std::uint64_t brute = 0;
        for (std::uint64_t m = 0; m < (1ULL << k); ++m) {
            // bit 1 = +1; the pattern -,+,- is 0,1,0
            const std::uint64_t hit = ~m & (m >> 1) & ~(m >> 2) & ((1ULL << (k >= 2 ? k - 2 : 0)) - 1);
            brute += k < 3 || hit == 0;
        }
        match = match && exact::avoid_pattern_count(k) == brute;
    }
    const double r30 = to_double(Rational(exact::avoid_pattern_count(31), exact::avoid_pattern_count(30)));
    Outcome o;
    o.sub.push_back({"6.enum", match, "kappa <= 20 against enumeration"});
    o.sub.push_back({"6.ratio", std::fabs(r30 / 2 - 0.877) <= 0.005, "r_30 / 2 = " + num(r30 / 2)});
    return o;
}

Outcome criterion7() {
    const auto r = mc::bc_bound_propagation(mc::BcSequence::parse("inv"), mc::BcSequence::parse("geom:0.5"), 1, 10000);
    const auto z = mc::bc_bound_propagation(mc::BcSequence::parse("inv"), mc::BcSequence::parse("zero"), 1, 10000);
    const bool mono = std::is_sorted(z.trajectory.rbegin(), z.trajectory.rend());
    Outcome o;
    o.sub.push_back({"7.bound", r.bound <= 0.01, "bound " + num(r.bound)});
    o.sub.push_back({"7.monotone", mono, "eps = 0 trajectory non-increasing"});
    return o;
}

// ------------------------------------------------------------ Monte Carlo

struct Run {
    std::string name;
    std::vector<std::string> args;
};

const std::vector<Run>& mc_runs() {
    static const std::vector<Run> runs = {
        {"8a_linear", {"recurrence", "--spec", "linear", "--horizon", "100000", "--paths", "10000", "--seed", "81",
                       "--checkpoints", "10000,100000"}},
        {"8b_linear", {"signs", "--spec", "linear", "--horizon", "1000000", "--paths", "1000", "--seed", "82"}},
        {"8b_constant", {"signs", "--spec", "constant:1", "--horizon", "1000000", "--paths", "1000", "--seed", "82"}},
        {"8c_large", {"growth", "--spec", "powfloor:0.5", "--delta", "0.2", "--horizon", "1000000", "--paths", "1000",
                      "--seed", "83"}},
        {"8c_small", {"growth", "--spec", "powfloor:0.5", "--delta", "0.2", "--horizon", "1000", "--paths", "1000",
                      "--seed", "83"}},
        {"8d_logceil", {"recurrence", "--spec", "logceil:2", "--bands", "0", "--horizon", "1000000", "--paths", "1000",
                        "--seed", "84", "--checkpoints", "10000,100000,1000000"}},
        {"8d_logcont", {"recurrence", "--spec", "logcont:1.4426950408889634", "--bands", "3", "--horizon", "1000000",
                        "--paths", "1000", "--seed", "84", "--checkpoints", "10000,100000,1000000"}},
        {"8d_linear", {"recurrence", "--spec", "linear", "--bands", "0", "--horizon", "1000000", "--paths", "1000",
                       "--seed", "84", "--checkpoints", "10000,100000,1000000"}},
    };
    return runs;
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

bool run_cli(const std::string& awalk, const Run& run, const fs::path& out, const char* threads) {
    std::string cmd = std::string("AWALK_THREADS=") + threads + " " + quote(awalk);
    for (const auto& a : run.args) cmd += " " + quote(a);
    cmd += " --force --out " + quote(out.string()) + " 2>&1";
    return std::system(cmd.c_str()) == 0;
}

nlohmann::json load(const fs::path& p) {
    std::ifstream f(p);
    return nlohmann::json::parse(f);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

const nlohmann::json& summary_for(const nlohmann::json& r, const std::string& target) {
    for (const auto& s : r["hit_summaries"])
        if (s["target"] == target) return s;
    throw std::runtime_error("missing hit summary " + target);
}

Outcome criterion8(const std::string& awalk, const fs::path& dir) {
    Outcome o;
    for (const auto& run : mc_runs())
        if (!run_cli(awalk, run, dir / (run.name + ".t1.json"), "1")) {
            o.sub.push_back({"8", false, "awalk failed for " + run.name});
            return o;
        }
    const auto rep = [&](const std::string& name) { return load(dir / (name + ".t1.json")); };

    const double a = summary_for(rep("8a_linear"), "zero")["final_decade_fraction"];
    o.sub.push_back({"8a", a <= 0.05, "Linear fraction with a zero hit at n >= 1e4: " + num(a) + " (<= 0.05)"});

    for (const char* name : {"8b_linear", "8b_constant"}) {
        const auto r = rep(name);
        const double f = r["sign_change_cdf"].back()["fraction_at_least_k"][9];
        o.sub.push_back({name, f >= 0.99, r["spec"].get<std::string>() + " fraction with >= 10 sign changes: " + num(f) +
                                              " (>= 0.99)"});
    }

    const double big = rep("8c_large")["growth"]["fraction"];
    const double small = rep("8c_small")["growth"]["fraction"];
    o.sub.push_back({"8c.level", big >= 0.95, "fraction |S(n)| > n^0.05 on [1e5, 1e6]: " + num(big) + " (>= 0.95)"});
    o.sub.push_back({"8c.trend", big > small, "N = 1e6 " + num(big) + " > N = 1e3 " + num(small)});

    const auto ratio_line = [&](const std::string& id, const std::string& name, const std::string& target, bool recurrent) {
        const auto report = rep(name);
        const auto& s = summary_for(report, target);
        const double lo = s["growth_ratio"]["lo95"], hi = s["growth_ratio"]["hi95"];
        const double dlo = s["growth_difference"]["lo95"], dhi = s["growth_difference"]["hi95"];
        const bool pass = recurrent ? lo > 1.5 : hi < 1.5;
        o.sub.push_back({id, pass,
                         report["spec"].get<std::string>() + " [" + target + "] hits(1e6)/hits(1e4) 95% CI [" +
                             num(lo) + ", " + num(hi) + "], needs " + (recurrent ? "lo > 1.5" : "hi < 1.5") +
                             "; difference CI [" + num(dlo) + ", " + num(dhi) + "]"});
    };
    ratio_line("8d.logceil", "8d_logceil", "zero", true);
    ratio_line("8d.logcont", "8d_logcont", "C=3", true);
    ratio_line("8d.linear", "8d_linear", "zero", false);
    return o;
}

Outcome criterion9(const std::string& awalk, const fs::path& dir) {
    Outcome o;
    std::size_t same = 0;
    for (const auto& run : mc_runs()) {
        const auto t1 = dir / (run.name + ".t1.json");
        const auto t4 = dir / (run.name + ".t4.json");
        const bool ok = fs::exists(t1) && run_cli(awalk, run, t4, "4") && slurp(t1) == slurp(t4);
        same += ok;
        if (!ok) o.sub.push_back({"9." + run.name, false, "reports differ between 1 and 4 threads"});
    }
    o.sub.push_back({"9", same == mc_runs().size(),
                     std::to_string(same) + "/" + std::to_string(mc_runs().size()) +
                         " reports byte-identical for AWALK_THREADS=1 and 4"});
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: acceptance <awalk> <work-dir>\n";
        return 2;
    }
    const std::string awalk = argv[1];
    const fs::path dir = argv[2];
    fs::create_directories(dir);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 exact distribution equals enumeration", criterion1},
        {"2 Q_n regression", criterion2},
        {"3 Fourier and DP agree", criterion3},
        {"4 scaled integrals approach sqrt(16 pi)", criterion4},
        {"5 inequality suites", criterion5},
        {"6 pattern counts", criterion6},
        {"7 bound recursion", criterion7},
        {"8 Monte Carlo signatures", [&] { return criterion8(awalk, dir); }},
        {"9 determinism across thread counts", [&] { return criterion9(awalk, dir); }},
    };

    int failed = 0;
    for (const auto& [title, fn] : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.sub.push_back({"error", false, e.what()});
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (o.pass() ? "PASS " : "FAIL ") << title << " (" << num(secs) << " s)\n";
        for (const auto& l : o.sub)
            std::cout << "     " << (l.pass ? "pass " : "FAIL ") << l.id << ": " << l.detail << "\n";
        std::cout.flush();
        failed += !o.pass();
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << "\n";
    return failed == 0 ? 0 : 1;
}
