#include "awalk/cli.hpp"

#include "commands.hpp"

#include "awalk/error.hpp"
#include "awalk/numeric.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace awalk::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 digest failed");
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return hex.str();
}

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    std::ostringstream s;
    s << buf << '.' << std::setw(3) << std::setfill('0') << ms << 'Z';
    return s.str();
}

std::string config_scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return v.dump();
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_array()) {
        std::string s;
        for (const auto& e : v) s += (s.empty() ? "" : ",") + config_scalar(e);
        return s;
    }
    throw UsageError("unsupported config value " + v.dump());
}

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
    for (const auto& a : args)
        if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
}

void write_file(const std::string& path, const std::string& bytes, bool force) {
    if (fs::exists(path) && !force) throw UsageError("refusing to overwrite '" + path + "' without --force");
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw UsageError("cannot open '" + path + "' for writing");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw UsageError("failed writing '" + path + "'");
}

}  // namespace

std::vector<std::string> merge_config(const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    std::vector<std::string> merged;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            ++i;
            continue;
        }
        if (args[i].rfind("--config=", 0) == 0) continue;
        merged.push_back(args[i]);
    }
    if (path.empty()) return merged;

    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file '" + path + "'");
    nlohmann::json cfg;
    try {
        in >> cfg;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
    const std::string sub = merged.size() > 1 ? merged[1] : "";
    nlohmann::json flat = nlohmann::json::object();
    for (auto it = cfg.begin(); it != cfg.end(); ++it)
        if (!it.value().is_object()) flat[it.key()] = it.value();
    if (cfg.contains(sub) && cfg[sub].is_object())
        for (auto it = cfg[sub].begin(); it != cfg[sub].end(); ++it) flat[it.key()] = it.value();
    for (auto it = flat.begin(); it != flat.end(); ++it) {
        const std::string flag = "--" + it.key();
        if (has_flag(merged, flag)) continue;
        if (it.value().is_boolean()) {
            if (it.value().get<bool>()) merged.push_back(flag);
            continue;
        }
        merged.push_back(flag);
        merged.push_back(config_scalar(it.value()));
    }
    return merged;
}

// ---------------------------------------------------------------- Session

void Session::emit(const std::string& bytes) {
    if (out_path.empty()) {
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        outputs.push_back({{"path", "-"}, {"bytes", bytes.size()}, {"sha256", sha256_hex(bytes)}});
        return;
    }
    write_file(out_path, bytes, force);
    outputs.push_back({{"path", out_path}, {"bytes", bytes.size()}, {"sha256", sha256_hex(bytes)}});
}

void Session::check_writable() const {
    for (const auto& p : {out_path, manifest_path()})
        if (!p.empty() && fs::exists(p) && !force)
            throw UsageError("refusing to overwrite '" + p + "' without --force");
}

std::string Session::manifest_path() const {
    if (!manifest_override.empty()) return manifest_override;
    if (!out_path.empty()) return out_path + ".manifest.json";
    return "";
}

void Session::write_manifest(const CLI::App& sub, int exit_code) const {
    const std::string path = manifest_path();
    if (path.empty()) return;
    json m;
    m["schema"] = "awalk-manifest/1";
    m["tool"] = "awalk";
    m["version"] = kVersion;
    m["subcommand"] = sub.get_name();
    m["argv"] = std::vector<std::string>(argv.begin() + 1, argv.end());
    json params = json::object();
    for (const CLI::Option* opt : sub.get_options()) {
        if (opt->get_lnames().empty()) continue;
        const std::string name = opt->get_lnames().front();
        if (name == "help") continue;
        const bool flag = opt->get_items_expected_max() == 0;
        if (opt->count() > 0) {
            const auto& res = opt->results();
            if (flag) params[name] = true;
            else if (res.size() == 1) params[name] = res.front();
            else params[name] = res;
        } else if (!opt->get_default_str().empty()) {
            params[name] = opt->get_default_str();
        } else if (flag) {
            params[name] = false;
        } else {
            params[name] = nullptr;
        }
    }
    m["parameters"] = params;
    m["spec"] = spec_canonical.empty() ? json(nullptr) : json(spec_canonical);
    m["seed"] = seed ? json(*seed) : json(nullptr);
    m["threads"] = threads ? json(*threads) : json(nullptr);
    m["started_at"] = started_at;
    m["finished_at"] = utc_now();
    m["exit_code"] = exit_code;
    m["outputs"] = outputs;
    m["summary"] = summary;
    write_file(path, m.dump(2) + "\n", true);
}

// -------------------------------------------------------------------- run

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    if (raw_args.empty()) return kExitUsage;
    std::vector<std::string> args;
    try {
        args = merge_config(raw_args);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    Session session(out, err);
    session.argv = args;
    session.started_at = utc_now();

    CLI::App app{"Exact, numerical and simulated distributions of weighted +-1 random walks.", "awalk"};
    app.set_version_flag("--version", std::string("awalk ") + kVersion);
    app.require_subcommand(1);
    app.footer(
        "Sequence specs: " + std::string(seq::SequenceSpec::grammar()) +
        "\n\nExit codes: 0 success; 2 usage or precondition error; 3 resource limit; 4 tolerance or check failure."
        "\nEnvironment: AWALK_THREADS caps the simulation worker pool.");
    app.option_defaults()->always_capture_default();
    const auto commands = register_commands(app, session);

    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    const CLI::App* sub = nullptr;
    std::function<int()> action;
    for (const auto& [cmd, fn] : commands)
        if (cmd->parsed()) {
            sub = cmd;
            action = fn;
        }

    int code = kExitOk;
    try {
        session.check_writable();
        code = action();
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        code = kExitUsage;
    } catch (const UnsupportedError& e) {
        err << "error: " << e.what() << "\n";
        code = kExitUsage;
    } catch (const ResourceError& e) {
        err << "error: " << e.what() << " (needs " << e.required_bytes() << " bytes)\n";
        code = kExitResource;
    } catch (const ToleranceError& e) {
        err << "error: " << e.what() << "; best value " << format_double(e.best_value()) << ", error estimate "
            << format_double(e.achieved_error()) << "\n";
        session.summary["best_value"] = e.best_value();
        session.summary["achieved_error"] = e.achieved_error();
        code = kExitCheckFailed;
    } catch (const std::bad_alloc&) {
        err << "error: out of memory\n";
        code = kExitResource;
    }
    try {
        session.write_manifest(*sub, code);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return code;
}

int run(int argc, const char* const argv[]) {
    return run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

}  // namespace awalk::cli
