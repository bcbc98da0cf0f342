#pragma once

#include "awalk/sequences.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace CLI {
class App;
}

namespace awalk::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Bad invocation detected after argument parsing.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Per-invocation state shared by the command handlers.
struct Session {
    Session(std::ostream& o, std::ostream& e) : out(o), err(e) {}

    std::ostream& out;
    std::ostream& err;
    std::vector<std::string> argv;
    std::string started_at;
    std::string out_path;
    std::string manifest_override;
    bool force = false;
    std::string spec_canonical;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    nlohmann::ordered_json outputs = nlohmann::ordered_json::array();
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();

    /// Writes to --out, or to stdout when none was given, and records the digest.
    void emit(const std::string& bytes);
    void check_writable() const;
    std::string manifest_path() const;
    void write_manifest(const CLI::App& sub, int exit_code) const;
};

using Command = std::pair<CLI::App*, std::function<int()>>;

std::vector<Command> register_commands(CLI::App& app, Session& session);

seq::SequenceSpec parse_spec(const std::string& text);
/// "a,b,c", "lo:hi" or "lo:hi:step" (inclusive).
std::vector<std::uint64_t> parse_index_list(const std::string& text);
std::vector<double> parse_real_list(const std::string& text);

}  // namespace awalk::cli
