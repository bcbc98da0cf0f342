#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace awalk::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitResource = 3;
inline constexpr int kExitCheckFailed = 4;

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const argv[]);

/// Builds the manifest-relevant argument list after merging a JSON config file.
std::vector<std::string> merge_config(const std::vector<std::string>& args);

/// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(const std::string& bytes);

}  // namespace awalk::cli
