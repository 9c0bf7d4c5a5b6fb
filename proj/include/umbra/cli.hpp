#pragma once

#include <string>
#include <vector>

namespace umbra::cli {

// Exit codes of the tool.
inline constexpr int kExitShadow = 0;        // shadow certified (or command succeeded)
inline constexpr int kExitNoShadow = 1;      // no-shadow certified
inline constexpr int kExitUndecided = 2;
inline constexpr int kExitUsage = 3;         // usage or parse error
inline constexpr int kExitNumerical = 4;     // internal numerical failure

struct RunResult {
    int exitCode = 0;
    std::string report;  // machine-readable JSON document
    std::string text;    // human-readable summary lines
};

/// Executes one subcommand. args excludes the program name, e.g.
/// {"verify", "scene.json", "--seed", "7"}.
RunResult run(const std::vector<std::string>& args);

}  // namespace umbra::cli
