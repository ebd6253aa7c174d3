#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace edwards::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Parses argv (argv[0] is the program name), runs one subcommand and writes
/// its table to out (or to --output, via a temporary sibling and rename).
/// Diagnostics go to err. Nothing reaches out unless the run succeeds.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

/// Writes text to path through a temporary file in the same directory.
void write_atomic(const std::string& path, const std::string& text);

/// "key = value" lines with '#' comments. Throws std::runtime_error on a
/// malformed line or a repeated key.
std::vector<std::pair<std::string, std::string>> parse_config(const std::string& text);

}  // namespace edwards::cli
