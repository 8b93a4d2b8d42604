#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rlab::cli {

enum ExitCode : int { kAllHold = 0, kViolation = 1, kUsageError = 2 };

/// Environment variable overriding the default enumeration cap.
inline constexpr const char* kEnumCapEnv = "RLAB_ENUM_CAP";

/// Parses `start:stop:step` (inclusive of stop within 1e-9 steps) or a
/// comma-separated list. The result must be non-empty and strictly
/// ascending.
std::vector<double> parse_grid(const std::string& text);

/// Comma-separated list of reals.
std::vector<double> parse_list(const std::string& text);

/// One value per line; blank lines and `#` comments skipped.
std::vector<double> read_values_file(const std::string& path);

/// Runs one subcommand. args excludes the program name. Reports go to
/// `out`, diagnostics to `err`; the return value is an ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rlab::cli
