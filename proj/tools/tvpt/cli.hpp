#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tvpt::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNumeric = 1;
inline constexpr int kExitUsage = 2;

/// Parses a grid of the form "lo:hi:step" (or a single value) into
/// lo, lo + step, ... up to hi. Throws std::invalid_argument when lo > hi,
/// step <= 0 or a field is not a number.
std::vector<double> parse_grid(const std::string& spec);

/// Runs the tvpt command line with argv[0] as the program name. Primary
/// outputs go to --out (or `out` when --out is "-"), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tvpt::cli
