// Command-line experiment runner.
//
// Subcommands: simulate, precession, scan, error-curve, predict, averages, bench.
// Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace keplerlab::cli {

enum ExitCode : int { kSuccess = 0, kUsageError = 1, kNumericalFailure = 2 };

/// Runs one command line; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace keplerlab::cli
