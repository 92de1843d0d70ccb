#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace momentmap {

/// Exit codes of the momentmap command line.
enum ExitCode : int { exit_ok = 0, exit_failed_check = 1, exit_usage = 2 };

/// Runs the momentmap command line. `args` excludes the program name.
/// Results go to `out`; diagnostics and usage synopses go to `err`.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace momentmap
