#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace stormlet {

/// Exit codes of the command line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 1,
  kExitUnsupported = 2,
  kExitTimeout = 3,
};

/// Runs the command line tool on `args` (without the program name). The
/// report goes to `out`, warnings and errors to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stormlet
