#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nngraph::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,        // runtime failure, e.g. eigensolver did not converge
  kExitUsage = 2,          // unknown subcommand or flag, malformed value or config
  kExitInvalidRange = 3,   // parameter outside its valid range
  kExitUnreadableInput = 4,
};

/// Runs one command line (without the program name). Primary output goes to
/// `out`, diagnostics and progress to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nngraph::cli
