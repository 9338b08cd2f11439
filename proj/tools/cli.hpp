#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace latentdim::cli {

/// Stable exit codes.
enum ExitCode : int {
  kSuccess = 0,
  kMismatch = 1,
  kInputError = 2,
  kResourceCap = 3,
  kConvergenceWarning = 4,
};

/// Runs `latentdim <args...>` writing reports to `out` and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace latentdim::cli
