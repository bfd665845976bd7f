#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pcdfpca::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 2,
  kDataValidation = 3,
  kNumericalFailure = 4,
};

/// Runs the command line `args` (args[0] is the program name). Human-readable
/// summaries go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pcdfpca::cli
