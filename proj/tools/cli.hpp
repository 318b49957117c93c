#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fvcg::cli {

enum ExitCode : int {
  kSuccess = 0,
  kPropertyFailure = 1,
  kConfigError = 2,
  kNumericalAbort = 3,
};

// Runs the command line `args` (args[0] is the program name). Normal output
// goes to `out`, diagnostics to `err`. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fvcg::cli
