#pragma once

#include <iosfwd>

namespace effgap::cli {

enum ExitCode : int {
  kOk = 0,
  kInvalidInput = 1,  // parse or validation failure
  kUsage = 2,
  kInfeasible = 3,
};

// Runs the command line and returns the exit status. Reports go to `out`,
// diagnostics to `err`. Every run writes one JSON manifest line, to `err`
// or to the file named by --manifest.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace effgap::cli
