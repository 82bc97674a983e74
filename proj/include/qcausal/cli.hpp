#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qcausal::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 2,
  kNumericalError = 3,
  kInsufficientData = 4,
};

/// Runs one command line (without the program name). Data goes to `out` or
/// the --out file, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qcausal::cli
