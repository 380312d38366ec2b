#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace citerank::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kNotConverged = 2,
  kDegenerate = 3,
};

/// Runs one command line (without the program name). Tables go to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace citerank::cli
