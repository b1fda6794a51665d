#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace survmap::cli {

inline constexpr const char* kToolName = "survmap";
inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kInvalidInput = 2,
  kInfeasible = 3,
  kIoFailure = 4,
};

/// Runs one invocation. `args` excludes the program name. The report goes to
/// `out` (or the --out file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace survmap::cli
