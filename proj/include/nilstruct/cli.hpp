#pragma once

#include <string>
#include <vector>

namespace nilstruct {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

// Exit codes: 0 check passed, 1 check failed, 2 manifest/usage error,
// 3 numerical abort (singular metric, evaluation domain error).
struct RunResult {
  int exit_code = 0;
  std::string output;  // the JSON report (or error report)
};

// Runs one CLI invocation; `args` excludes the program name. Writes the
// report to --out and trajectories to --csv when those flags are present,
// and always returns the report text.
RunResult run_cli(const std::vector<std::string>& args);

}  // namespace nilstruct
