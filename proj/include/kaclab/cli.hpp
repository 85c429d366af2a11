#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kaclab {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,
  kExitUsage = 2,
  kExitNumeric = 3,
};

inline constexpr const char* kArtifactVersion = "0.1.0";

/// Runs one command line (args excludes the program name). Output files go
/// under --out; progress and diagnostics go to out/err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace kaclab
