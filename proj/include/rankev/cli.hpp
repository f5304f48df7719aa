#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rankev {

inline constexpr const char* kOutputDirEnv = "RANKEV_OUTPUT_DIR";

enum ExitCode : int { kExitOk = 0, kExitConfigError = 1, kExitNumericalFailure = 2 };

/// Entry point behind the `rankev` executable. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rankev
