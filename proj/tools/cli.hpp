#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mvsde::cli {

enum ExitCode : int { kSuccess = 0, kFailure = 1, kConfigError = 2, kNumericalFailure = 3 };

/// Entry point of the `mvsde` tool. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace mvsde::cli
