#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rlar::cli {

enum ExitCode : int { kSuccess = 0, kBadArguments = 2, kDataError = 3, kNumericalFailure = 4 };

/// Parses `args` (without the program name) and runs the selected command.
/// Messages go to `out`/`err`; the return value is the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rlar::cli
