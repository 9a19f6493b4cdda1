#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mvsp::cli {

enum ExitCode : int {
    kSuccess = 0,
    kInfeasible = 1,
    kUsage = 2,
    kNoIncumbent = 3,
};

/// Runs the command line `args` (without the program name). Normal output goes to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mvsp::cli
