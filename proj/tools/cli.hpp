#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fgl::cli {

/// Exit codes: 0 success, 1 usage or data error, 2 solver non-convergence.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 2;

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fgl::cli
