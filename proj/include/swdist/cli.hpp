#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace swdist::cli {

enum ExitCode : int { kOk = 0, kInternalError = 1, kUsageError = 2 };

/// Runs the command line `args` (args[0] is the program name). Reports go to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace swdist::cli
