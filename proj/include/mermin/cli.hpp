#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mermin::cli {

enum ExitCode : int {
    kSuccess = 0,
    kIoError = 1,
    kConfigError = 2,
    kVerificationFailed = 3,
};

/// Runs the command line `args` (args[0] is the program name) and returns
/// the process exit code. Human-readable output goes to `out`, diagnostics
/// to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mermin::cli
