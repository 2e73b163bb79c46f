#pragma once

#include <iosfwd>

namespace besselheat::cli {

enum ExitCode : int {
    kSuccess = 0,
    kVerificationFailed = 1,
    kUsageError = 2,
};

/// Runs the command line `argv` (argv[0] is the program name).  Results go
/// to `out` unless --output names a file; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace besselheat::cli
