#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace isocorr::cli {

/// Process exit codes.
enum ExitCode : int {
    kSuccess = 0,
    kUnexpected = 1,
    kValidation = 2,
    kNumerical = 3,
    kIo = 4,
};

/// Runs the command line `isocorr <args...>` (args excludes the program
/// name). Progress goes to `out`, warnings and errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace isocorr::cli
