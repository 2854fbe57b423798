#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace whitelasso::cli {

enum ExitCode { kOk = 0, kRuntimeFailure = 1, kValidationError = 2 };

// Runs one command line (without the program name). Data goes to `out`,
// messages and progress to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace whitelasso::cli
