#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vesselaug::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kIo = 2, kData = 3 };

/// Entry point behind the `vesselaug` binary. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vesselaug::cli
