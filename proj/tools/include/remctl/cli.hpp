#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace remctl::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kRuntime = 2,
  kRandFailed = 3,
};

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace remctl::cli
