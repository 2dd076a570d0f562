#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ventmon::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kIoError = 3,
  kDataError = 4,
};

/// Entry point shared by the `ventmon` binary and the tests. `args` excludes
/// the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ventmon::cli
