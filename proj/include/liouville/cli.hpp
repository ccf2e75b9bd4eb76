#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace liouville::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kArgument = 2,
  kGeneration = 3,
  kNumeric = 4,
};

/// Runs `liouville_lab <args...>`; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace liouville::cli
