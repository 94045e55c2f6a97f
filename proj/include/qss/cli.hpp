#pragma once

#include <string>
#include <vector>

namespace qss::cli {

enum ExitCode : int {
  kSuccess = 0,
  kAssertionFailure = 1,
  kConfigError = 2,
};

/// Entry point shared by the `qss` binary and the tests.
/// Subcommands: run | table | validate | security.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

}  // namespace qss::cli
