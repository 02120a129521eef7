#pragma once

#include <ostream>

namespace raiju::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,  // gradcheck over tolerance
  kExitUsage = 2,
  kExitValidation = 3,
  kExitIo = 4,
  kExitContract = 5,
};

/// Entry point shared by the binary and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace raiju::cli
