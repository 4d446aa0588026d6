#pragma once

#include <iosfwd>

namespace hylo::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigInvalid = 2,
  kNumericalFailure = 3,
  kGateFailed = 4,
};

// Entry point of hylosolve; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& err);

}  // namespace hylo::cli
