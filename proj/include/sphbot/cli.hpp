#pragma once

#include <iosfwd>

namespace sphbot {

enum ExitCode : int {
  kExitOk = 0,
  kExitNumericalFailure = 1,
  kExitValidationError = 2,
};

/// Entry point of the `sphbot` command line tool:
///
///   sphbot simulate --config <path> --out <dir> [--sweep <param=min:max:steps>]
///   sphbot analyze --traj <csv> --config <path> --out <dir>
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sphbot
