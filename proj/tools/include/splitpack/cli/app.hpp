#pragma once

#include <iosfwd>

namespace splitpack::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,  // bad flags or unreadable input
  kTargetUnreachable = 3,
};

/// Runs the command line. Prompts for a larger part budget on `in` only when
/// `interactive_tty` is set and --non-interactive is absent.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out,
        std::ostream& err, bool interactive_tty = false);

}  // namespace splitpack::cli
