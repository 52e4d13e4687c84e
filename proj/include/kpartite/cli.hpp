#pragma once

#include <iosfwd>

namespace kpartite {

enum ExitCode : int {
  kExitOk = 0,
  kExitAssumption = 1,  // validation, assumption or verification failure
  kExitSynthesis = 2,
  kExitIo = 3,  // unreadable input, malformed document, bad flags
};

/// Entry point of the kpartite tool. Reports go to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kpartite
