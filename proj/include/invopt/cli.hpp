#pragma once

#include <iosfwd>

namespace invopt {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitInvalid = 1,        // bad flags, bad input files, I/O failures
  kExitVerifyFailed = 2,   // a verification property was violated
};

/// Entry point behind the `invopt` binary. Subcommands:
///   run            experiment harness -> raw and worst-case CSVs
///   verify         lemma-level property suites on fresh instances
///   project        project a vector onto the simplex
///   solve-forward  solve one instance (JSON) at given weights
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace invopt
