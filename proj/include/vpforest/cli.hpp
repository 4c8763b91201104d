#pragma once

namespace vpforest {

/// Entry point for the `vpforest` command line tool. Returns the process
/// exit code: 0 on success (including expected-overflow sweep cells), 2 on
/// usage errors, 3 on runtime failures.
int run_cli(int argc, char** argv);

}  // namespace vpforest
