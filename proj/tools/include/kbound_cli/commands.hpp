#pragma once

#include <iosfwd>

namespace kbound::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_invariant = 1,
    exit_config = 2,
    exit_budget = 3,
};

/// Entry point of the kbound tool. Results go to `out` unless --out is given.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kbound::cli
