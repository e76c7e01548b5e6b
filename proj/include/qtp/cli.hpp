#pragma once

namespace qtp {

/// Entry point for the `qtp` binary. Returns 0 on success, 1 on usage
/// errors, 2 on data errors and 3 on internal errors.
int run_cli(int argc, char** argv);

}  // namespace qtp
