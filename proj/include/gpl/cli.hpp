#pragma once

#include <iosfwd>

namespace gpl::cli {

enum ExitCode : int { ok = 0, usage = 1, data = 2, degenerate = 3 };

// Entry point of the `gpl` command; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gpl::cli
