#pragma once

#include <ostream>

namespace socdiff::cli {

// Exit codes of every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // data, I/O or verification failure
inline constexpr int kExitUsage = 2;    // bad flags, rejected before any work starts

// Entry point of the `socdiff` tool. Summaries go to out, diagnostics to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace socdiff::cli
