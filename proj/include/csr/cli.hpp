#pragma once

#include <iosfwd>

namespace csr {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

// Entry point of the `csr` tool: subcommands synth, train, eval, plot and
// report. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace csr
