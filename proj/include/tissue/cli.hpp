#pragma once

#include <iosfwd>

namespace tissue {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_data = 2, exit_runtime = 3 };

/// The experiment harness: `tissue <subcommand> ...`. Files a failing
/// subcommand created are removed before it returns.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Stand-alone replay client: `tcreplay --log <path> [--strace] [--rate r]
/// [--addr host:port] [--map file]`.
int run_tcreplay(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tissue
