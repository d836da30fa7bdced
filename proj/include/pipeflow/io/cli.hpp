#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pipeflow::io {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_regime = 2 };

/// Runs one subcommand (periodic, ibvp, stability, convergence, validate).
/// `args` excludes the program name. Errors go to `err` as
/// `ERROR <code>: <message>` lines.
int cli_dispatch(std::vector<std::string> const &args, std::ostream &out, std::ostream &err);

int cli_dispatch(int argc, char const *const *argv, std::ostream &out, std::ostream &err);

} // namespace pipeflow::io
