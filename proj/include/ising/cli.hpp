#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ising::cli
{

/// Stable exit-code contract of the command-line tool.
enum ExitCode : int
{
    Success = 0,
    IoFailure = 1,
    UsageError = 2,
    ValidationFailure = 3,
};

/// Runs `ising <subcommand> ...`; args[0] is the program name. Normal output goes to `out`, diagnostics to `err`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

} // namespace ising::cli
