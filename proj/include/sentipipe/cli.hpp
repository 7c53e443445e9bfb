#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace sentipipe {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitValidation = 4;
inline constexpr int kExitDegenerate = 5;

/// Runs the command line `args` (args[0] is the program name). Human-readable
/// progress goes to `out`, with one JSON summary object as the final line;
/// errors go to `err`.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace sentipipe
