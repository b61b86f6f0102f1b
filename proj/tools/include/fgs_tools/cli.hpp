#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fgs::tools {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRuntime = 3;

// Parses `args` (without the program name) and runs one subcommand:
// convert, stats, run, predict, eval. Errors are reported on `err`; the
// return value is the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fgs::tools
