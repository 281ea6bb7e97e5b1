#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pitchstyle::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. `args` excludes the program name. Usage problems
/// return kExitUsage with help on `err`; processing errors return
/// kExitFailure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pitchstyle::cli
