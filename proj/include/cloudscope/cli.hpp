#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace cloudscope::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_data = 2;

/// Command-line entry point. `args` excludes the program name. Returns 0 on
/// success, 1 on usage errors, 2 on data errors; diagnostics go to `err` as a
/// single line.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

} // namespace cloudscope::cli
