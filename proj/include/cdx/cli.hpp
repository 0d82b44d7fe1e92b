#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cdx::cli {

inline constexpr int kExitAlarm = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNoAlarm = 3;

/// Runs the `cdx` command line. args excludes the program name. Results go to
/// `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cdx::cli
