#pragma once

#include <iosfwd>

namespace trackpp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Entry point for the `trackpp` tool. Subcommands: simulate, track, eval,
/// pairgen, report. Failures print one line "trackpp: error (<kind>): <message>"
/// to `err` and return kExitUsage or kExitData.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace trackpp::cli
