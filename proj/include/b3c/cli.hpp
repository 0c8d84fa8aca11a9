#pragma once

#include <string>
#include <vector>

namespace b3c {

// Exit codes, one per error class, so scripts can branch on failures.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;      // unknown subcommand / flag
inline constexpr int kExitConfig = 3;     // bad config key, type, or range
inline constexpr int kExitIo = 4;         // unreadable or corrupt file
inline constexpr int kExitDimension = 5;  // incompatible shapes
inline constexpr int kExitProtocol = 6;   // API misuse (e.g. step after done)
inline constexpr int kExitInternal = 9;   // anything else

// Entry point shared by the binary and in-process tests. Errors are reported
// as a single `error: [kind] message` line on stderr. The vector overload
// excludes the program name.
int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args);

}  // namespace b3c
