#pragma once

namespace kerrj {

inline constexpr const char* kVersion = "0.1.0";

// Entry point of the kerrjunction tool. Returns the process exit code:
// 0 ok, 2 config/usage, 3 numerical invariant violated, 4 I/O.
int run_cli(int argc, const char* const* argv);

} // namespace kerrj
