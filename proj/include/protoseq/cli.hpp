#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace protoseq {

// Exit codes shared by every subcommand.
inline constexpr int kExitHolds = 0;
inline constexpr int kExitViolated = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line `args` (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// 64-bit FNV-1a, printed as 16 hex digits; used for config digests.
std::string fnv1a_hex(const std::string& data);

} // namespace protoseq
