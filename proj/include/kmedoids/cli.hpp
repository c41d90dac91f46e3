#pragma once

#include <cstdint>
#include <iosfwd>

namespace kmedoids {

inline constexpr std::uint64_t default_seed = 12345;
/// Environment variable replacing default_seed when --seed is not given.
inline constexpr const char* seed_env_var = "KMEDOIDS_SEED";

enum ExitCode : int { exit_ok = 0, exit_input_error = 2, exit_not_converged = 3 };

/// Entry point of the `kmedoids` tool with subcommands cluster, bench and convert.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kmedoids
