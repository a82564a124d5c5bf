#pragma once

#include <iosfwd>

namespace surfmax {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitRuntimeError = 2;

/// Entry point of the `surfmax` command line tool. Subcommands: attack,
/// bench, cdf, rbf-fit, landscape. The default seed comes from --seed, then
/// the SURFMAX_SEED environment variable, then 0.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace surfmax
