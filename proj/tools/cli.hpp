#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nmp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

/// Runs one nmpsim invocation. `args` excludes the program name.
///
///   run       --scenario F [--trace OUT.csv] [--baseline none|no-adapt|pinned] [overrides]
///   compare   --scenario F [--baseline no-adapt|pinned] [--format text|csv] [overrides]
///   validate  --scenario F
///   summarize --trace IN.csv [--ept-ms X]
///
/// overrides: --seed N --probe-interval-ms X --alpha A --hysteresis-ms H
///            --backup-premium N --backup-regular N
///
/// Exit 0 on success, 1 on bad arguments or an invalid scenario, 2 when the
/// run itself or writing its output fails. No trace file is left behind on
/// any failure.
int main_with_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nmp::cli
