#pragma once
/**
 * @file scenario_io.hpp
 * @brief Scenario documents (YAML) to and from Scenario values.
 *
 * Layout, one document per file:
 *
 *     topology:
 *       nodes: [A, B, s1]
 *       links: [[A, s1, 0.1], [s1, B, 0.1]]
 *       paths:
 *         - {id: P1, hops: [A, s1, B], schedule: [[0, 1.0], [60000, 4.0]], jitter_std_ms: 0.0}
 *     users:
 *       - {id: A, class: premium, d0_ms: 0, ladder: [[44100, 512], [48000, 256]], mode_floor_index: 1}
 *     sessions:
 *       - {tx: A, rx: B, initial_mode_index: 0}
 *     probe:  {interval_ms: 500, alpha: 1.0}
 *     policy: {hysteresis_ms: 2, backup_premium: 2, backup_regular: 1, upgrade_guard_ms: 1, switch_latency_ms: 0}
 *     budget: {ept_ms: 25}
 *     run:    {duration_ms: 260000, seed: 42}
 *
 * `topology`, `users`, `sessions` and `run` are required; `probe`, `policy`
 * and `budget` fall back to defaults key by key. Unknown keys are errors.
 * A node is a user exactly when a `users` entry names it.
 */

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nmp/scenario.hpp"

namespace nmp {

struct ParseResult {
    std::optional<Scenario> scenario;
    std::vector<std::string> errors;

    bool ok() const noexcept { return scenario.has_value(); }
};

/// Either a fully validated scenario or every problem found; never both.
ParseResult parse_scenario(std::string_view document);

/// parse_scenario() on a file; an unreadable file yields one error naming it.
ParseResult load_scenario(const std::filesystem::path& path);

std::string serialize_scenario(const Scenario& scenario);

}  // namespace nmp
