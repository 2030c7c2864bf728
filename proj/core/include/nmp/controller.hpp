#pragma once
/**
 * @file controller.hpp
 * @brief Path assignment and hysteresis rerouting for audio flows.
 *
 * Every function takes the session's candidate paths in topology declaration
 * order; that order breaks ties between equal estimates. Decisions are pure
 * functions of (assignment, snapshot, policy).
 */

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nmp/monitoring.hpp"
#include "nmp/network.hpp"

namespace nmp {

enum class UserClass { premium, regular };

inline constexpr double kDefaultHysteresisMs = 2.0;

struct ReroutePolicy {
    /// A candidate must beat the active path by at least this much.
    double hysteresis_ms{kDefaultHysteresisMs};
    std::size_t backup_count_premium{2};
    std::size_t backup_count_regular{1};

    std::size_t backup_count(UserClass cls) const noexcept {
        return cls == UserClass::premium ? backup_count_premium : backup_count_regular;
    }

    std::vector<std::string> validate() const;

    friend bool operator==(const ReroutePolicy&, const ReroutePolicy&) = default;
};

struct FlowAssignment {
    std::string session_id;
    PathId active_path;
    /// Best-first by estimate; never contains active_path.
    std::vector<PathId> backups;
    double installed_at_ms{};
    std::size_t backup_capacity{};
};

struct RerouteRecord {
    double at_ms{};
    std::string session_id;
    PathId from_path;
    PathId to_path;
    double from_estimate_ms{};
    double to_estimate_ms{};
};

struct RerouteOutcome {
    FlowAssignment assignment;
    RerouteRecord record;
};

/// Lowest-estimate measured candidate becomes active, the next best fill the
/// class's backup slots. Throws Error(no_path) if no candidate is measured.
FlowAssignment assign_initial_path(const std::string& session_id, UserClass cls,
                                   std::span<const PathId> candidates, const DelaySnapshot& snapshot,
                                   const ReroutePolicy& policy, double t_ms);

/// Best candidate if it improves on the active path by >= hysteresis, else
/// nullopt. All candidates are eligible, not only the backups. Throws
/// Error(stale_snapshot) when the active path has no estimate.
std::optional<PathId> reroute_decision(const FlowAssignment& assignment, std::span<const PathId> candidates,
                                       const DelaySnapshot& snapshot, const ReroutePolicy& policy);

/// Moves the flow to `new_path`. The old active path joins the backups, which
/// are re-sorted by estimate and trimmed from the worst end to capacity.
/// Throws Error(invalid_path) for an unknown or already-active target.
RerouteOutcome apply_reroute(const FlowAssignment& assignment, const PathId& new_path,
                             std::span<const PathId> candidates, const DelaySnapshot& snapshot, double t_ms);

}  // namespace nmp
