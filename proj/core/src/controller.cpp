#include "nmp/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "nmp/errors.hpp"

namespace nmp {

std::vector<std::string> ReroutePolicy::validate() const {
    std::vector<std::string> out;
    if (!(hysteresis_ms > 0.0) || !std::isfinite(hysteresis_ms)) {
        out.push_back(fmt::format("hysteresis_ms must be > 0 (got {})", hysteresis_ms));
    }
    if (backup_count_premium < backup_count_regular) {
        out.push_back(fmt::format("backup_premium ({}) must be >= backup_regular ({})", backup_count_premium,
                                  backup_count_regular));
    }
    return out;
}

namespace {

constexpr double kUnmeasured = std::numeric_limits<double>::infinity();

double estimate_or_inf(const DelaySnapshot& snapshot, const PathId& id) {
    auto it = snapshot.find(id);
    return it == snapshot.end() ? kUnmeasured : it->second;
}

std::ptrdiff_t declaration_index(std::span<const PathId> candidates, const PathId& id) {
    auto it = std::find(candidates.begin(), candidates.end(), id);
    return it == candidates.end() ? std::numeric_limits<std::ptrdiff_t>::max() : it - candidates.begin();
}

// Stable sort keeps declaration order among equal estimates as long as the
// input is in declaration order.
void sort_by_estimate(std::vector<PathId>& ids, std::span<const PathId> candidates, const DelaySnapshot& snapshot) {
    std::sort(ids.begin(), ids.end(), [&](const PathId& a, const PathId& b) {
        const double ea = estimate_or_inf(snapshot, a);
        const double eb = estimate_or_inf(snapshot, b);
        if (ea != eb) {
            return ea < eb;
        }
        return declaration_index(candidates, a) < declaration_index(candidates, b);
    });
}

}  // namespace

FlowAssignment assign_initial_path(const std::string& session_id, UserClass cls,
                                   std::span<const PathId> candidates, const DelaySnapshot& snapshot,
                                   const ReroutePolicy& policy, double t_ms) {
    std::vector<PathId> measured;
    for (const auto& id : candidates) {
        if (snapshot.contains(id)) {
            measured.push_back(id);
        }
    }
    if (measured.empty()) {
        throw Error(ErrorCode::no_path, "session " + session_id + " has no measured candidate path");
    }
    sort_by_estimate(measured, candidates, snapshot);

    FlowAssignment out;
    out.session_id = session_id;
    out.active_path = measured.front();
    out.installed_at_ms = t_ms;
    out.backup_capacity = policy.backup_count(cls);
    const auto n = std::min(out.backup_capacity, measured.size() - 1);
    out.backups.assign(measured.begin() + 1, measured.begin() + 1 + static_cast<std::ptrdiff_t>(n));
    return out;
}

std::optional<PathId> reroute_decision(const FlowAssignment& assignment, std::span<const PathId> candidates,
                                       const DelaySnapshot& snapshot, const ReroutePolicy& policy) {
    auto active = snapshot.find(assignment.active_path);
    if (active == snapshot.end()) {
        throw Error(ErrorCode::stale_snapshot,
                    "snapshot has no estimate for active path " + assignment.active_path);
    }
    const PathId* best = nullptr;
    double best_ms = kUnmeasured;
    for (const auto& id : candidates) {
        if (id == assignment.active_path) {
            continue;
        }
        auto it = snapshot.find(id);
        if (it != snapshot.end() && it->second < best_ms) {
            best = &id;
            best_ms = it->second;
        }
    }
    if (best && active->second - best_ms >= policy.hysteresis_ms) {
        return *best;
    }
    return std::nullopt;
}

RerouteOutcome apply_reroute(const FlowAssignment& assignment, const PathId& new_path,
                             std::span<const PathId> candidates, const DelaySnapshot& snapshot, double t_ms) {
    if (new_path == assignment.active_path) {
        throw Error(ErrorCode::invalid_path, "reroute target " + new_path + " is already the active path");
    }
    if (std::find(candidates.begin(), candidates.end(), new_path) == candidates.end()) {
        throw Error(ErrorCode::invalid_path, "reroute target " + new_path + " is not a candidate path");
    }
    auto from = snapshot.find(assignment.active_path);
    auto to = snapshot.find(new_path);
    if (from == snapshot.end() || to == snapshot.end()) {
        throw Error(ErrorCode::stale_snapshot, "snapshot lacks an estimate for " +
                                                   (from == snapshot.end() ? assignment.active_path : new_path));
    }

    RerouteOutcome out;
    out.assignment = assignment;
    out.assignment.active_path = new_path;
    out.assignment.installed_at_ms = t_ms;

    auto& backups = out.assignment.backups;
    std::erase(backups, new_path);
    backups.push_back(assignment.active_path);
    sort_by_estimate(backups, candidates, snapshot);
    if (backups.size() > out.assignment.backup_capacity) {
        backups.resize(out.assignment.backup_capacity);
    }

    out.record = {t_ms, assignment.session_id, assignment.active_path, new_path, from->second, to->second};
    return out;
}

}  // namespace nmp
