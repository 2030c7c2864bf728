#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nmp/controller.hpp"
#include "nmp/delay_model.hpp"
#include "nmp/monitoring.hpp"
#include "nmp/network.hpp"
#include "nmp/session.hpp"

namespace nmp {

struct SessionSpec {
    std::string tx;
    std::string rx;
    std::size_t initial_mode_index{};

    /// "tx->rx"
    std::string id() const { return tx + "->" + rx; }

    friend bool operator==(const SessionSpec&, const SessionSpec&) = default;
};

/// Everything one simulation run needs.
struct Scenario {
    Topology topology;
    std::vector<UserProfile> users;
    std::vector<SessionSpec> sessions;
    ProbeConfig probe;
    ReroutePolicy policy;
    AdaptationPolicy adaptation;
    DelayBudget budget;
    double duration_ms{};
    std::uint64_t seed{};

    const UserProfile* find_user(std::string_view id) const;

    /// Paths joining the session's endpoints, in declaration order.
    std::vector<PathId> candidate_paths(const SessionSpec& session) const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Every cross-reference and invariant violation; empty when runnable.
std::vector<std::string> validate_scenario(const Scenario& scenario);

}  // namespace nmp
