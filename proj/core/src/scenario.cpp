#include "nmp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

namespace nmp {

const UserProfile* Scenario::find_user(std::string_view id) const {
    auto it = std::find_if(users.begin(), users.end(), [&](const UserProfile& u) { return u.user_id == id; });
    return it == users.end() ? nullptr : &*it;
}

std::vector<PathId> Scenario::candidate_paths(const SessionSpec& session) const {
    std::vector<PathId> out;
    for (const auto& p : topology.paths) {
        if (p.connects(session.tx, session.rx)) {
            out.push_back(p.id);
        }
    }
    return out;
}

namespace {

void append(std::vector<std::string>& out, const std::vector<std::string>& more, std::string_view prefix = {}) {
    for (const auto& m : more) {
        out.push_back(prefix.empty() ? m : fmt::format("{}: {}", prefix, m));
    }
}

}  // namespace

std::vector<std::string> validate_scenario(const Scenario& s) {
    std::vector<std::string> out;

    std::vector<EndpointPair> endpoints;
    for (const auto& sess : s.sessions) {
        endpoints.push_back({sess.tx, sess.rx});
    }
    append(out, validate_topology(s.topology, endpoints));

    std::set<std::string_view> user_ids;
    for (const auto& u : s.users) {
        const auto where = fmt::format("user {}", u.user_id);
        if (!user_ids.insert(u.user_id).second) {
            out.push_back(fmt::format("duplicate {}", where));
        }
        const Node* node = s.topology.find_node(u.user_id);
        if (!node) {
            out.push_back(fmt::format("{} is not a topology node", where));
        } else if (node->kind != NodeKind::user) {
            out.push_back(fmt::format("{} is marked as a switch in the topology", where));
        }
        append(out, validate_ladder(u.card), where);
        if (u.mode_floor_index && !u.card.supported_modes.empty()) {
            const auto last = u.card.supported_modes.size() - 1;
            if (*u.mode_floor_index > last) {
                out.push_back(fmt::format("{}: mode_floor_index {} is off the ladder", where, *u.mode_floor_index));
            } else if (u.user_class == UserClass::regular && *u.mode_floor_index != last) {
                out.push_back(fmt::format("{}: regular users have the last ladder entry as floor", where));
            }
        }
    }
    for (const auto& n : s.topology.nodes) {
        if (n.kind == NodeKind::user && !user_ids.contains(n.id)) {
            out.push_back(fmt::format("user node {} has no user declaration", n.id));
        }
    }

    if (s.sessions.empty()) {
        out.emplace_back("no sessions declared");
    }
    std::set<std::string> session_ids;
    for (const auto& sess : s.sessions) {
        const auto where = fmt::format("session {}", sess.id());
        if (!session_ids.insert(sess.id()).second) {
            out.push_back(fmt::format("duplicate {}", where));
        }
        const auto* tx = s.find_user(sess.tx);
        const auto* rx = s.find_user(sess.rx);
        if (!tx || !rx) {
            out.push_back(fmt::format("{}: unknown user {}", where, !tx ? sess.tx : sess.rx));
            continue;
        }
        if (sess.tx == sess.rx) {
            out.push_back(fmt::format("{}: transmitter and receiver are the same user", where));
        }
        if (tx->card.supported_modes != rx->card.supported_modes) {
            out.push_back(fmt::format("{}: endpoints have different mode ladders", where));
        }
        const auto floor = std::min(tx->floor_index(), rx->floor_index());
        if (sess.initial_mode_index > floor) {
            out.push_back(fmt::format("{}: initial_mode_index {} is below the floor {}", where,
                                      sess.initial_mode_index, floor));
        }
    }

    append(out, s.probe.validate());
    append(out, s.policy.validate());
    append(out, s.adaptation.validate());
    if (!(s.budget.ept_ms > 0.0) || !std::isfinite(s.budget.ept_ms)) {
        out.push_back(fmt::format("ept_ms must be > 0 (got {})", s.budget.ept_ms));
    }
    if (!(s.duration_ms > 0.0) || !std::isfinite(s.duration_ms)) {
        out.push_back(fmt::format("duration_ms must be > 0 (got {})", s.duration_ms));
    }
    return out;
}

}  // namespace nmp
