#include "nmp/session.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "nmp/errors.hpp"

namespace nmp {

std::size_t UserProfile::floor_index() const {
    const std::size_t last = card.supported_modes.empty() ? 0 : card.supported_modes.size() - 1;
    if (user_class == UserClass::premium && mode_floor_index) {
        return std::min(*mode_floor_index, last);
    }
    return last;
}

std::vector<std::string> AdaptationPolicy::validate() const {
    std::vector<std::string> out;
    if (!(upgrade_guard_ms >= 0.0) || !std::isfinite(upgrade_guard_ms)) {
        out.push_back(fmt::format("upgrade_guard_ms must be >= 0 (got {})", upgrade_guard_ms));
    }
    if (!(switch_latency_ms >= 0.0) || !std::isfinite(switch_latency_ms)) {
        out.push_back(fmt::format("switch_latency_ms must be >= 0 (got {})", switch_latency_ms));
    }
    return out;
}

AudioProfile profile_user(const SoundCardProfile& card) {
    if (auto bad = validate_card(card); !bad.empty()) {
        throw Error(ErrorCode::configuration, bad.front());
    }
    AudioProfile out;
    out.reserve(card.supported_modes.size());
    for (const auto& m : card.supported_modes) {
        out.push_back({m, blocking_delay(m, card)});
    }
    return out;
}

std::vector<std::string> validate_ladder(const SoundCardProfile& card) {
    auto out = validate_card(card);
    if (!out.empty()) {
        return out;
    }
    const auto& modes = card.supported_modes;
    for (std::size_t i = 1; i < modes.size(); ++i) {
        const double prev = blocking_delay(modes[i - 1], card);
        const double cur = blocking_delay(modes[i], card);
        if (!(cur < prev)) {
            out.push_back(fmt::format("ladder ordering: {} ({:.4f} ms) does not have less blocking delay than {} "
                                      "({:.4f} ms) above it",
                                      to_string(modes[i]), cur, to_string(modes[i - 1]), prev));
        }
    }
    return out;
}

SessionProfiles make_session_profiles(const UserProfile& tx, const UserProfile& rx) {
    SessionProfiles p;
    p.tx = profile_user(tx.card);
    p.rx = profile_user(rx.card);
    p.floor_index = std::min({tx.floor_index(), rx.floor_index(), p.tx.size() - 1});
    return p;
}

EndpointBlocking blocking_at(const SessionProfiles& profiles, std::size_t mode_index) {
    if (mode_index >= profiles.tx.size()) {
        throw Error(ErrorCode::invalid_argument,
                    fmt::format("mode index {} is off a {}-entry ladder", mode_index, profiles.tx.size()));
    }
    const auto& tx = profiles.tx[mode_index];
    auto rx = std::find_if(profiles.rx.begin(), profiles.rx.end(),
                           [&](const ModeProfile& m) { return m.mode == tx.mode; });
    if (rx == profiles.rx.end()) {
        throw Error(ErrorCode::mode_mismatch, "receiver does not support mode " + to_string(tx.mode));
    }
    return {tx.blocking_ms, rx->blocking_ms};
}

double session_e2e_at(const SessionProfiles& profiles, std::size_t mode_index, double network_delay_ms) {
    const auto b = blocking_at(profiles, mode_index);
    return end_to_end_delay(b.tx_ms, b.rx_ms, network_delay_ms);
}

double session_e2e(const SessionState& session, double network_delay_ms, const SessionProfiles& profiles) {
    return session_e2e_at(profiles, session.mode_index, network_delay_ms);
}

std::string_view to_string(ModeAction action) {
    switch (action) {
    case ModeAction::hold: return "hold";
    case ModeAction::degrade: return "degrade";
    case ModeAction::upgrade: return "upgrade";
    case ModeAction::best_effort: return "best-effort";
    }
    return "unknown";
}

ModeDecision mode_switch_decision(const SessionState& session, double best_path_delay_ms,
                                  const SessionProfiles& profiles) {
    const std::size_t cur = session.mode_index;
    const DelayBudget with_guard{session.budget.ept_ms - session.upgrade_guard_ms};

    if (meets_ept(session_e2e_at(profiles, cur, best_path_delay_ms), session.budget)) {
        for (std::size_t j = 0; j < cur; ++j) {
            if (meets_ept(session_e2e_at(profiles, j, best_path_delay_ms), with_guard)) {
                return {ModeAction::upgrade, j};
            }
        }
        return {ModeAction::hold, cur};
    }
    for (std::size_t j = cur + 1; j <= profiles.floor_index; ++j) {
        if (meets_ept(session_e2e_at(profiles, j, best_path_delay_ms), session.budget)) {
            return {ModeAction::degrade, j};
        }
    }
    return {ModeAction::best_effort, profiles.floor_index};
}

TraceEvent notify_application(SessionState& session, const ModeDecision& decision, double t_ms,
                              const SessionProfiles& profiles, const SwitchContext& ctx) {
    const std::size_t from = session.mode_index;
    const std::size_t to = decision.target_index;
    switch (decision.action) {
    case ModeAction::degrade:
        if (to > profiles.floor_index) {
            throw Error(ErrorCode::floor_violation,
                        fmt::format("session {}: degrade to index {} passes the floor {}", session.session_id, to,
                                    profiles.floor_index));
        }
        if (to <= from) {
            throw Error(ErrorCode::invalid_argument,
                        fmt::format("session {}: degrade from {} to {} is not a step down", session.session_id,
                                    from, to));
        }
        break;
    case ModeAction::upgrade:
        if (to >= from) {
            throw Error(ErrorCode::invalid_argument,
                        fmt::format("session {}: upgrade from {} to {} is not a step up", session.session_id,
                                    from, to));
        }
        break;
    default:
        throw Error(ErrorCode::invalid_argument,
                    fmt::format("session {}: '{}' is not an audio mode change", session.session_id,
                                to_string(decision.action)));
    }

    const auto blocking = blocking_at(profiles, to);
    session.mode_index = to;
    const auto& old_mode = profiles.mode_at(from);
    const auto& new_mode = profiles.mode_at(to);
    return make_trace_row(t_ms + session.switch_latency_ms, session.session_id, TraceEventType::mode_switch,
                          ctx.active_path, new_mode, ctx.network_delay_ms, blocking.tx_ms, blocking.rx_ms,
                          fmt::format("{} {}->{} trigger_ms={:.4f}", to_string(decision.action),
                                      to_string(old_mode), to_string(new_mode), ctx.trigger_delay_ms));
}

}  // namespace nmp
