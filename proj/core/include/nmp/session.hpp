#pragma once
/**
 * @file session.hpp
 * @brief User audio profiles and the audio-mode degrade/upgrade rules.
 *
 * A session streams audio from tx_user to rx_user. Its mode index points into
 * the transmitter's ladder; the receiver must support the same mode. When the
 * best available path cannot meet the delay budget at the current mode the
 * session steps down the ladder to the nearest mode that fits. When it fits
 * again with room to spare (the upgrade guard) it returns straight to the
 * best mode that fits.
 */

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nmp/controller.hpp"
#include "nmp/delay_model.hpp"
#include "nmp/trace.hpp"

namespace nmp {

inline constexpr double kDefaultUpgradeGuardMs = 1.0;

struct UserProfile {
    std::string user_id;
    SoundCardProfile card;
    UserClass user_class{UserClass::regular};
    /// Lowest acceptable ladder index. Only meaningful for premium users.
    std::optional<std::size_t> mode_floor_index;

    /// Premium: the configured floor (or the last entry); regular: last entry.
    std::size_t floor_index() const;

    friend bool operator==(const UserProfile&, const UserProfile&) = default;
};

struct AdaptationPolicy {
    double upgrade_guard_ms{kDefaultUpgradeGuardMs};
    double switch_latency_ms{0.0};

    std::vector<std::string> validate() const;

    friend bool operator==(const AdaptationPolicy&, const AdaptationPolicy&) = default;
};

struct SessionState {
    std::string session_id;
    std::string tx_user;
    std::string rx_user;
    std::size_t mode_index{};
    DelayBudget budget;
    double upgrade_guard_ms{kDefaultUpgradeGuardMs};
    double switch_latency_ms{0.0};
};

struct ModeProfile {
    AudioMode mode;
    double blocking_ms{};
};

/// Blocking delay per ladder entry, in ladder order.
using AudioProfile = std::vector<ModeProfile>;

/// Throws Error(configuration) if the card is invalid (empty ladder included).
AudioProfile profile_user(const SoundCardProfile& card);

/// validate_card() plus: blocking delay strictly decreases down the ladder.
std::vector<std::string> validate_ladder(const SoundCardProfile& card);

struct SessionProfiles {
    AudioProfile tx;
    AudioProfile rx;
    /// Stricter of the two endpoint floors.
    std::size_t floor_index{};

    std::size_t ladder_size() const noexcept { return tx.size(); }
    const AudioMode& mode_at(std::size_t index) const { return tx.at(index).mode; }
};

SessionProfiles make_session_profiles(const UserProfile& tx, const UserProfile& rx);

struct EndpointBlocking {
    double tx_ms{};
    double rx_ms{};
};

/// Throws Error(invalid_argument) for an index off the ladder and
/// Error(mode_mismatch) if the receiver lacks the transmitter's mode.
EndpointBlocking blocking_at(const SessionProfiles& profiles, std::size_t mode_index);

double session_e2e_at(const SessionProfiles& profiles, std::size_t mode_index, double network_delay_ms);

double session_e2e(const SessionState& session, double network_delay_ms, const SessionProfiles& profiles);

enum class ModeAction { hold, degrade, upgrade, best_effort };

std::string_view to_string(ModeAction action);

struct ModeDecision {
    ModeAction action{ModeAction::hold};
    /// Target ladder index for degrade/upgrade; the floor for best_effort.
    std::size_t target_index{};

    friend bool operator==(const ModeDecision&, const ModeDecision&) = default;
};

/// `best_path_delay_ms` is the minimum estimate across the session's
/// candidate paths, so a violation here means every path is congested.
ModeDecision mode_switch_decision(const SessionState& session, double best_path_delay_ms,
                                  const SessionProfiles& profiles);

struct SwitchContext {
    std::string active_path;
    double network_delay_ms{};
    /// Best-path delay that triggered the decision.
    double trigger_delay_ms{};
};

/// Applies a degrade/upgrade to `session` and returns the mode-switch row,
/// stamped at t + switch_latency_ms. Throws Error(floor_violation) for a
/// degrade past the floor and Error(invalid_argument) for anything that is not
/// a real move along the ladder.
TraceEvent notify_application(SessionState& session, const ModeDecision& decision, double t_ms,
                              const SessionProfiles& profiles, const SwitchContext& ctx);

}  // namespace nmp
