#pragma once
/**
 * @file delay_model.hpp
 * @brief Delay arithmetic for a networked music performance session.
 *
 * End-to-end delay is the sound-card (blocking) delay paid at both the
 * transmitter and the receiver plus the one-way network delay. Blocking delay
 * is one hardware tick, frame size over sampling rate, plus a card-specific
 * constant d0. All quantities are milliseconds held in doubles.
 */

#include <string>
#include <vector>

namespace nmp {

/// Maximum tolerable end-to-end delay for musicians to stay in sync.
inline constexpr double kDefaultEptMs = 25.0;

/// Sampling rate / frame size pair. Fields are validated where used.
struct AudioMode {
    int sampling_rate_hz{};
    int frame_size_samples{};

    friend bool operator==(const AudioMode&, const AudioMode&) = default;
};

/// "44100/512"
std::string to_string(const AudioMode& mode);

/// Hardware constant plus the mode ladder, highest preference first.
struct SoundCardProfile {
    double d0_ms{0.0};
    std::vector<AudioMode> supported_modes;

    friend bool operator==(const SoundCardProfile&, const SoundCardProfile&) = default;
};

struct DelayBudget {
    double ept_ms{kDefaultEptMs};

    friend bool operator==(const DelayBudget&, const DelayBudget&) = default;
};

struct DelaySample {
    double at_ms{};
    double one_way_delay_ms{};

    friend bool operator==(const DelaySample&, const DelaySample&) = default;
};

/// Violations of the card invariants (non-empty ladder, no duplicate or
/// non-positive modes, d0 >= 0). Empty when valid.
std::vector<std::string> validate_card(const SoundCardProfile& card);

/// 1000 * frame / rate + d0. Throws Error(invalid_mode) for non-positive mode
/// fields and Error(invalid_argument) for a negative d0.
double blocking_delay(const AudioMode& mode, const SoundCardProfile& card);

/// Symmetric equipment: 2 * sound_card + network.
double end_to_end_delay(double sound_card_delay_ms, double network_delay_ms);

/// Asymmetric equipment: tx + rx + network.
double end_to_end_delay(double tx_sound_card_delay_ms, double rx_sound_card_delay_ms,
                        double network_delay_ms);

/// Inclusive: a delay exactly at the threshold still meets it.
bool meets_ept(double e2e_ms, const DelayBudget& budget);

}  // namespace nmp
