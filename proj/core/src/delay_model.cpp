#include "nmp/delay_model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "nmp/errors.hpp"

namespace nmp {

std::string to_string(const AudioMode& mode) {
    return fmt::format("{}/{}", mode.sampling_rate_hz, mode.frame_size_samples);
}

std::vector<std::string> validate_card(const SoundCardProfile& card) {
    std::vector<std::string> out;
    if (!(card.d0_ms >= 0.0) || !std::isfinite(card.d0_ms)) {
        out.push_back(fmt::format("d0_ms must be a finite value >= 0 (got {})", card.d0_ms));
    }
    if (card.supported_modes.empty()) {
        out.emplace_back("mode ladder is empty");
    }
    const auto& modes = card.supported_modes;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (modes[i].sampling_rate_hz < 1 || modes[i].frame_size_samples < 1) {
            out.push_back(fmt::format("ladder[{}] = {} has a non-positive field", i, to_string(modes[i])));
        }
        if (std::find(modes.begin(), modes.begin() + static_cast<std::ptrdiff_t>(i), modes[i]) !=
            modes.begin() + static_cast<std::ptrdiff_t>(i)) {
            out.push_back(fmt::format("ladder[{}] = {} is a duplicate", i, to_string(modes[i])));
        }
    }
    return out;
}

double blocking_delay(const AudioMode& mode, const SoundCardProfile& card) {
    if (mode.sampling_rate_hz < 1 || mode.frame_size_samples < 1) {
        throw Error(ErrorCode::invalid_mode, "invalid audio mode " + to_string(mode));
    }
    if (!(card.d0_ms >= 0.0)) {
        throw Error(ErrorCode::invalid_argument, fmt::format("negative d0_ms {}", card.d0_ms));
    }
    return 1000.0 * static_cast<double>(mode.frame_size_samples) /
               static_cast<double>(mode.sampling_rate_hz) +
           card.d0_ms;
}

namespace {

void require_non_negative(double v, const char* name) {
    if (!(v >= 0.0)) {
        throw Error(ErrorCode::invalid_argument, fmt::format("{} must be >= 0 (got {})", name, v));
    }
}

}  // namespace

double end_to_end_delay(double sound_card_delay_ms, double network_delay_ms) {
    require_non_negative(sound_card_delay_ms, "sound_card_delay_ms");
    require_non_negative(network_delay_ms, "network_delay_ms");
    return 2.0 * sound_card_delay_ms + network_delay_ms;
}

double end_to_end_delay(double tx_sound_card_delay_ms, double rx_sound_card_delay_ms,
                        double network_delay_ms) {
    require_non_negative(tx_sound_card_delay_ms, "tx_sound_card_delay_ms");
    require_non_negative(rx_sound_card_delay_ms, "rx_sound_card_delay_ms");
    require_non_negative(network_delay_ms, "network_delay_ms");
    return tx_sound_card_delay_ms + rx_sound_card_delay_ms + network_delay_ms;
}

bool meets_ept(double e2e_ms, const DelayBudget& budget) { return e2e_ms <= budget.ept_ms; }

}  // namespace nmp
