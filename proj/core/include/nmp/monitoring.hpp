#pragma once
/**
 * @file monitoring.hpp
 * @brief Periodic per-path delay probing and the smoothed estimates the
 * controller and session logic decide on.
 */

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nmp/delay_model.hpp"
#include "nmp/network.hpp"

namespace nmp {

inline constexpr double kDefaultProbeIntervalMs = 500.0;
inline constexpr double kDefaultSmoothingAlpha = 1.0;

struct ProbeConfig {
    double interval_ms{kDefaultProbeIntervalMs};
    /// EWMA weight of the newest sample, in (0, 1]. 1 keeps only the latest.
    double smoothing_alpha{kDefaultSmoothingAlpha};

    std::vector<std::string> validate() const;

    friend bool operator==(const ProbeConfig&, const ProbeConfig&) = default;
};

struct PathEstimate {
    PathId path_id;
    double estimate_ms{};
    DelaySample last_sample;
    std::size_t sample_count{};
};

struct ProbeEvent {
    double at_ms{};
    std::size_t path_index{};
    PathId path_id;

    friend bool operator==(const ProbeEvent&, const ProbeEvent&) = default;
};

/// Latest estimate per path. Paths never probed are absent.
using DelaySnapshot = std::map<PathId, double>;

/// Probes at 0, interval, 2*interval, ... <= horizon for every path, sorted by
/// time with ties in path order.
std::vector<ProbeEvent> schedule_probes(std::span<const PathDescriptor> paths, const ProbeConfig& cfg,
                                        double horizon_ms);

/// First sample initializes the estimate; later ones blend in with weight alpha.
PathEstimate ingest_sample(const std::optional<PathEstimate>& prior, const PathId& path_id,
                           const DelaySample& sample, const ProbeConfig& cfg);

/// Owns the live estimates. Readers only ever get detached snapshots.
class DelayMonitor {
public:
    explicit DelayMonitor(ProbeConfig cfg);

    const PathEstimate& ingest(const PathId& path_id, const DelaySample& sample);
    const PathEstimate* estimate(const PathId& path_id) const;
    DelaySnapshot snapshot() const;

    const ProbeConfig& config() const noexcept { return cfg_; }

private:
    ProbeConfig cfg_;
    std::map<PathId, PathEstimate> estimates_;
};

}  // namespace nmp
