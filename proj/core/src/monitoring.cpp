#include "nmp/monitoring.hpp"

#include <cmath>

#include <fmt/format.h>

#include "nmp/errors.hpp"

namespace nmp {

std::vector<std::string> ProbeConfig::validate() const {
    std::vector<std::string> out;
    if (!(interval_ms > 0.0) || !std::isfinite(interval_ms)) {
        out.push_back(fmt::format("probe interval_ms must be > 0 (got {})", interval_ms));
    }
    if (!(smoothing_alpha > 0.0 && smoothing_alpha <= 1.0)) {
        out.push_back(fmt::format("probe alpha must be in (0, 1] (got {})", smoothing_alpha));
    }
    return out;
}

std::vector<ProbeEvent> schedule_probes(std::span<const PathDescriptor> paths, const ProbeConfig& cfg,
                                        double horizon_ms) {
    if (!(horizon_ms > 0.0)) {
        throw Error(ErrorCode::invalid_argument, fmt::format("probe horizon must be > 0 (got {})", horizon_ms));
    }
    if (auto bad = cfg.validate(); !bad.empty()) {
        throw Error(ErrorCode::configuration, bad.front());
    }
    std::vector<ProbeEvent> out;
    // k * interval rather than repeated addition, so long horizons do not drift.
    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * cfg.interval_ms;
        if (t > horizon_ms) {
            break;
        }
        for (std::size_t i = 0; i < paths.size(); ++i) {
            out.push_back({t, i, paths[i].id});
        }
    }
    return out;
}

PathEstimate ingest_sample(const std::optional<PathEstimate>& prior, const PathId& path_id,
                           const DelaySample& sample, const ProbeConfig& cfg) {
    if (!(sample.one_way_delay_ms >= 0.0)) {
        throw Error(ErrorCode::invalid_argument,
                    fmt::format("negative delay sample {} on {}", sample.one_way_delay_ms, path_id));
    }
    if (!prior) {
        return {path_id, sample.one_way_delay_ms, sample, 1};
    }
    const double a = cfg.smoothing_alpha;
    return {path_id, a * sample.one_way_delay_ms + (1.0 - a) * prior->estimate_ms, sample,
            prior->sample_count + 1};
}

DelayMonitor::DelayMonitor(ProbeConfig cfg) : cfg_(cfg) {
    if (auto bad = cfg_.validate(); !bad.empty()) {
        throw Error(ErrorCode::configuration, bad.front());
    }
}

const PathEstimate& DelayMonitor::ingest(const PathId& path_id, const DelaySample& sample) {
    auto it = estimates_.find(path_id);
    std::optional<PathEstimate> prior;
    if (it != estimates_.end()) {
        prior = it->second;
    }
    auto next = ingest_sample(prior, path_id, sample, cfg_);
    return estimates_.insert_or_assign(path_id, std::move(next)).first->second;
}

const PathEstimate* DelayMonitor::estimate(const PathId& path_id) const {
    auto it = estimates_.find(path_id);
    return it == estimates_.end() ? nullptr : &it->second;
}

DelaySnapshot DelayMonitor::snapshot() const {
    DelaySnapshot out;
    for (const auto& [id, est] : estimates_) {
        out.emplace(id, est.estimate_ms);
    }
    return out;
}

}  // namespace nmp
