#pragma once
/**
 * @file engine.hpp
 * @brief Deterministic discrete-event loop binding monitoring, rerouting and
 * audio-mode adaptation.
 *
 * Virtual time in milliseconds. At equal timestamps events run in kind order
 * (schedule step, pending mode change, probe, decision sweep, session start,
 * end of run) and then in the order they were declared. A decision sweep
 * follows every probe batch: first rerouting, then the audio-mode check
 * against the best path, then one measurement row per session describing the
 * resulting state. Each run owns all of its state, so independent runs may
 * execute on separate threads.
 */

#include <cstddef>

#include "nmp/scenario.hpp"
#include "nmp/trace.hpp"

namespace nmp {

enum class BaselineMode {
    /// Rerouting and audio-mode adaptation both active.
    none,
    /// Rerouting only; the audio mode stays at its initial value.
    no_adapt,
    /// Neither: the flow stays on its initial path at its initial mode.
    pinned,
};

std::string_view to_string(BaselineMode mode);
std::optional<BaselineMode> parse_baseline_mode(std::string_view text);

struct RunOptions {
    BaselineMode baseline{BaselineMode::none};
};

struct RunStats {
    std::size_t events_executed{};
    std::size_t probes{};
    std::size_t schedule_steps{};
    std::size_t sweeps{};
};

struct RunResult {
    Trace trace;
    RunStats stats;
};

/// Validates first; throws Error(validation) listing every violation before
/// any event executes.
RunResult simulate(const Scenario& scenario, const RunOptions& options = {});

Trace run(const Scenario& scenario);

Trace run_baseline(const Scenario& scenario, BaselineMode mode = BaselineMode::no_adapt);

}  // namespace nmp
