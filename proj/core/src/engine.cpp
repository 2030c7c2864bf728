#include "nmp/engine.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <queue>
#include <variant>

#include <fmt/format.h>

#include "nmp/controller.hpp"
#include "nmp/errors.hpp"
#include "nmp/monitoring.hpp"
#include "nmp/session.hpp"

namespace nmp {

std::string_view to_string(BaselineMode mode) {
    switch (mode) {
    case BaselineMode::none: return "none";
    case BaselineMode::no_adapt: return "no-adapt";
    case BaselineMode::pinned: return "pinned";
    }
    return "unknown";
}

std::optional<BaselineMode> parse_baseline_mode(std::string_view text) {
    for (auto m : {BaselineMode::none, BaselineMode::no_adapt, BaselineMode::pinned}) {
        if (to_string(m) == text) {
            return m;
        }
    }
    return std::nullopt;
}

namespace {

// Declaration order is the execution order among same-time events.
enum class EventKind : int {
    schedule_step = 0,
    mode_apply = 1,
    probe = 2,
    decision_sweep = 3,
    session_start = 4,
    end_of_run = 5,
};

struct ScheduleStep {
    std::size_t path;
    std::size_t segment;
};
struct ModeApply {
    std::size_t session;
    ModeDecision decision;
    double decided_at_ms;
};
struct Probe {
    std::size_t path;
};
struct DecisionSweep {};
struct SessionStart {
    std::size_t session;
};
struct EndOfRun {};

using Payload = std::variant<ScheduleStep, ModeApply, Probe, DecisionSweep, SessionStart, EndOfRun>;

struct Event {
    double at_ms;
    EventKind kind;
    std::uint64_t seq;
    Payload payload;
};

struct Later {
    bool operator()(const Event& a, const Event& b) const {
        if (a.at_ms != b.at_ms) {
            return a.at_ms > b.at_ms;
        }
        if (a.kind != b.kind) {
            return a.kind > b.kind;
        }
        return a.seq > b.seq;
    }
};

struct SessionRuntime {
    SessionSpec spec;
    SessionState state;
    SessionProfiles profiles;
    UserClass receiver_class{UserClass::regular};
    std::vector<PathId> candidates;
    std::optional<FlowAssignment> flow;
    bool in_best_effort{false};
    bool mode_change_pending{false};
};

class Simulator {
public:
    Simulator(const Scenario& scenario, const RunOptions& options)
        : sc_(scenario), opt_(options), monitor_(scenario.probe),
          segment_(scenario.topology.paths.size(), 0) {
        for (const auto& spec : sc_.sessions) {
            const auto& tx = *sc_.find_user(spec.tx);
            const auto& rx = *sc_.find_user(spec.rx);
            SessionRuntime rt;
            rt.spec = spec;
            rt.state.session_id = spec.id();
            rt.state.tx_user = spec.tx;
            rt.state.rx_user = spec.rx;
            rt.state.mode_index = spec.initial_mode_index;
            rt.state.budget = sc_.budget;
            rt.state.upgrade_guard_ms = sc_.adaptation.upgrade_guard_ms;
            rt.state.switch_latency_ms = sc_.adaptation.switch_latency_ms;
            rt.profiles = make_session_profiles(tx, rx);
            rt.receiver_class = rx.user_class;
            rt.candidates = sc_.candidate_paths(spec);
            sessions_.push_back(std::move(rt));
        }
    }

    RunResult run() {
        seed_events();
        while (!queue_.empty()) {
            Event ev = queue_.top();
            queue_.pop();
            ++stats_.events_executed;
            std::visit([&](const auto& p) { handle(ev.at_ms, p); }, ev.payload);
        }
        return {std::move(trace_), stats_};
    }

private:
    void push(double at_ms, EventKind kind, Payload payload) {
        queue_.push(Event{at_ms, kind, seq_++, std::move(payload)});
    }

    void seed_events() {
        const auto& paths = sc_.topology.paths;
        for (std::size_t i = 0; i < paths.size(); ++i) {
            const auto& segs = paths[i].schedule.segments;
            for (std::size_t k = 1; k < segs.size(); ++k) {
                if (segs[k].start_ms <= sc_.duration_ms) {
                    push(segs[k].start_ms, EventKind::schedule_step, ScheduleStep{i, k});
                }
            }
        }
        double last_sweep = -1.0;
        for (const auto& probe : schedule_probes(paths, sc_.probe, sc_.duration_ms)) {
            push(probe.at_ms, EventKind::probe, Probe{probe.path_index});
            if (probe.at_ms != last_sweep) {
                push(probe.at_ms, EventKind::decision_sweep, DecisionSweep{});
                last_sweep = probe.at_ms;
            }
        }
        for (std::size_t s = 0; s < sessions_.size(); ++s) {
            push(0.0, EventKind::session_start, SessionStart{s});
        }
        push(sc_.duration_ms, EventKind::end_of_run, EndOfRun{});
    }

    void handle(double, const ScheduleStep& step) {
        ++stats_.schedule_steps;
        segment_[step.path] = step.segment;
    }

    void handle(double t, const Probe& probe) {
        ++stats_.probes;
        const auto& path = sc_.topology.paths[probe.path];
        const double base = path.schedule.segments[segment_[probe.path]].delay_ms;
        const double sample = jittered_delay(base, path.schedule.jitter_std_ms, path.id, t, sc_.seed);
        monitor_.ingest(path.id, DelaySample{t, sample});
    }

    void handle(double t, const SessionStart& start) {
        auto& s = sessions_[start.session];
        const auto snap = monitor_.snapshot();
        s.flow = assign_initial_path(s.state.session_id, s.receiver_class, s.candidates, snap, sc_.policy, t);
        std::string detail = "session-start backups=";
        for (std::size_t i = 0; i < s.flow->backups.size(); ++i) {
            detail += (i ? "|" : "") + s.flow->backups[i];
        }
        emit_state(t, s, TraceEventType::measurement, snap, detail + " " + estimates_detail(s, snap));
    }

    void handle(double t, const DecisionSweep&) {
        ++stats_.sweeps;
        const auto snap = monitor_.snapshot();
        for (auto& s : sessions_) {
            if (s.flow) {
                sweep_session(t, s, snap);
            }
        }
    }

    void handle(double, const ModeApply& apply) {
        auto& s = sessions_[apply.session];
        s.mode_change_pending = false;
        const auto snap = monitor_.snapshot();
        // Stamped at decision time + switch latency, i.e. now.
        trace_.push_back(notify_application(s.state, apply.decision, apply.decided_at_ms, s.profiles,
                                            switch_context(s, snap, best_delay(s, snap))));
    }

    void handle(double t, const EndOfRun&) {
        const auto snap = monitor_.snapshot();
        for (auto& s : sessions_) {
            if (s.flow) {
                emit_state(t, s, TraceEventType::end_of_run, snap, estimates_detail(s, snap));
            }
        }
    }

    void sweep_session(double t, SessionRuntime& s, const DelaySnapshot& snap) {
        if (opt_.baseline != BaselineMode::pinned) {
            if (auto target = reroute_decision(*s.flow, s.candidates, snap, sc_.policy)) {
                auto outcome = apply_reroute(*s.flow, *target, s.candidates, snap, t);
                s.flow = std::move(outcome.assignment);
                const auto& rec = outcome.record;
                emit_state(t, s, TraceEventType::reroute, snap,
                           fmt::format("{}->{} {:.4f}->{:.4f}", rec.from_path, rec.to_path, rec.from_estimate_ms,
                                       rec.to_estimate_ms));
            }
        }

        if (opt_.baseline == BaselineMode::none && !s.mode_change_pending) {
            const double best = best_delay(s, snap);
            const auto decision = mode_switch_decision(s.state, best, s.profiles);
            switch (decision.action) {
            case ModeAction::degrade:
            case ModeAction::upgrade:
                change_mode(t, s, decision, snap, best);
                break;
            case ModeAction::best_effort:
                if (s.state.mode_index != decision.target_index) {
                    change_mode(t, s, {ModeAction::degrade, decision.target_index}, snap, best);
                }
                if (!s.in_best_effort) {
                    s.in_best_effort = true;
                    emit_state(t, s, TraceEventType::best_effort_enter, snap,
                               fmt::format("no mode within floor meets EPT at best_ms={:.4f}", best));
                }
                break;
            case ModeAction::hold:
                break;
            }
            if (s.in_best_effort && decision.action != ModeAction::best_effort) {
                s.in_best_effort = false;
                emit_state(t, s, TraceEventType::best_effort_exit, snap, fmt::format("best_ms={:.4f}", best));
            }
        }

        emit_state(t, s, TraceEventType::measurement, snap, estimates_detail(s, snap));
    }

    void change_mode(double t, SessionRuntime& s, const ModeDecision& decision, const DelaySnapshot& snap,
                     double best) {
        if (s.state.switch_latency_ms > 0.0) {
            s.mode_change_pending = true;
            const auto index = static_cast<std::size_t>(&s - sessions_.data());
            push(t + s.state.switch_latency_ms, EventKind::mode_apply, ModeApply{index, decision, t});
            return;
        }
        trace_.push_back(notify_application(s.state, decision, t, s.profiles, switch_context(s, snap, best)));
    }

    double best_delay(const SessionRuntime& s, const DelaySnapshot& snap) const {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& id : s.candidates) {
            if (auto it = snap.find(id); it != snap.end()) {
                best = std::min(best, it->second);
            }
        }
        return best;
    }

    static double active_delay(const SessionRuntime& s, const DelaySnapshot& snap) {
        auto it = snap.find(s.flow->active_path);
        if (it == snap.end()) {
            throw Error(ErrorCode::stale_snapshot, "no estimate for active path " + s.flow->active_path);
        }
        return it->second;
    }

    SwitchContext switch_context(const SessionRuntime& s, const DelaySnapshot& snap, double best) const {
        return {s.flow->active_path, active_delay(s, snap), best};
    }

    static std::string estimates_detail(const SessionRuntime& s, const DelaySnapshot& snap) {
        std::string out;
        for (const auto& id : s.candidates) {
            if (auto it = snap.find(id); it != snap.end()) {
                out += fmt::format("{}{}={:.4f}", out.empty() ? "" : ";", id, it->second);
            }
        }
        return out;
    }

    void emit_state(double t, const SessionRuntime& s, TraceEventType type, const DelaySnapshot& snap,
                    std::string detail) {
        const auto blocking = blocking_at(s.profiles, s.state.mode_index);
        trace_.push_back(make_trace_row(t, s.state.session_id, type, s.flow->active_path,
                                        s.profiles.mode_at(s.state.mode_index), active_delay(s, snap),
                                        blocking.tx_ms, blocking.rx_ms, std::move(detail)));
    }

    const Scenario& sc_;
    RunOptions opt_;
    DelayMonitor monitor_;
    std::vector<std::size_t> segment_;
    std::vector<SessionRuntime> sessions_;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::uint64_t seq_{0};
    Trace trace_;
    RunStats stats_;
};

}  // namespace

RunResult simulate(const Scenario& scenario, const RunOptions& options) {
    if (auto bad = validate_scenario(scenario); !bad.empty()) {
        std::string msg = "invalid scenario:";
        for (const auto& b : bad) {
            msg += "\n  " + b;
        }
        throw Error(ErrorCode::validation, msg);
    }
    return Simulator(scenario, options).run();
}

Trace run(const Scenario& scenario) { return simulate(scenario).trace; }

Trace run_baseline(const Scenario& scenario, BaselineMode mode) {
    return simulate(scenario, RunOptions{mode}).trace;
}

}  // namespace nmp
