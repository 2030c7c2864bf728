#pragma once
/**
 * @file trace.hpp
 * @brief Trace rows, their CSV form, and time-weighted summaries.
 *
 * Each row describes the session state right after the event it records, and
 * that state holds until the session's next row. CSV columns are fixed:
 *
 *     t_ms,session,event,path,fs_hz,fr_samples,net_ms,block_ms,e2e_ms,detail
 *
 * Reals are written with 4 decimals and the detail field is always quoted.
 * Rows built with make_trace_row() are quantized to that resolution first, so
 * e2e == 2 * block + net holds on the parsed file as well as in memory.
 */

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nmp/delay_model.hpp"

namespace nmp {

enum class TraceEventType {
    measurement,
    reroute,
    mode_switch,
    best_effort_enter,
    best_effort_exit,
    end_of_run,
};

std::string_view to_string(TraceEventType type);
std::optional<TraceEventType> parse_event_type(std::string_view text);

struct TraceEvent {
    double at_ms{};
    std::string session_id;
    TraceEventType type{TraceEventType::measurement};
    std::string active_path;
    int fs_hz{};
    int fr_samples{};
    double network_delay_ms{};
    /// Mean of the two endpoints' blocking delays; equal to either one for
    /// symmetric equipment.
    double blocking_delay_ms{};
    double e2e_ms{};
    std::string detail;

    friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

using Trace = std::vector<TraceEvent>;

inline constexpr double kTraceResolutionMs = 1e-4;

double quantize_ms(double value);

TraceEvent make_trace_row(double at_ms, std::string session_id, TraceEventType type, std::string active_path,
                          const AudioMode& mode, double network_delay_ms, double tx_blocking_ms,
                          double rx_blocking_ms, std::string detail = {});

inline constexpr std::string_view kTraceCsvHeader =
    "t_ms,session,event,path,fs_hz,fr_samples,net_ms,block_ms,e2e_ms,detail";

void write_trace_csv(std::ostream& out, std::span<const TraceEvent> trace);
std::string trace_to_csv(std::span<const TraceEvent> trace);

/// Throws Error(io) on a malformed header or row, naming the line number.
Trace read_trace_csv(std::istream& in);

struct TraceSummary {
    double span_ms{};
    double mean_e2e_ms{};
    double max_e2e_ms{};
    double over_ept_fraction{};
    std::map<TraceEventType, std::size_t> counts;

    std::size_t count(TraceEventType type) const;
};

/// Time-weighted over each session's rows (a row's e2e holds until that
/// session's next row), pooled across sessions. Throws Error(empty_trace).
TraceSummary summarize(std::span<const TraceEvent> trace, const DelayBudget& budget);

/// (baseline - adaptive) / baseline * 100.
double improvement_pct(const TraceSummary& adaptive, const TraceSummary& baseline);

}  // namespace nmp
