#include "nmp/trace.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <utility>

#include <fmt/format.h>

#include "nmp/errors.hpp"

namespace nmp {

namespace {

constexpr std::array<std::pair<TraceEventType, std::string_view>, 6> kEventNames{{
    {TraceEventType::measurement, "measurement"},
    {TraceEventType::reroute, "reroute"},
    {TraceEventType::mode_switch, "mode-switch"},
    {TraceEventType::best_effort_enter, "best-effort-enter"},
    {TraceEventType::best_effort_exit, "best-effort-exit"},
    {TraceEventType::end_of_run, "end-of-run"},
}};

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

// RFC 4180-style split: quoted fields may contain commas and doubled quotes.
std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (in_quotes) {
        throw Error(ErrorCode::io, fmt::format("trace line {}: unterminated quote", line_no));
    }
    fields.push_back(std::move(cur));
    return fields;
}

template <typename T>
T parse_number(const std::string& text, std::size_t line_no, std::string_view column) {
    T value{};
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw Error(ErrorCode::io, fmt::format("trace line {}: bad {} value '{}'", line_no, column, text));
    }
    return value;
}

}  // namespace

std::string_view to_string(TraceEventType type) {
    for (const auto& [t, name] : kEventNames) {
        if (t == type) {
            return name;
        }
    }
    return "unknown";
}

std::optional<TraceEventType> parse_event_type(std::string_view text) {
    for (const auto& [t, name] : kEventNames) {
        if (name == text) {
            return t;
        }
    }
    return std::nullopt;
}

// Integer count of 1e-4 ms divided by 1e4 is the double nearest the 4-decimal
// value, which is exactly what %.4f prints and from_chars reads back.
double quantize_ms(double value) { return std::round(value * 1e4) / 1e4; }

TraceEvent make_trace_row(double at_ms, std::string session_id, TraceEventType type, std::string active_path,
                          const AudioMode& mode, double network_delay_ms, double tx_blocking_ms,
                          double rx_blocking_ms, std::string detail) {
    TraceEvent row;
    row.at_ms = at_ms;
    row.session_id = std::move(session_id);
    row.type = type;
    row.active_path = std::move(active_path);
    row.fs_hz = mode.sampling_rate_hz;
    row.fr_samples = mode.frame_size_samples;
    row.network_delay_ms = quantize_ms(network_delay_ms);
    row.blocking_delay_ms = quantize_ms((tx_blocking_ms + rx_blocking_ms) / 2.0);
    row.e2e_ms = end_to_end_delay(row.blocking_delay_ms, row.network_delay_ms);
    row.detail = std::move(detail);
    return row;
}

void write_trace_csv(std::ostream& out, std::span<const TraceEvent> trace) {
    out << kTraceCsvHeader << '\n';
    for (const auto& r : trace) {
        out << fmt::format("{:.4f},{},{},{},{},{},{:.4f},{:.4f},{:.4f},{}\n", r.at_ms, r.session_id,
                           to_string(r.type), r.active_path, r.fs_hz, r.fr_samples, r.network_delay_ms,
                           r.blocking_delay_ms, r.e2e_ms, quote(r.detail));
    }
}

std::string trace_to_csv(std::span<const TraceEvent> trace) {
    std::ostringstream os;
    write_trace_csv(os, trace);
    return os.str();
}

Trace read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kTraceCsvHeader) {
        throw Error(ErrorCode::io, "trace line 1: missing or unexpected CSV header");
    }
    Trace out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        auto f = split_csv_line(line, line_no);
        if (f.size() != 10) {
            throw Error(ErrorCode::io, fmt::format("trace line {}: expected 10 fields, got {}", line_no, f.size()));
        }
        TraceEvent r;
        r.at_ms = parse_number<double>(f[0], line_no, "t_ms");
        r.session_id = f[1];
        auto type = parse_event_type(f[2]);
        if (!type) {
            throw Error(ErrorCode::io, fmt::format("trace line {}: unknown event '{}'", line_no, f[2]));
        }
        r.type = *type;
        r.active_path = f[3];
        r.fs_hz = parse_number<int>(f[4], line_no, "fs_hz");
        r.fr_samples = parse_number<int>(f[5], line_no, "fr_samples");
        r.network_delay_ms = parse_number<double>(f[6], line_no, "net_ms");
        r.blocking_delay_ms = parse_number<double>(f[7], line_no, "block_ms");
        r.e2e_ms = parse_number<double>(f[8], line_no, "e2e_ms");
        r.detail = f[9];
        out.push_back(std::move(r));
    }
    return out;
}

std::size_t TraceSummary::count(TraceEventType type) const {
    auto it = counts.find(type);
    return it == counts.end() ? 0 : it->second;
}

TraceSummary summarize(std::span<const TraceEvent> trace, const DelayBudget& budget) {
    if (trace.empty()) {
        throw Error(ErrorCode::empty_trace, "cannot summarize an empty trace");
    }
    TraceSummary s;
    s.max_e2e_ms = trace.front().e2e_ms;

    std::map<std::string_view, std::vector<const TraceEvent*>> by_session;
    for (const auto& r : trace) {
        ++s.counts[r.type];
        s.max_e2e_ms = std::max(s.max_e2e_ms, r.e2e_ms);
        by_session[r.session_id].push_back(&r);
    }

    double weighted = 0.0;
    double over = 0.0;
    for (const auto& [id, rows] : by_session) {
        for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
            const double dt = rows[i + 1]->at_ms - rows[i]->at_ms;
            s.span_ms += dt;
            weighted += rows[i]->e2e_ms * dt;
            if (!meets_ept(rows[i]->e2e_ms, budget)) {
                over += dt;
            }
        }
    }
    if (s.span_ms > 0.0) {
        s.mean_e2e_ms = weighted / s.span_ms;
        s.over_ept_fraction = over / s.span_ms;
    } else {
        // Zero-length trace: every row is instantaneous, weight them equally.
        double sum = 0.0;
        std::size_t n_over = 0;
        for (const auto& r : trace) {
            sum += r.e2e_ms;
            n_over += meets_ept(r.e2e_ms, budget) ? 0 : 1;
        }
        s.mean_e2e_ms = sum / static_cast<double>(trace.size());
        s.over_ept_fraction = static_cast<double>(n_over) / static_cast<double>(trace.size());
    }
    return s;
}

double improvement_pct(const TraceSummary& adaptive, const TraceSummary& baseline) {
    if (!(baseline.mean_e2e_ms > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "baseline mean e2e must be > 0");
    }
    return (baseline.mean_e2e_ms - adaptive.mean_e2e_ms) / baseline.mean_e2e_ms * 100.0;
}

}  // namespace nmp
