#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "nmp/engine.hpp"
#include "nmp/errors.hpp"
#include "nmp/scenario_io.hpp"
#include "nmp/trace.hpp"

namespace nmp::cli {

namespace {

namespace fs = std::filesystem;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> probe_interval_ms;
    std::optional<double> alpha;
    std::optional<double> hysteresis_ms;
    std::optional<std::size_t> backup_premium;
    std::optional<std::size_t> backup_regular;

    void attach(CLI::App& app) {
        app.add_option("--seed", seed, "Override run.seed");
        app.add_option("--probe-interval-ms", probe_interval_ms, "Override probe.interval_ms");
        app.add_option("--alpha", alpha, "Override probe.alpha");
        app.add_option("--hysteresis-ms", hysteresis_ms, "Override policy.hysteresis_ms");
        app.add_option("--backup-premium", backup_premium, "Override policy.backup_premium");
        app.add_option("--backup-regular", backup_regular, "Override policy.backup_regular");
    }

    void apply(Scenario& s) const {
        if (seed) s.seed = *seed;
        if (probe_interval_ms) s.probe.interval_ms = *probe_interval_ms;
        if (alpha) s.probe.smoothing_alpha = *alpha;
        if (hysteresis_ms) s.policy.hysteresis_ms = *hysteresis_ms;
        if (backup_premium) s.policy.backup_count_premium = *backup_premium;
        if (backup_regular) s.policy.backup_count_regular = *backup_regular;
    }
};

// Loads, applies overrides and re-validates. Prints errors and returns
// nullopt on failure.
std::optional<Scenario> load(const std::string& path, const Overrides& ov, std::ostream& err) {
    auto parsed = load_scenario(path);
    if (!parsed.ok()) {
        for (const auto& e : parsed.errors) {
            err << "error: " << e << '\n';
        }
        return std::nullopt;
    }
    Scenario s = std::move(*parsed.scenario);
    ov.apply(s);
    if (auto bad = validate_scenario(s); !bad.empty()) {
        for (const auto& e : bad) {
            err << "error: " << path << " (with overrides): " << e << '\n';
        }
        return std::nullopt;
    }
    return s;
}

void print_summary(std::ostream& out, std::string_view label, const TraceSummary& s) {
    out << fmt::format("[{}]\n", label);
    out << fmt::format("  span_ms:           {:.4f}\n", s.span_ms);
    out << fmt::format("  mean_e2e_ms:       {:.4f}\n", s.mean_e2e_ms);
    out << fmt::format("  max_e2e_ms:        {:.4f}\n", s.max_e2e_ms);
    out << fmt::format("  over_ept_fraction: {:.4f}\n", s.over_ept_fraction);
    for (auto type : {TraceEventType::measurement, TraceEventType::reroute, TraceEventType::mode_switch,
                      TraceEventType::best_effort_enter, TraceEventType::best_effort_exit,
                      TraceEventType::end_of_run}) {
        out << fmt::format("  {:<18} {}\n", fmt::format("{}:", to_string(type)), s.count(type));
    }
}

// Write to a sibling temp file and rename, so a failed write never leaves a
// partial trace at the requested path.
void write_trace_file(const fs::path& path, const Trace& trace) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw Error(ErrorCode::io, fmt::format("cannot open '{}' for writing", tmp.string()));
        }
        write_trace_csv(f, trace);
        f.flush();
        if (!f) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw Error(ErrorCode::io, fmt::format("failed writing '{}'", tmp.string()));
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorCode::io, fmt::format("cannot move trace into '{}'", path.string()));
    }
}

int cmd_run(const std::string& scenario_path, const std::string& trace_path, const std::string& baseline,
            const Overrides& ov, std::ostream& out, std::ostream& err) {
    auto mode = parse_baseline_mode(baseline);
    if (!mode) {
        err << "error: unknown --baseline '" << baseline << "' (expected none, no-adapt or pinned)\n";
        return kExitValidation;
    }
    auto scenario = load(scenario_path, ov, err);
    if (!scenario) {
        return kExitValidation;
    }
    const auto result = simulate(*scenario, RunOptions{*mode});
    if (!trace_path.empty()) {
        write_trace_file(trace_path, result.trace);
    }
    out << fmt::format("scenario: {}\nbaseline: {}\nseed: {}\nprobe_interval_ms: {:.4f}\n",
                       fs::path(scenario_path).stem().string(), to_string(*mode), scenario->seed,
                       scenario->probe.interval_ms);
    print_summary(out, *mode == BaselineMode::none ? "adaptive" : to_string(*mode),
                  summarize(result.trace, scenario->budget));
    return kExitOk;
}

int cmd_compare(const std::string& scenario_path, const std::string& baseline, const std::string& format,
                const Overrides& ov, std::ostream& out, std::ostream& err) {
    auto mode = parse_baseline_mode(baseline);
    if (!mode || *mode == BaselineMode::none) {
        err << "error: --baseline must be no-adapt or pinned (got '" << baseline << "')\n";
        return kExitValidation;
    }
    auto scenario = load(scenario_path, ov, err);
    if (!scenario) {
        return kExitValidation;
    }
    const auto adaptive = summarize(run(*scenario), scenario->budget);
    const auto reference = summarize(run_baseline(*scenario, *mode), scenario->budget);
    const double gain = improvement_pct(adaptive, reference);
    const auto name = fs::path(scenario_path).stem().string();

    if (format == "csv") {
        out << "scenario,mean_adaptive_ms,mean_baseline_ms,improvement_pct\n";
        out << fmt::format("{},{:.4f},{:.4f},{:.4f}\n", name, adaptive.mean_e2e_ms, reference.mean_e2e_ms, gain);
        return kExitOk;
    }
    out << fmt::format("scenario: {}\nbaseline: {}\nseed: {}\nprobe_interval_ms: {:.4f}\n", name,
                       to_string(*mode), scenario->seed, scenario->probe.interval_ms);
    print_summary(out, "adaptive", adaptive);
    print_summary(out, to_string(*mode), reference);
    out << fmt::format("improvement_pct: {:.4f}\n", gain);
    return kExitOk;
}

int cmd_validate(const std::string& scenario_path, std::ostream& out, std::ostream& err) {
    if (!load(scenario_path, Overrides{}, err)) {
        return kExitValidation;
    }
    out << scenario_path << ": ok\n";
    return kExitOk;
}

int cmd_summarize(const std::string& trace_path, double ept_ms, std::ostream& out, std::ostream& err) {
    std::ifstream in(trace_path);
    if (!in) {
        err << "error: cannot open trace file '" << trace_path << "'\n";
        return kExitValidation;
    }
    Trace trace;
    try {
        trace = read_trace_csv(in);
    } catch (const Error& e) {
        err << "error: " << trace_path << ": " << e.what() << '\n';
        return kExitValidation;
    }
    print_summary(out, fs::path(trace_path).stem().string(), summarize(trace, DelayBudget{ept_ms}));
    return kExitOk;
}

}  // namespace

int main_with_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Networked music performance control-loop simulator", "nmpsim"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string trace_path;
    std::string baseline = "none";
    std::string compare_baseline = "no-adapt";
    std::string format = "text";
    double ept_ms = kDefaultEptMs;
    Overrides run_ov;
    Overrides compare_ov;

    auto* run_cmd = app.add_subcommand("run", "Simulate a scenario and write its trace");
    run_cmd->add_option("--scenario", scenario_path, "Scenario file")->required();
    run_cmd->add_option("--trace", trace_path, "Trace CSV output path");
    run_cmd->add_option("--baseline", baseline, "none, no-adapt or pinned");
    run_ov.attach(*run_cmd);

    auto* compare_cmd = app.add_subcommand("compare", "Adaptive run against a baseline");
    compare_cmd->add_option("--scenario", scenario_path, "Scenario file")->required();
    compare_cmd->add_option("--baseline", compare_baseline, "no-adapt or pinned");
    compare_cmd->add_option("--format", format, "text or csv")->check(CLI::IsMember({"text", "csv"}));
    compare_ov.attach(*compare_cmd);

    auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file");
    validate_cmd->add_option("--scenario", scenario_path, "Scenario file")->required();

    auto* summarize_cmd = app.add_subcommand("summarize", "Summarize a trace CSV");
    summarize_cmd->add_option("--trace", trace_path, "Trace CSV")->required();
    summarize_cmd->add_option("--ept-ms", ept_ms, "Delay budget in ms");

    // CLI11 wants argv order reversed when given a vector.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }

    try {
        if (*run_cmd) {
            return cmd_run(scenario_path, trace_path, baseline, run_ov, out, err);
        }
        if (*compare_cmd) {
            return cmd_compare(scenario_path, compare_baseline, format, compare_ov, out, err);
        }
        if (*validate_cmd) {
            return cmd_validate(scenario_path, out, err);
        }
        if (*summarize_cmd) {
            return cmd_summarize(trace_path, ept_ms, out, err);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitValidation;
}

}  // namespace nmp::cli
