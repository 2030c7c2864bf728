#include "nmp/scenario_io.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace nmp {

namespace {

// Collects every schema error instead of stopping at the first one.
class Reader {
public:
    std::vector<std::string> errors;

    void fail(const std::string& where, const std::string& what) { errors.push_back(where + ": " + what); }

    bool is_map(const YAML::Node& n, const std::string& where) {
        if (!n.IsMap()) {
            fail(where, "expected a mapping");
            return false;
        }
        return true;
    }

    bool is_seq(const YAML::Node& n, const std::string& where) {
        if (!n.IsSequence()) {
            fail(where, "expected a list");
            return false;
        }
        return true;
    }

    void check_keys(const YAML::Node& map, const std::string& where, std::initializer_list<std::string_view> allowed) {
        for (const auto& kv : map) {
            const auto key = kv.first.as<std::string>();
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                fail(where, fmt::format("unknown key '{}'", key));
            }
        }
    }

    YAML::Node required(const YAML::Node& map, const std::string& where, const char* key) {
        YAML::Node n = map[key];
        if (!n) {
            errors.push_back(fmt::format("missing required key '{}'", join(where, key)));
        }
        return n;
    }

    static std::string join(const std::string& where, std::string_view key) {
        return where.empty() ? std::string(key) : fmt::format("{}.{}", where, key);
    }

    std::optional<double> real(const YAML::Node& n, const std::string& where) {
        if (n.IsScalar()) {
            try {
                return n.as<double>();
            } catch (const YAML::Exception&) {
            }
        }
        fail(where, "expected a number");
        return std::nullopt;
    }

    std::optional<long long> integer(const YAML::Node& n, const std::string& where, long long lo = 0,
                                     long long hi = std::numeric_limits<int>::max()) {
        if (n.IsScalar()) {
            try {
                const auto v = n.as<long long>();
                if (v >= lo && v <= hi) {
                    return v;
                }
                fail(where, fmt::format("value {} out of range [{}, {}]", v, lo, hi));
                return std::nullopt;
            } catch (const YAML::Exception&) {
            }
        }
        fail(where, "expected an integer");
        return std::nullopt;
    }

    std::optional<std::uint64_t> seed_value(const YAML::Node& n, const std::string& where) {
        if (n.IsScalar() && !n.Scalar().empty() && n.Scalar().front() != '-') {
            try {
                return n.as<std::uint64_t>();
            } catch (const YAML::Exception&) {
            }
        }
        fail(where, "expected an integer in [0, 2^64)");
        return std::nullopt;
    }

    std::optional<std::string> text(const YAML::Node& n, const std::string& where) {
        if (n.IsScalar() && !n.Scalar().empty()) {
            return n.Scalar();
        }
        fail(where, "expected a non-empty string");
        return std::nullopt;
    }

    // Assigns `out` only when the key is present and well-formed.
    void optional_real(const YAML::Node& map, const std::string& where, const char* key, double& out) {
        if (auto n = map[key]) {
            if (auto v = real(n, join(where, key))) {
                out = *v;
            }
        }
    }

    void optional_count(const YAML::Node& map, const std::string& where, const char* key, std::size_t& out) {
        if (auto n = map[key]) {
            if (auto v = integer(n, join(where, key))) {
                out = static_cast<std::size_t>(*v);
            }
        }
    }
};

Topology read_topology(Reader& r, const YAML::Node& node) {
    Topology topo;
    if (!r.is_map(node, "topology")) {
        return topo;
    }
    r.check_keys(node, "topology", {"nodes", "links", "paths"});

    if (auto nodes = r.required(node, "topology", "nodes"); nodes && r.is_seq(nodes, "topology.nodes")) {
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (auto id = r.text(nodes[i], fmt::format("topology.nodes[{}]", i))) {
                topo.nodes.push_back({*id, NodeKind::switch_node});
            }
        }
    }
    if (auto links = r.required(node, "topology", "links"); links && r.is_seq(links, "topology.links")) {
        for (std::size_t i = 0; i < links.size(); ++i) {
            const auto where = fmt::format("topology.links[{}]", i);
            const auto& l = links[i];
            if (!l.IsSequence() || l.size() != 3) {
                r.fail(where, "expected [node, node, base_delay_ms]");
                continue;
            }
            auto a = r.text(l[0], where);
            auto b = r.text(l[1], where);
            auto d = r.real(l[2], where);
            if (a && b && d) {
                topo.links.push_back({*a, *b, *d});
            }
        }
    }
    if (auto paths = r.required(node, "topology", "paths"); paths && r.is_seq(paths, "topology.paths")) {
        for (std::size_t i = 0; i < paths.size(); ++i) {
            const auto where = fmt::format("topology.paths[{}]", i);
            const auto& p = paths[i];
            if (!r.is_map(p, where)) {
                continue;
            }
            r.check_keys(p, where, {"id", "hops", "schedule", "jitter_std_ms"});
            PathDescriptor path;
            if (auto id = r.required(p, where, "id")) {
                path.id = r.text(id, where + ".id").value_or("");
            }
            if (auto hops = r.required(p, where, "hops"); hops && r.is_seq(hops, where + ".hops")) {
                for (std::size_t h = 0; h < hops.size(); ++h) {
                    if (auto hop = r.text(hops[h], fmt::format("{}.hops[{}]", where, h))) {
                        path.hops.push_back(*hop);
                    }
                }
            }
            if (auto sched = r.required(p, where, "schedule"); sched && r.is_seq(sched, where + ".schedule")) {
                for (std::size_t k = 0; k < sched.size(); ++k) {
                    const auto sw = fmt::format("{}.schedule[{}]", where, k);
                    if (!sched[k].IsSequence() || sched[k].size() != 2) {
                        r.fail(sw, "expected [start_ms, delay_ms]");
                        continue;
                    }
                    auto start = r.real(sched[k][0], sw);
                    auto delay = r.real(sched[k][1], sw);
                    if (start && delay) {
                        path.schedule.segments.push_back({*start, *delay});
                    }
                }
            }
            r.optional_real(p, where, "jitter_std_ms", path.schedule.jitter_std_ms);
            topo.paths.push_back(std::move(path));
        }
    }
    return topo;
}

std::vector<UserProfile> read_users(Reader& r, const YAML::Node& node) {
    std::vector<UserProfile> users;
    if (!r.is_seq(node, "users")) {
        return users;
    }
    for (std::size_t i = 0; i < node.size(); ++i) {
        const auto where = fmt::format("users[{}]", i);
        const auto& u = node[i];
        if (!r.is_map(u, where)) {
            continue;
        }
        r.check_keys(u, where, {"id", "class", "d0_ms", "ladder", "mode_floor_index"});
        UserProfile user;
        if (auto id = r.required(u, where, "id")) {
            user.user_id = r.text(id, where + ".id").value_or("");
        }
        if (auto cls = r.required(u, where, "class")) {
            const auto c = r.text(cls, where + ".class").value_or("");
            if (c == "premium") {
                user.user_class = UserClass::premium;
            } else if (c == "regular") {
                user.user_class = UserClass::regular;
            } else if (!c.empty()) {
                r.fail(where + ".class", fmt::format("expected 'premium' or 'regular', got '{}'", c));
            }
        }
        if (auto d0 = r.required(u, where, "d0_ms")) {
            user.card.d0_ms = r.real(d0, where + ".d0_ms").value_or(0.0);
        }
        if (auto ladder = r.required(u, where, "ladder"); ladder && r.is_seq(ladder, where + ".ladder")) {
            for (std::size_t k = 0; k < ladder.size(); ++k) {
                const auto lw = fmt::format("{}.ladder[{}]", where, k);
                if (!ladder[k].IsSequence() || ladder[k].size() != 2) {
                    r.fail(lw, "expected [fs_hz, fr_samples]");
                    continue;
                }
                auto fs = r.integer(ladder[k][0], lw, 1);
                auto fr = r.integer(ladder[k][1], lw, 1);
                if (fs && fr) {
                    user.card.supported_modes.push_back({static_cast<int>(*fs), static_cast<int>(*fr)});
                }
            }
        }
        if (auto floor = u["mode_floor_index"]) {
            if (auto v = r.integer(floor, where + ".mode_floor_index")) {
                user.mode_floor_index = static_cast<std::size_t>(*v);
            }
        }
        users.push_back(std::move(user));
    }
    return users;
}

std::vector<SessionSpec> read_sessions(Reader& r, const YAML::Node& node) {
    std::vector<SessionSpec> sessions;
    if (!r.is_seq(node, "sessions")) {
        return sessions;
    }
    for (std::size_t i = 0; i < node.size(); ++i) {
        const auto where = fmt::format("sessions[{}]", i);
        const auto& s = node[i];
        if (!r.is_map(s, where)) {
            continue;
        }
        r.check_keys(s, where, {"tx", "rx", "initial_mode_index"});
        SessionSpec spec;
        if (auto tx = r.required(s, where, "tx")) {
            spec.tx = r.text(tx, where + ".tx").value_or("");
        }
        if (auto rx = r.required(s, where, "rx")) {
            spec.rx = r.text(rx, where + ".rx").value_or("");
        }
        if (auto m = r.required(s, where, "initial_mode_index")) {
            spec.initial_mode_index = static_cast<std::size_t>(r.integer(m, where + ".initial_mode_index").value_or(0));
        }
        sessions.push_back(std::move(spec));
    }
    return sessions;
}

void read_sections(Reader& r, const YAML::Node& root, Scenario& s) {
    if (auto probe = root["probe"]; probe && r.is_map(probe, "probe")) {
        r.check_keys(probe, "probe", {"interval_ms", "alpha"});
        r.optional_real(probe, "probe", "interval_ms", s.probe.interval_ms);
        r.optional_real(probe, "probe", "alpha", s.probe.smoothing_alpha);
    }
    if (auto policy = root["policy"]; policy && r.is_map(policy, "policy")) {
        r.check_keys(policy, "policy",
                     {"hysteresis_ms", "backup_premium", "backup_regular", "upgrade_guard_ms", "switch_latency_ms"});
        r.optional_real(policy, "policy", "hysteresis_ms", s.policy.hysteresis_ms);
        r.optional_count(policy, "policy", "backup_premium", s.policy.backup_count_premium);
        r.optional_count(policy, "policy", "backup_regular", s.policy.backup_count_regular);
        r.optional_real(policy, "policy", "upgrade_guard_ms", s.adaptation.upgrade_guard_ms);
        r.optional_real(policy, "policy", "switch_latency_ms", s.adaptation.switch_latency_ms);
    }
    if (auto budget = root["budget"]; budget && r.is_map(budget, "budget")) {
        r.check_keys(budget, "budget", {"ept_ms"});
        r.optional_real(budget, "budget", "ept_ms", s.budget.ept_ms);
    }
    if (auto run = r.required(root, "", "run"); run && r.is_map(run, "run")) {
        r.check_keys(run, "run", {"duration_ms", "seed"});
        if (auto d = r.required(run, "run", "duration_ms")) {
            s.duration_ms = r.real(d, "run.duration_ms").value_or(0.0);
        }
        if (auto seed = r.required(run, "run", "seed")) {
            s.seed = r.seed_value(seed, "run.seed").value_or(0);
        }
    }
}

}  // namespace

ParseResult parse_scenario(std::string_view document) {
    ParseResult result;
    YAML::Node root;
    try {
        root = YAML::Load(std::string(document));
    } catch (const YAML::Exception& e) {
        result.errors.push_back(fmt::format("malformed document: {}", e.what()));
        return result;
    }
    if (root.IsNull()) {
        root = YAML::Node(YAML::NodeType::Map);
    }

    Reader r;
    Scenario s;
    if (r.is_map(root, "document")) {
        r.check_keys(root, "document", {"topology", "users", "sessions", "probe", "policy", "budget", "run"});
        if (auto topo = r.required(root, "", "topology")) {
            s.topology = read_topology(r, topo);
        }
        if (auto users = r.required(root, "", "users")) {
            s.users = read_users(r, users);
        }
        if (auto sessions = r.required(root, "", "sessions")) {
            s.sessions = read_sessions(r, sessions);
        }
        read_sections(r, root, s);
    }
    if (!r.errors.empty()) {
        result.errors = std::move(r.errors);
        return result;
    }

    for (auto& n : s.topology.nodes) {
        if (s.find_user(n.id)) {
            n.kind = NodeKind::user;
        }
    }
    result.errors = validate_scenario(s);
    if (result.errors.empty()) {
        result.scenario = std::move(s);
    }
    return result;
}

ParseResult load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        return {std::nullopt, {fmt::format("cannot open scenario file '{}'", path.string())}};
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    auto result = parse_scenario(buf.str());
    for (auto& e : result.errors) {
        e = fmt::format("{}: {}", path.string(), e);
    }
    return result;
}

namespace {

void emit_pair(YAML::Emitter& out, const auto& a, const auto& b) {
    out << YAML::Flow << YAML::BeginSeq << a << b << YAML::EndSeq;
}

}  // namespace

std::string serialize_scenario(const Scenario& s) {
    YAML::Emitter out;
    out.SetDoublePrecision(std::numeric_limits<double>::max_digits10);
    out << YAML::BeginMap;

    out << YAML::Key << "topology" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "nodes" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const auto& n : s.topology.nodes) {
        out << n.id;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "links" << YAML::Value << YAML::BeginSeq;
    for (const auto& l : s.topology.links) {
        out << YAML::Flow << YAML::BeginSeq << l.a << l.b << l.base_delay_ms << YAML::EndSeq;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "paths" << YAML::Value << YAML::BeginSeq;
    for (const auto& p : s.topology.paths) {
        out << YAML::BeginMap;
        out << YAML::Key << "id" << YAML::Value << p.id;
        out << YAML::Key << "hops" << YAML::Value << YAML::Flow << p.hops;
        out << YAML::Key << "schedule" << YAML::Value << YAML::BeginSeq;
        for (const auto& seg : p.schedule.segments) {
            emit_pair(out, seg.start_ms, seg.delay_ms);
        }
        out << YAML::EndSeq;
        out << YAML::Key << "jitter_std_ms" << YAML::Value << p.schedule.jitter_std_ms;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;

    out << YAML::Key << "users" << YAML::Value << YAML::BeginSeq;
    for (const auto& u : s.users) {
        out << YAML::BeginMap;
        out << YAML::Key << "id" << YAML::Value << u.user_id;
        out << YAML::Key << "class" << YAML::Value << (u.user_class == UserClass::premium ? "premium" : "regular");
        out << YAML::Key << "d0_ms" << YAML::Value << u.card.d0_ms;
        out << YAML::Key << "ladder" << YAML::Value << YAML::BeginSeq;
        for (const auto& m : u.card.supported_modes) {
            emit_pair(out, m.sampling_rate_hz, m.frame_size_samples);
        }
        out << YAML::EndSeq;
        if (u.mode_floor_index) {
            out << YAML::Key << "mode_floor_index" << YAML::Value << *u.mode_floor_index;
        }
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;

    out << YAML::Key << "sessions" << YAML::Value << YAML::BeginSeq;
    for (const auto& sess : s.sessions) {
        out << YAML::Flow << YAML::BeginMap << YAML::Key << "tx" << YAML::Value << sess.tx << YAML::Key << "rx"
            << YAML::Value << sess.rx << YAML::Key << "initial_mode_index" << YAML::Value << sess.initial_mode_index
            << YAML::EndMap;
    }
    out << YAML::EndSeq;

    out << YAML::Key << "probe" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "interval_ms" << YAML::Value << s.probe.interval_ms;
    out << YAML::Key << "alpha" << YAML::Value << s.probe.smoothing_alpha;
    out << YAML::EndMap;

    out << YAML::Key << "policy" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "hysteresis_ms" << YAML::Value << s.policy.hysteresis_ms;
    out << YAML::Key << "backup_premium" << YAML::Value << s.policy.backup_count_premium;
    out << YAML::Key << "backup_regular" << YAML::Value << s.policy.backup_count_regular;
    out << YAML::Key << "upgrade_guard_ms" << YAML::Value << s.adaptation.upgrade_guard_ms;
    out << YAML::Key << "switch_latency_ms" << YAML::Value << s.adaptation.switch_latency_ms;
    out << YAML::EndMap;

    out << YAML::Key << "budget" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "ept_ms" << YAML::Value << s.budget.ept_ms;
    out << YAML::EndMap;

    out << YAML::Key << "run" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "duration_ms" << YAML::Value << s.duration_ms;
    out << YAML::Key << "seed" << YAML::Value << s.seed;
    out << YAML::EndMap;

    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace nmp
