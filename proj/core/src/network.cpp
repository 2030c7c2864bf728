#include "nmp/network.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <set>

#include <fmt/format.h>

#include "nmp/errors.hpp"

namespace nmp {

std::size_t DelaySchedule::segment_index_at(double t_ms) const {
    auto it = std::upper_bound(segments.begin(), segments.end(), t_ms,
                               [](double t, const ScheduleSegment& s) { return t < s.start_ms; });
    return it == segments.begin() ? 0 : static_cast<std::size_t>(it - segments.begin()) - 1;
}

bool PathDescriptor::connects(std::string_view a, std::string_view b) const {
    if (hops.size() < 2) {
        return false;
    }
    return (hops.front() == a && hops.back() == b) || (hops.front() == b && hops.back() == a);
}

const Node* Topology::find_node(std::string_view id) const {
    auto it = std::find_if(nodes.begin(), nodes.end(), [&](const Node& n) { return n.id == id; });
    return it == nodes.end() ? nullptr : &*it;
}

const PathDescriptor* Topology::find_path(std::string_view id) const {
    auto it = std::find_if(paths.begin(), paths.end(), [&](const PathDescriptor& p) { return p.id == id; });
    return it == paths.end() ? nullptr : &*it;
}

bool Topology::has_link(std::string_view a, std::string_view b) const {
    return std::any_of(links.begin(), links.end(), [&](const Link& l) {
        return (l.a == a && l.b == b) || (l.a == b && l.b == a);
    });
}

double jittered_delay(double base_ms, double jitter_std_ms, std::string_view path_id, double t_ms,
                      std::uint64_t seed) {
    if (!(jitter_std_ms > 0.0)) {
        return std::max(0.0, base_ms);
    }
    const auto t_bits = std::bit_cast<std::uint64_t>(t_ms);
    std::vector<std::uint32_t> material{
        static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
        static_cast<std::uint32_t>(t_bits), static_cast<std::uint32_t>(t_bits >> 32)};
    for (unsigned char c : path_id) {
        material.push_back(c);
    }
    std::seed_seq seq(material.begin(), material.end());
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> noise(0.0, jitter_std_ms);
    return std::max(0.0, base_ms + noise(rng));
}

double path_delay_at(const PathDescriptor& path, double t_ms, std::uint64_t seed) {
    if (path.schedule.segments.empty()) {
        throw Error(ErrorCode::configuration, "path " + path.id + " has an empty delay schedule");
    }
    if (!(t_ms >= 0.0)) {
        throw Error(ErrorCode::invalid_argument, fmt::format("negative time {}", t_ms));
    }
    const auto& seg = path.schedule.segments[path.schedule.segment_index_at(t_ms)];
    return jittered_delay(seg.delay_ms, path.schedule.jitter_std_ms, path.id, t_ms, seed);
}

std::vector<std::string> validate_schedule(const PathId& id, const DelaySchedule& schedule) {
    std::vector<std::string> out;
    const auto& segs = schedule.segments;
    if (segs.empty()) {
        out.push_back(fmt::format("path {}: schedule is empty", id));
        return out;
    }
    if (segs.front().start_ms != 0.0) {
        out.push_back(fmt::format("path {}: first schedule segment starts at {} instead of 0", id,
                                  segs.front().start_ms));
    }
    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (!std::isfinite(segs[i].delay_ms) || segs[i].delay_ms < 0.0) {
            out.push_back(fmt::format("path {}: schedule[{}] delay {} is not a finite value >= 0", id, i,
                                      segs[i].delay_ms));
        }
        if (i > 0 && !(segs[i].start_ms > segs[i - 1].start_ms)) {
            out.push_back(fmt::format("path {}: schedule[{}] start {} is not after {}", id, i,
                                      segs[i].start_ms, segs[i - 1].start_ms));
        }
    }
    if (!std::isfinite(schedule.jitter_std_ms) || schedule.jitter_std_ms < 0.0) {
        out.push_back(fmt::format("path {}: jitter_std_ms {} is not a finite value >= 0", id,
                                  schedule.jitter_std_ms));
    }
    return out;
}

std::vector<std::string> validate_topology(const Topology& topo, std::span<const EndpointPair> endpoints) {
    std::vector<std::string> out;

    std::set<std::string_view> seen_nodes;
    for (const auto& n : topo.nodes) {
        if (n.id.empty()) {
            out.emplace_back("node with an empty id");
        } else if (!seen_nodes.insert(n.id).second) {
            out.push_back(fmt::format("duplicate node {}", n.id));
        }
    }
    for (const auto& l : topo.links) {
        for (const auto* end : {&l.a, &l.b}) {
            if (!topo.find_node(*end)) {
                out.push_back(fmt::format("link {}-{} references unknown node {}", l.a, l.b, *end));
            }
        }
        if (!(l.base_delay_ms >= 0.0)) {
            out.push_back(fmt::format("link {}-{} has negative base delay", l.a, l.b));
        }
    }

    std::set<std::string_view> seen_paths;
    for (const auto& p : topo.paths) {
        if (p.id.empty()) {
            out.emplace_back("path with an empty id");
        } else if (!seen_paths.insert(p.id).second) {
            out.push_back(fmt::format("duplicate path {}", p.id));
        }
        if (p.hops.size() < 2) {
            out.push_back(fmt::format("path {} has fewer than 2 hops", p.id));
        }
        bool hops_known = true;
        for (const auto& h : p.hops) {
            if (!topo.find_node(h)) {
                out.push_back(fmt::format("path {} references unknown node {}", p.id, h));
                hops_known = false;
            }
        }
        if (hops_known && p.hops.size() >= 2) {
            for (const auto* end : {&p.hops.front(), &p.hops.back()}) {
                if (topo.find_node(*end)->kind != NodeKind::user) {
                    out.push_back(fmt::format("path {} endpoint {} is not a user node", p.id, *end));
                }
            }
            for (std::size_t i = 1; i < p.hops.size(); ++i) {
                if (!topo.has_link(p.hops[i - 1], p.hops[i])) {
                    out.push_back(fmt::format("path {} uses missing link {}-{}", p.id, p.hops[i - 1], p.hops[i]));
                }
            }
        }
        auto sched = validate_schedule(p.id, p.schedule);
        out.insert(out.end(), sched.begin(), sched.end());
    }

    if (endpoints.empty()) {
        if (topo.paths.empty()) {
            out.emplace_back("topology declares no paths");
        }
    } else {
        for (const auto& e : endpoints) {
            const bool connected = std::any_of(topo.paths.begin(), topo.paths.end(),
                                               [&](const PathDescriptor& p) { return p.connects(e.tx, e.rx); });
            if (!connected) {
                out.push_back(fmt::format("no path between {} and {}", e.tx, e.rx));
            }
        }
    }
    return out;
}

Topology reference_topology() {
    Topology t;
    t.nodes = {{"A", NodeKind::user},         {"B", NodeKind::user},         {"s1", NodeKind::switch_node},
               {"s2", NodeKind::switch_node}, {"s3", NodeKind::switch_node}, {"s4", NodeKind::switch_node},
               {"s5", NodeKind::switch_node}};
    t.links = {{"A", "s1", 0.1},  {"s1", "s2", 0.3}, {"s1", "s3", 0.3}, {"s1", "s4", 0.3},
               {"s2", "s5", 0.3}, {"s3", "s5", 0.3}, {"s4", "s5", 0.3}, {"s5", "B", 0.1}};
    const DelaySchedule flat{{{0.0, 1.0}}, 0.0};
    t.paths = {{"P1", {"A", "s1", "s2", "s5", "B"}, flat},
               {"P2", {"A", "s1", "s3", "s5", "B"}, flat},
               {"P3", {"A", "s1", "s4", "s5", "B"}, flat}};
    return t;
}

}  // namespace nmp
