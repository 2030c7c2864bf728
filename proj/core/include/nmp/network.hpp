#pragma once
/**
 * @file network.hpp
 * @brief Emulated topology: user and switch nodes, descriptive links, and
 * candidate user-to-user paths whose one-way delay follows a step schedule.
 *
 * Delay is modeled per path, not per link. Link base delays are carried for
 * documentation and validation only.
 */

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nmp {

using NodeId = std::string;
using PathId = std::string;

enum class NodeKind { user, switch_node };

struct Node {
    NodeId id;
    NodeKind kind{NodeKind::switch_node};

    friend bool operator==(const Node&, const Node&) = default;
};

/// Undirected.
struct Link {
    NodeId a;
    NodeId b;
    double base_delay_ms{0.0};

    friend bool operator==(const Link&, const Link&) = default;
};

struct ScheduleSegment {
    double start_ms{};
    double delay_ms{};

    friend bool operator==(const ScheduleSegment&, const ScheduleSegment&) = default;
};

/// Piecewise-constant delay: the active segment at t is the last one with
/// start_ms <= t. Optional zero-mean Gaussian jitter is added on top and the
/// result clamped at zero.
struct DelaySchedule {
    std::vector<ScheduleSegment> segments;
    double jitter_std_ms{0.0};

    /// Index of the active segment at t. Requires a non-empty schedule.
    std::size_t segment_index_at(double t_ms) const;

    friend bool operator==(const DelaySchedule&, const DelaySchedule&) = default;
};

struct PathDescriptor {
    PathId id;
    std::vector<NodeId> hops;
    DelaySchedule schedule;

    /// True if the path runs between a and b in either direction.
    bool connects(std::string_view a, std::string_view b) const;

    friend bool operator==(const PathDescriptor&, const PathDescriptor&) = default;
};

struct Topology {
    std::vector<Node> nodes;
    std::vector<Link> links;
    std::vector<PathDescriptor> paths;

    const Node* find_node(std::string_view id) const;
    const PathDescriptor* find_path(std::string_view id) const;
    bool has_link(std::string_view a, std::string_view b) const;

    friend bool operator==(const Topology&, const Topology&) = default;
};

struct EndpointPair {
    NodeId tx;
    NodeId rx;
};

/// Seeded jitter added to `base_ms`, clamped at zero. The draw depends only on
/// (seed, path id, t) so any two evaluations of the same probe agree.
double jittered_delay(double base_ms, double jitter_std_ms, std::string_view path_id, double t_ms,
                      std::uint64_t seed);

/// Delay of `path` at time t. Throws Error(configuration) on an empty
/// schedule and Error(invalid_argument) for t < 0.
double path_delay_at(const PathDescriptor& path, double t_ms, std::uint64_t seed);

/// Schedule invariants for one path; messages are prefixed with the path id.
std::vector<std::string> validate_schedule(const PathId& id, const DelaySchedule& schedule);

/// Every violated topology invariant, one message each naming the offending
/// element. `endpoints` lists the transmitter/receiver pairs that must be
/// connected; when empty, the topology must still carry at least one path.
std::vector<std::string> validate_topology(const Topology& topo,
                                           std::span<const EndpointPair> endpoints = {});

/// Two users joined by three disjoint three-switch paths P1, P2, P3, all at
/// a constant 1 ms.
Topology reference_topology();

}  // namespace nmp
