#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "nmp/controller.hpp"
#include "nmp/errors.hpp"

namespace nmp {
namespace {

const std::vector<PathId> kPaths{"P1", "P2", "P3"};

FlowAssignment assignment(PathId active, std::vector<PathId> backups, std::size_t capacity) {
    return {"A->B", std::move(active), std::move(backups), 0.0, capacity};
}

TEST(AssignInitialPath, PremiumGetsTwoBackups) {
    const auto a = assign_initial_path("A->B", UserClass::premium, kPaths, {{"P1", 5}, {"P2", 9}, {"P3", 11}}, {}, 0);
    EXPECT_EQ(a.active_path, "P1");
    EXPECT_EQ(a.backups, (std::vector<PathId>{"P2", "P3"}));
    EXPECT_EQ(a.backup_capacity, 2u);
}

TEST(AssignInitialPath, TieBrokenByDeclarationOrder) {
    const std::vector<PathId> two{"P1", "P2"};
    const auto a = assign_initial_path("A->B", UserClass::regular, two, {{"P2", 5}, {"P1", 5}}, {}, 0);
    EXPECT_EQ(a.active_path, "P1");
    EXPECT_EQ(a.backups, (std::vector<PathId>{"P2"}));

    // Declaration order, not lexical order.
    const std::vector<PathId> reversed{"P2", "P1"};
    EXPECT_EQ(assign_initial_path("A->B", UserClass::regular, reversed, {{"P2", 5}, {"P1", 5}}, {}, 0).active_path,
              "P2");
}

TEST(AssignInitialPath, RegularTrimsToOneBackup) {
    const auto a = assign_initial_path("A->B", UserClass::regular, kPaths, {{"P1", 9}, {"P2", 5}, {"P3", 7}}, {}, 0);
    EXPECT_EQ(a.active_path, "P2");
    EXPECT_EQ(a.backups, (std::vector<PathId>{"P3"}));
}

TEST(AssignInitialPath, NoMeasuredPath) {
    try {
        assign_initial_path("A->B", UserClass::premium, kPaths, {}, {}, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::no_path);
    }
    // Estimates for paths that are not candidates do not count.
    EXPECT_THROW(assign_initial_path("A->B", UserClass::premium, kPaths, {{"Q1", 1.0}}, {}, 0), Error);
}

TEST(RerouteDecision, Examples) {
    const auto a = assignment("P1", {"P2", "P3"}, 2);
    EXPECT_EQ(reroute_decision(a, kPaths, {{"P1", 10.0}, {"P2", 7.5}, {"P3", 9.0}}, {}), PathId("P2"));
    EXPECT_EQ(reroute_decision(a, kPaths, {{"P1", 10.0}, {"P2", 8.5}, {"P3", 9.5}}, {}), std::nullopt);
    EXPECT_EQ(reroute_decision(a, kPaths, {{"P1", 10.0}, {"P2", 10.0}, {"P3", 10.0}}, {}), std::nullopt);
}

TEST(RerouteDecision, ExactThresholdReroutes) {
    const auto a = assignment("P1", {"P2"}, 1);
    EXPECT_EQ(reroute_decision(a, kPaths, {{"P1", 5.0}, {"P2", 3.0}}, {}), PathId("P2"));
}

TEST(RerouteDecision, ConsidersNonBackupCandidates) {
    const auto a = assignment("P1", {"P2"}, 1);
    EXPECT_EQ(reroute_decision(a, kPaths, {{"P1", 10.0}, {"P2", 9.0}, {"P3", 1.0}}, {}), PathId("P3"));
}

TEST(RerouteDecision, TieBetweenCandidatesGoesToDeclarationOrder) {
    const auto a = assignment("P1", {}, 0);
    EXPECT_EQ(reroute_decision(a, kPaths, {{"P1", 10.0}, {"P2", 3.0}, {"P3", 3.0}}, {}), PathId("P2"));
}

TEST(RerouteDecision, StaleSnapshot) {
    try {
        reroute_decision(assignment("P1", {}, 0), kPaths, {{"P2", 1.0}}, {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::stale_snapshot);
    }
}

TEST(ApplyReroute, SwapAndResort) {
    const DelaySnapshot snap{{"P1", 10.0}, {"P2", 4.0}, {"P3", 6.0}};
    const auto out = apply_reroute(assignment("P1", {"P2", "P3"}, 2), "P2", kPaths, snap, 65000);
    EXPECT_EQ(out.assignment.active_path, "P2");
    EXPECT_EQ(out.assignment.backups, (std::vector<PathId>{"P3", "P1"}));
    EXPECT_EQ(out.assignment.installed_at_ms, 65000.0);
    EXPECT_EQ(out.record.from_path, "P1");
    EXPECT_EQ(out.record.to_path, "P2");
    EXPECT_EQ(out.record.from_estimate_ms, 10.0);
    EXPECT_EQ(out.record.to_estimate_ms, 4.0);
}

TEST(ApplyReroute, TrimsWorstAtCapacity) {
    const auto a = assignment("P1", {"P2"}, 1);
    EXPECT_EQ(apply_reroute(a, "P3", kPaths, {{"P1", 8.0}, {"P2", 9.0}, {"P3", 1.0}}, 0).assignment.backups,
              (std::vector<PathId>{"P1"}));
    EXPECT_EQ(apply_reroute(a, "P3", kPaths, {{"P1", 9.0}, {"P2", 8.0}, {"P3", 1.0}}, 0).assignment.backups,
              (std::vector<PathId>{"P2"}));
}

TEST(ApplyReroute, InvalidTargets) {
    const DelaySnapshot snap{{"P1", 8.0}, {"P2", 1.0}};
    for (const PathId target : {"P1", "P9"}) {
        try {
            apply_reroute(assignment("P1", {"P2"}, 1), target, kPaths, snap, 0);
            FAIL() << target;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::invalid_path);
        }
    }
}

TEST(ReroutePolicy, Validation) {
    EXPECT_TRUE(ReroutePolicy{}.validate().empty());
    EXPECT_EQ((ReroutePolicy{0.0, 2, 1}.validate().size()), 1u);
    EXPECT_EQ((ReroutePolicy{2.0, 1, 2}.validate().size()), 1u);
}

// Brute force over candidates: the reference answer for reroute_decision.
std::optional<PathId> oracle_decision(const PathId& active, const std::vector<PathId>& cands,
                                      const DelaySnapshot& snap, double hysteresis) {
    std::optional<PathId> best;
    for (const auto& id : cands) {
        if (id == active || !snap.contains(id)) {
            continue;
        }
        if (!best || snap.at(id) < snap.at(*best)) {
            best = id;
        }
    }
    if (best && snap.at(active) - snap.at(*best) >= hysteresis) {
        return best;
    }
    return std::nullopt;
}

TEST(RerouteProperties, RandomSnapshots) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> n_paths(1, 6);
    std::uniform_real_distribution<double> est(0.0, 30.0);
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    std::bernoulli_distribution coarse(0.3);

    for (int i = 0; i < 3000; ++i) {
        const int n = n_paths(rng);
        std::vector<PathId> cands;
        DelaySnapshot snap;
        for (int p = 0; p < n; ++p) {
            cands.push_back("P" + std::to_string(p + 1));
            // Coarse values make ties and exact-threshold gaps common.
            snap[cands.back()] = coarse(rng) ? std::round(est(rng)) : est(rng);
        }
        const ReroutePolicy policy;
        const auto a = assign_initial_path("s", UserClass::premium, cands, snap, policy, 0);
        auto active = assignment(cands[static_cast<std::size_t>(i) % cands.size()], {}, 2);

        const auto got = reroute_decision(active, cands, snap, policy);
        EXPECT_EQ(got, oracle_decision(active.active_path, cands, snap, policy.hysteresis_ms));
        if (got) {
            EXPECT_LE(snap.at(*got), snap.at(active.active_path));
            const auto moved = apply_reroute(active, *got, cands, snap, 1.0);
            EXPECT_EQ(reroute_decision(moved.assignment, cands, snap, policy), std::nullopt);
            EXPECT_EQ(std::count(moved.assignment.backups.begin(), moved.assignment.backups.end(), *got), 0);
            EXPECT_LE(moved.assignment.backups.size(), 2u);
        }
        // The initial assignment is already optimal, so it never reroutes.
        EXPECT_EQ(reroute_decision(a, cands, snap, policy), std::nullopt);

        // Scaling estimates and hysteresis by the same power of two keeps the choice.
        const double k = std::exp2(std::round(std::log2(scale(rng))));
        DelaySnapshot scaled;
        for (const auto& [id, v] : snap) {
            scaled[id] = v * k;
        }
        ReroutePolicy scaled_policy = policy;
        scaled_policy.hysteresis_ms *= k;
        EXPECT_EQ(reroute_decision(active, cands, scaled, scaled_policy), got);
    }
}

TEST(RerouteProperties, MonotoneDegradationVisitsPathsInOrder) {
    // P1 degrades first, then P2; P3 stays flat.
    auto delay = [](const PathId& id, double t) {
        if (id == "P1") return 1.0 + 0.1 * t;
        if (id == "P2") return t < 50 ? 1.5 : 1.5 + 0.1 * (t - 50);
        return 6.0;
    };
    const ReroutePolicy policy;
    DelaySnapshot snap;
    for (const auto& id : kPaths) snap[id] = delay(id, 0);
    auto a = assign_initial_path("s", UserClass::premium, kPaths, snap, policy, 0);
    std::vector<PathId> visited{a.active_path};
    for (double t = 1; t < 200; t += 1) {
        for (const auto& id : kPaths) snap[id] = delay(id, t);
        if (auto next = reroute_decision(a, kPaths, snap, policy)) {
            a = apply_reroute(a, *next, kPaths, snap, t).assignment;
            visited.push_back(*next);
        }
    }
    EXPECT_EQ(visited, (std::vector<PathId>{"P1", "P2", "P3"}));
}

}  // namespace
}  // namespace nmp
