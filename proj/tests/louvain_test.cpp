// SPDX-License-Identifier: Apache-2.0
#include <random>

#include <gtest/gtest.h>

#include "agentic/mindmap/louvain.hpp"
#include "graph_oracles.hpp"

using namespace agentic;
using namespace agentic::support;

TEST(Modularity, MatchesDenseDefinitionOnAllPartitions) {
    for (const auto& g : community_suite()) {
        if (g.n > 6) continue;
        auto wg = build(g);
        for_each_partition(g.n, [&](const std::vector<std::size_t>& c) {
            ASSERT_NEAR(graph::modularity(wg, c), dense_modularity(g, c), 1e-12) << g.name;
        });
    }
}

TEST(Modularity, SelfLoopConvention) {
    NamedGraph g{"loop", 2, {{0, 0, 1.0}, {0, 1, 1.0}}};
    auto wg = build(g);
    EXPECT_DOUBLE_EQ(wg.degree(0), 3.0);
    EXPECT_DOUBLE_EQ(wg.total_weight(), 2.0);
    EXPECT_NEAR(graph::modularity(wg, {0, 0}), 0.0, 1e-12);
    EXPECT_NEAR(graph::modularity(wg, {0, 1}), dense_modularity(g, {0, 1}), 1e-12);
}

TEST(Modularity, HandCountedTwoTriangles) {
    // m = 7; each triangle has 3 internal edges and degree sum 7.
    auto g = two_triangles();
    double expected = 2 * (3.0 / 7 - (7.0 / 14) * (7.0 / 14));
    EXPECT_NEAR(graph::modularity(build(g), {0, 0, 0, 1, 1, 1}), expected, 1e-12);
}

// Plain local moving plus aggregation lands in a local optimum on these
// three suite members.
static bool known_gap(const std::string& name) {
    return name == "path P6" || name == "path P8" || name == "cycle C8";
}

TEST(Louvain, ReachesExhaustiveOptimumOnSuite) {
    for (const auto& g : community_suite()) {
        auto result = graph::louvain(build(g));
        double q = dense_modularity(g, result.community);
        double best = exhaustive_max_modularity(g);
        if (known_gap(g.name)) {
            EXPECT_LT(q, best - 1e-9) << g.name;
        } else {
            EXPECT_NEAR(q, best, 1e-9) << g.name;
        }
    }
}

TEST(Louvain, ModularityNeverDecreasesAcrossSweeps) {
    std::mt19937 rng(3);
    auto check = [](const NamedGraph& g) {
        auto r = graph::louvain(build(g));
        for (std::size_t i = 1; i < r.modularity_history.size(); ++i) {
            ASSERT_GE(r.modularity_history[i], r.modularity_history[i - 1] - 1e-12) << g.name;
        }
        if (!r.modularity_history.empty()) {
            ASSERT_NEAR(r.modularity_history.back(), dense_modularity(g, r.community), 1e-9) << g.name;
        }
    };
    for (const auto& g : community_suite()) check(g);
    for (int t = 0; t < 500; ++t) {
        NamedGraph g{"random", std::size_t(rng() % 12 + 2), {}};
        for (std::size_t i = 0; i < g.n; ++i) {
            for (std::size_t j = i + 1; j < g.n; ++j) {
                if (rng() % 3 == 0) g.edges.push_back({i, j, double(rng() % 4 + 1)});
            }
        }
        check(g);
    }
}

TEST(Louvain, RecoversPlantedPartitions) {
    EXPECT_EQ(graph::louvain(build(two_triangles())).community, (std::vector<std::size_t>{0, 0, 0, 1, 1, 1}));
    EXPECT_EQ(graph::louvain(build(two_k4())).community, (std::vector<std::size_t>{0, 0, 0, 0, 1, 1, 1, 1}));
}

TEST(Louvain, IsDeterministic) {
    auto g = build(cycle(8));
    auto a = graph::louvain(g);
    auto b = graph::louvain(g);
    EXPECT_EQ(a.community, b.community);
    EXPECT_EQ(a.modularity_history, b.modularity_history);
}

TEST(Louvain, EdgelessGraphStaysSingletons) {
    graph::WeightedGraph g(3);
    EXPECT_EQ(graph::louvain(g).community, (std::vector<std::size_t>{0, 1, 2}));
}

// Greedy local moving is a heuristic: on some small graphs outside the suite
// it stops short of the optimum.  It never exceeds it.
TEST(Louvain, NeverExceedsOptimumOnRandomGraphs) {
    std::mt19937 rng(99);
    int below = 0;
    for (int t = 0; t < 300; ++t) {
        NamedGraph g{"random", std::size_t(rng() % 5 + 3), {}};
        for (std::size_t i = 0; i < g.n; ++i) {
            for (std::size_t j = i + 1; j < g.n; ++j) {
                if (rng() % 2 == 0) g.edges.push_back({i, j, double(rng() % 3 + 1)});
            }
        }
        double q = dense_modularity(g, graph::louvain(build(g)).community);
        double best = exhaustive_max_modularity(g);
        ASSERT_LE(q, best + 1e-9);
        below += q < best - 1e-9;
    }
    RecordProperty("suboptimal_random_graphs", below);
}
