// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "agentic/mindmap/louvain.hpp"

namespace agentic::support {

struct Edge {
    std::size_t u;
    std::size_t v;
    double w;
};

struct NamedGraph {
    std::string name;
    std::size_t n;
    std::vector<Edge> edges;
};

inline graph::WeightedGraph build(const NamedGraph& g) {
    graph::WeightedGraph out(g.n);
    for (const auto& e : g.edges) out.add_edge(e.u, e.v, e.w);
    return out;
}

/// Modularity straight from the dense definition, independent of
/// graph::modularity.
inline double dense_modularity(const NamedGraph& g, const std::vector<std::size_t>& c) {
    std::vector<std::vector<double>> a(g.n, std::vector<double>(g.n, 0.0));
    for (const auto& e : g.edges) {
        if (e.u == e.v) {
            a[e.u][e.u] += 2 * e.w;
        } else {
            a[e.u][e.v] += e.w;
            a[e.v][e.u] += e.w;
        }
    }
    std::vector<double> k(g.n, 0.0);
    double two_m = 0;
    for (std::size_t i = 0; i < g.n; ++i) {
        for (std::size_t j = 0; j < g.n; ++j) k[i] += a[i][j];
        two_m += k[i];
    }
    if (two_m == 0) return 0;
    double q = 0;
    for (std::size_t i = 0; i < g.n; ++i) {
        for (std::size_t j = 0; j < g.n; ++j) {
            if (c[i] == c[j]) q += a[i][j] - k[i] * k[j] / two_m;
        }
    }
    return q / two_m;
}

/// Calls f on every set partition of n nodes (restricted growth strings).
inline void for_each_partition(std::size_t n, const std::function<void(const std::vector<std::size_t>&)>& f) {
    std::vector<std::size_t> c(n, 0);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t used) {
        if (i == n) {
            f(c);
            return;
        }
        for (std::size_t l = 0; l <= used && l < n; ++l) {
            c[i] = l;
            rec(i + 1, std::max(used, l + 1));
        }
    };
    if (n == 0) {
        f(c);
        return;
    }
    rec(0, 0);
}

inline double exhaustive_max_modularity(const NamedGraph& g) {
    double best = -1.0;
    for_each_partition(g.n, [&](const std::vector<std::size_t>& c) { best = std::max(best, dense_modularity(g, c)); });
    return best;
}

inline NamedGraph path(std::size_t n) {
    NamedGraph g{"path P" + std::to_string(n), n, {}};
    for (std::size_t i = 0; i + 1 < n; ++i) g.edges.push_back({i, i + 1, 1.0});
    return g;
}

inline NamedGraph cycle(std::size_t n) {
    auto g = path(n);
    g.name = "cycle C" + std::to_string(n);
    g.edges.push_back({n - 1, 0, 1.0});
    return g;
}

inline NamedGraph star(std::size_t leaves) {
    NamedGraph g{"star S" + std::to_string(leaves), leaves + 1, {}};
    for (std::size_t i = 1; i <= leaves; ++i) g.edges.push_back({0, i, 1.0});
    return g;
}

inline NamedGraph complete(std::size_t n) {
    NamedGraph g{"complete K" + std::to_string(n), n, {}};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) g.edges.push_back({i, j, 1.0});
    }
    return g;
}

inline NamedGraph two_triangles() {
    return {"two triangles + bridge", 6, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {3, 4, 1}, {4, 5, 1}, {3, 5, 1}, {2, 3, 1}}};
}

inline NamedGraph two_k4() {
    NamedGraph g{"two K4 + bridge", 8, {}};
    for (std::size_t base : {0u, 4u}) {
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = i + 1; j < 4; ++j) g.edges.push_back({base + i, base + j, 1.0});
        }
    }
    g.edges.push_back({3, 4, 1.0});
    return g;
}

/// The fixed structured suite for the community-detection oracle.  Chosen
/// before any run; graphs are all connected and have at most 8 nodes.
inline std::vector<NamedGraph> community_suite() {
    std::vector<NamedGraph> suite;
    suite.push_back({"single edge", 2, {{0, 1, 1.0}}});
    suite.push_back(complete(3));
    for (std::size_t n = 4; n <= 8; ++n) suite.push_back(path(n));
    for (std::size_t n = 4; n <= 8; ++n) suite.push_back(cycle(n));
    for (std::size_t k = 3; k <= 7; ++k) suite.push_back(star(k));
    suite.push_back(complete(4));
    suite.push_back(complete(5));
    suite.push_back(two_triangles());
    suite.push_back(two_k4());
    suite.push_back({"weighted barbell 3-3",
                     6,
                     {{0, 1, 3}, {1, 2, 3}, {0, 2, 3}, {3, 4, 2}, {4, 5, 2}, {3, 5, 2}, {2, 3, 0.5}}});
    suite.push_back({"weighted barbell 4-4",
                     8,
                     {{0, 1, 2}, {0, 2, 2}, {0, 3, 2}, {1, 2, 2}, {1, 3, 2}, {2, 3, 2},
                      {4, 5, 1}, {4, 6, 1}, {4, 7, 1}, {5, 6, 1}, {5, 7, 1}, {6, 7, 1}, {3, 4, 0.25}}});
    suite.push_back({"kinship chain",
                     7,
                     {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {0, 4, 1}, {4, 5, 1}, {5, 6, 1}, {1, 4, 0.5}}});
    suite.push_back({"weighted ring of pairs",
                     8,
                     {{0, 1, 5}, {2, 3, 5}, {4, 5, 5}, {6, 7, 5}, {1, 2, 1}, {3, 4, 1}, {5, 6, 1}, {7, 0, 1}}});
    return suite;
}

}  // namespace agentic::support
