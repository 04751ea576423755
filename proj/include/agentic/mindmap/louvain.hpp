// SPDX-License-Identifier: Apache-2.0
#pragma once

// Weighted undirected graphs, modularity, and deterministic Louvain
// clustering.  Header-only; no dependency on the knowledge-graph types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

namespace agentic::graph {

/// Undirected weighted graph over nodes 0..n-1.  Off-diagonal weights are
/// stored symmetrically in `adjacency`; a self-loop of weight w contributes
/// A_ii = 2w and 2w to the node's degree.
class WeightedGraph {
public:
    explicit WeightedGraph(std::size_t n = 0) : adjacency_(n), self_loops_(n, 0.0) {}

    std::size_t size() const noexcept { return adjacency_.size(); }

    /// Accumulates weight onto edge {u, v}.
    void add_edge(std::size_t u, std::size_t v, double w) {
        if (u == v) {
            self_loops_[u] += w;
            return;
        }
        adjacency_[u][v] += w;
        adjacency_[v][u] += w;
    }

    const std::map<std::size_t, double>& neighbors(std::size_t u) const { return adjacency_[u]; }
    double self_loop(std::size_t u) const { return self_loops_[u]; }

    double degree(std::size_t u) const {
        double k = 2.0 * self_loops_[u];
        for (const auto& [v, w] : adjacency_[u]) k += w;
        return k;
    }

    /// m: every edge counted once, self-loops included.
    double total_weight() const {
        double twice = 0.0;
        for (std::size_t u = 0; u < size(); ++u) twice += degree(u);
        return twice / 2.0;
    }

    /// A_uv with the self-loop convention above.
    double weight(std::size_t u, std::size_t v) const {
        if (u == v) return 2.0 * self_loops_[u];
        auto it = adjacency_[u].find(v);
        return it == adjacency_[u].end() ? 0.0 : it->second;
    }

private:
    std::vector<std::map<std::size_t, double>> adjacency_;
    std::vector<double> self_loops_;
};

/// Q = (1/2m) sum_ij [A_ij - k_i k_j / 2m] delta(c_i, c_j).  Zero when the
/// graph has no edges.
inline double modularity(const WeightedGraph& g, const std::vector<std::size_t>& community) {
    const double m = g.total_weight();
    if (m <= 0.0) return 0.0;
    std::map<std::size_t, double> inside;
    std::map<std::size_t, double> total;
    for (std::size_t u = 0; u < g.size(); ++u) {
        total[community[u]] += g.degree(u);
        inside[community[u]] += 2.0 * g.self_loop(u);
        for (const auto& [v, w] : g.neighbors(u)) {
            if (community[v] == community[u]) inside[community[u]] += w;
        }
    }
    double q = 0.0;
    for (const auto& [c, tot] : total) {
        q += inside[c] / (2.0 * m) - (tot / (2.0 * m)) * (tot / (2.0 * m));
    }
    return q;
}

/// Relabels communities 0..k-1 in order of their lowest member node.
inline std::vector<std::size_t> canonical_labels(const std::vector<std::size_t>& community) {
    std::map<std::size_t, std::size_t> relabel;
    std::vector<std::size_t> out(community.size());
    for (std::size_t u = 0; u < community.size(); ++u) {
        auto [it, inserted] = relabel.try_emplace(community[u], relabel.size());
        out[u] = it->second;
    }
    return out;
}

struct LouvainResult {
    /// Community label per node, canonical (see canonical_labels).
    std::vector<std::size_t> community;
    /// Modularity of the full-graph partition after every local-moving sweep.
    std::vector<double> modularity_history;
    std::size_t levels = 0;
    std::size_t moves = 0;
};

namespace detail {

// One local-moving phase.  Nodes are visited in ascending order; a node
// moves only when some neighbouring community strictly beats staying, ties
// among the best going to the lowest community id.  `on_sweep` runs after
// every sweep.  Returns true if any node moved.
template <typename OnSweep>
bool local_moving(const WeightedGraph& g, std::vector<std::size_t>& community, std::size_t& moves,
                  OnSweep&& on_sweep) {
    constexpr double kEps = 1e-12;
    const double m = g.total_weight();
    if (m <= 0.0) return false;
    const double two_m = 2.0 * m;
    const std::size_t n = g.size();

    std::vector<double> degree(n);
    std::vector<double> total(n, 0.0);
    for (std::size_t u = 0; u < n; ++u) {
        degree[u] = g.degree(u);
        total[community[u]] += degree[u];
    }

    bool any = false;
    bool moved = true;
    while (moved) {
        moved = false;
        for (std::size_t u = 0; u < n; ++u) {
            const std::size_t home = community[u];
            std::map<std::size_t, double> links;  // community -> weight from u
            links[home] += 0.0;
            for (const auto& [v, w] : g.neighbors(u)) links[community[v]] += w;

            total[home] -= degree[u];
            auto gain = [&](std::size_t c) { return links[c] - total[c] * degree[u] / two_m; };
            const double stay = gain(home);
            std::size_t best = home;
            double best_gain = stay;
            for (const auto& [c, _] : links) {
                if (c == home) continue;
                const double g_c = gain(c);
                const double scale = std::max({1.0, std::abs(g_c), std::abs(best_gain)});
                if (best == home) {
                    if (g_c > stay + kEps * scale) {
                        best = c;
                        best_gain = g_c;
                    }
                } else if (g_c > best_gain + kEps * scale) {
                    best = c;
                    best_gain = g_c;
                }
                // Equal gains keep the earlier (lower) id: links is ordered.
            }
            total[best] += degree[u];
            if (best != home) {
                community[u] = best;
                moved = true;
                any = true;
                ++moves;
            }
        }
        on_sweep();
    }
    return any;
}

inline WeightedGraph aggregate(const WeightedGraph& g, const std::vector<std::size_t>& community, std::size_t k) {
    WeightedGraph out(k);
    for (std::size_t u = 0; u < g.size(); ++u) {
        if (g.self_loop(u) != 0.0) out.add_edge(community[u], community[u], g.self_loop(u));
        for (const auto& [v, w] : g.neighbors(u)) {
            if (u < v) out.add_edge(community[u], community[v], w);
        }
    }
    return out;
}

}  // namespace detail

/// Deterministic Louvain: local moving, aggregation, repeat until a level
/// moves nothing.  Isolated nodes stay singletons; a graph without edges is
/// all singletons.
inline LouvainResult louvain(const WeightedGraph& graph) {
    LouvainResult result;
    const std::size_t n = graph.size();
    result.community.resize(n);
    std::iota(result.community.begin(), result.community.end(), std::size_t{0});
    if (n == 0) return result;

    WeightedGraph level_graph = graph;
    // Maps each original node to its node in level_graph.
    std::vector<std::size_t> node_of(n);
    std::iota(node_of.begin(), node_of.end(), std::size_t{0});

    while (true) {
        std::vector<std::size_t> level_comm(level_graph.size());
        std::iota(level_comm.begin(), level_comm.end(), std::size_t{0});
        auto record = [&] {
            std::vector<std::size_t> full(n);
            for (std::size_t u = 0; u < n; ++u) full[u] = level_comm[node_of[u]];
            result.modularity_history.push_back(modularity(graph, full));
        };
        bool moved = detail::local_moving(level_graph, level_comm, result.moves, record);
        ++result.levels;
        if (!moved) break;

        auto labels = canonical_labels(level_comm);
        std::size_t k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
        for (std::size_t u = 0; u < n; ++u) node_of[u] = labels[node_of[u]];
        level_graph = detail::aggregate(level_graph, labels, k);
        if (k == 1) break;
    }
    result.community = canonical_labels(node_of);
    return result;
}

}  // namespace agentic::graph
