#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include "motseg/core.hpp"
#include "motseg/neighborhood.hpp"
#include "motseg/parallel.hpp"
#include "motseg/primitives.hpp"

// Clustering of motion primitives: a warping path between two primitives'
// cross rectangle is similarity evidence; strongly connected components of
// the resulting graph are the clusters. No cluster count is ever supplied.

namespace motseg {

// Searches the small neighbourhood graph spanned by rows of one primitive
// and columns of the other for a valid warping path. Returns the path only
// if it meets the minimum-length and slope requirements.
inline std::optional<WarpingPath> pairwise_path(const Neighborhoods& banded, Interval prim_a,
                                                Interval prim_b, const PrimitiveParams& params,
                                                GraphStats* stats = nullptr) {
    if (prim_a == prim_b) throw std::invalid_argument("pairwise_path: identical primitives");
    const Interval rows = prim_a.start >= prim_b.start ? prim_a : prim_b;
    const Interval cols = prim_a.start >= prim_b.start ? prim_b : prim_a;

    std::vector<GraphNode> nodes;
    for (int i = rows.start; i <= rows.end; ++i) {
        const auto& set = banded.sets[static_cast<std::size_t>(i)];
        auto it = std::lower_bound(set.begin(), set.end(), cols.start,
                                   [](const Neighbor& nb, int v) { return nb.frame < v; });
        for (; it != set.end() && it->frame <= cols.end; ++it) {
            if (stats) ++stats->build_ops;
            nodes.push_back({i, it->frame, it->dist});
        }
    }
    if (nodes.empty()) return std::nullopt;

    const auto out = link_steps(nodes, stats);
    std::vector<int> all(nodes.size());
    for (std::size_t t = 0; t < nodes.size(); ++t) all[t] = static_cast<int>(t);
    auto path = dag_shortest_path(nodes, out, all, stats);
    if (!path) return std::nullopt;
    if (path->span_a() < params.min_span) return std::nullopt;
    const double s = path->slope();
    if (!(s >= 1.0 / params.nu && s <= params.nu)) return std::nullopt;
    return path;
}

struct ClusterEdge {
    int a = 0;
    int b = 0;
    double cost = 0.0;
};

struct ClusterGraph {
    std::size_t node_count = 0;
    std::vector<ClusterEdge> edges;          // one entry per unordered pair with a valid path
    std::vector<std::vector<int>> clusters;  // primitive indices, partitioning [0, node_count)
    std::vector<int> cluster_of;             // per primitive

    void validate() const {
        std::vector<int> seen(node_count, 0);
        for (const auto& c : clusters)
            for (int p : c) ++seen[static_cast<std::size_t>(p)];
        for (int s : seen)
            if (s != 1) throw std::logic_error("ClusterGraph: clusters do not partition the nodes");
    }
};

namespace detail {

// Iterative Tarjan over an adjacency list; returns the SCC id per node.
inline std::vector<int> tarjan_scc(const std::vector<std::vector<int>>& adj, int& scc_count) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    int next_index = 0;
    scc_count = 0;

    struct Frame {
        int v;
        std::size_t edge;
    };
    std::vector<Frame> call;
    for (int root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        call.push_back({root, 0});
        while (!call.empty()) {
            auto& frame = call.back();
            const int v = frame.v;
            if (frame.edge == 0) {
                index[v] = low[v] = next_index++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            bool descended = false;
            while (frame.edge < adj[static_cast<std::size_t>(v)].size()) {
                const int w = adj[static_cast<std::size_t>(v)][frame.edge++];
                if (index[w] == -1) {
                    call.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) low[v] = std::min(low[v], index[w]);
            }
            if (descended) continue;
            if (low[v] == index[v]) {
                while (true) {
                    const int w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = scc_count;
                    if (w == v) break;
                }
                ++scc_count;
            }
            call.pop_back();
            if (!call.empty()) {
                const int parent = call.back().v;
                low[parent] = std::min(low[parent], low[v]);
            }
        }
    }
    return comp;
}

} // namespace detail

// Pairwise path search over all primitive pairs (the pipeline's main
// parallelism site; results are independent and assembled in pair order, so
// any thread count yields the same graph), then strongly connected
// components. Path evidence is symmetric, so both arcs are inserted and the
// SCCs coincide with connected components; the SCC formulation is kept.
inline ClusterGraph build_clusters(const std::vector<MotionPrimitive>& primitives,
                                   const Neighborhoods& banded, const PrimitiveParams& params,
                                   int threads = 1, GraphStats* stats = nullptr) {
    const int n = static_cast<int>(primitives.size());
    ClusterGraph graph;
    graph.node_count = static_cast<std::size_t>(n);
    if (n == 0) return graph;

    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) pairs.emplace_back(a, b);

    std::vector<double> pair_cost(pairs.size(), -1.0);
    std::vector<GraphStats> pair_stats(stats ? pairs.size() : 0);
    parallel_for(static_cast<int>(pairs.size()), threads, [&](int idx) {
        const auto [a, b] = pairs[static_cast<std::size_t>(idx)];
        auto path = pairwise_path(banded, primitives[static_cast<std::size_t>(a)].span,
                                  primitives[static_cast<std::size_t>(b)].span, params,
                                  stats ? &pair_stats[static_cast<std::size_t>(idx)] : nullptr);
        if (path) pair_cost[static_cast<std::size_t>(idx)] = path->cost;
    });
    if (stats) {
        for (const auto& ps : pair_stats) {
            stats->node_count += ps.node_count;
            stats->edge_count += ps.edge_count;
            stats->build_ops += ps.build_ops;
            stats->path_ops += ps.path_ops;
        }
    }

    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
        if (pair_cost[idx] < 0.0) continue;
        const auto [a, b] = pairs[idx];
        graph.edges.push_back({a, b, pair_cost[idx]});
        adj[static_cast<std::size_t>(a)].push_back(b);
        adj[static_cast<std::size_t>(b)].push_back(a);
    }

    int scc_count = 0;
    const auto comp = detail::tarjan_scc(adj, scc_count);
    graph.clusters.assign(static_cast<std::size_t>(scc_count), {});
    for (int p = 0; p < n; ++p)
        graph.clusters[static_cast<std::size_t>(comp[static_cast<std::size_t>(p)])].push_back(p);
    // order clusters by their earliest primitive
    std::sort(graph.clusters.begin(), graph.clusters.end(),
              [&](const std::vector<int>& x, const std::vector<int>& y) {
                  return primitives[static_cast<std::size_t>(x.front())].span.start <
                         primitives[static_cast<std::size_t>(y.front())].span.start;
              });
    graph.cluster_of.assign(static_cast<std::size_t>(n), -1);
    for (std::size_t c = 0; c < graph.clusters.size(); ++c)
        for (int p : graph.clusters[c]) graph.cluster_of[static_cast<std::size_t>(p)] = static_cast<int>(c);
    graph.validate();
    return graph;
}

} // namespace motseg
