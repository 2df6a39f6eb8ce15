#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "motseg/core.hpp"
#include "motseg/neighborhood.hpp"

// Motion primitive detection inside one activity: neighbour entries become
// graph nodes, time-warping steps {(1,1),(0,1),(1,0)} become edges, each
// SSSM diagonal is one connected component, and its minimum-cost warping
// path marks primitive borders at its start position.

namespace motseg {

struct GraphStats {
    std::size_t node_count = 0;
    std::size_t edge_count = 0;
    std::size_t build_ops = 0;   // node/edge inspections while building
    std::size_t path_ops = 0;    // edge relaxations during path search
};

struct GraphNode {
    int i = 0;        // trial-axis frame (row)
    int j = 0;        // matched frame (column)
    double dist = 0.0;
};

// Step successors per node: [0] = (1,1), [1] = (0,1), [2] = (1,0); -1 absent.
using StepLinks = std::array<int, 3>;

// Connects lexicographically sorted entries by the allowed warping steps.
// Rows i and i+1 are swept with a single monotone pointer, so the work is
// linear in the number of nodes.
inline std::vector<StepLinks> link_steps(const std::vector<GraphNode>& nodes,
                                         GraphStats* stats = nullptr) {
    const std::size_t n = nodes.size();
    std::vector<StepLinks> out(n, StepLinks{-1, -1, -1});
    std::size_t g0 = 0;
    while (g0 < n) {
        std::size_t g1 = g0;
        while (g1 < n && nodes[g1].i == nodes[g0].i) ++g1;
        std::size_t h0 = g1, h1 = g1;
        if (g1 < n && nodes[g1].i == nodes[g0].i + 1) {
            while (h1 < n && nodes[h1].i == nodes[g1].i) ++h1;
        }
        std::size_t p = h0;
        for (std::size_t t = g0; t < g1; ++t) {
            if (stats) ++stats->build_ops;
            const int j = nodes[t].j;
            if (t + 1 < g1 && nodes[t + 1].j == j + 1)
                out[t][1] = static_cast<int>(t + 1);            // step (0,1)
            while (p < h1 && nodes[p].j < j) ++p;
            std::size_t q = p;
            if (q < h1 && nodes[q].j == j) {
                out[t][2] = static_cast<int>(q);                 // step (1,0)
                ++q;
            }
            if (q < h1 && nodes[q].j == j + 1)
                out[t][0] = static_cast<int>(q);                 // step (1,1)
        }
        g0 = g1;
    }
    if (stats) {
        stats->node_count += n;
        for (const auto& links : out)
            for (int tgt : links)
                if (tgt >= 0) ++stats->edge_count;
    }
    return out;
}

struct NeighborhoodGraph {
    std::vector<GraphNode> nodes;   // lexicographically sorted by (i, j)
    std::vector<StepLinks> out;
    Interval activity;
};

// Lower-triangle entries of one activity turned into the step graph.
inline NeighborhoodGraph build_neighborhood_graph(const Neighborhoods& nbrs, Interval activity,
                                                  GraphStats* stats = nullptr) {
    if (activity.start < 0 || activity.end >= nbrs.frame_count() || activity.end < activity.start)
        throw std::invalid_argument("build_neighborhood_graph: empty or out-of-range activity");

    NeighborhoodGraph g;
    g.activity = activity;
    for (int i = activity.start; i <= activity.end; ++i) {
        for (const auto& nb : nbrs.sets[static_cast<std::size_t>(i)]) {
            if (stats) ++stats->build_ops;
            if (nb.frame >= i) break;  // sets sorted: upper triangle from here on
            if (nb.frame < activity.start) continue;
            g.nodes.push_back({i, nb.frame, nb.dist});
        }
    }
    g.out = link_steps(g.nodes, stats);
    return g;
}

namespace detail {

struct UnionFind {
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<std::size_t> parent;
};

} // namespace detail

// Weakly connected components (one per SSSM diagonal stripe), each a sorted
// list of node ids, ordered by their smallest entry.
inline std::vector<std::vector<int>> connected_components(const NeighborhoodGraph& g) {
    detail::UnionFind uf(g.nodes.size());
    for (std::size_t t = 0; t < g.nodes.size(); ++t)
        for (int tgt : g.out[t])
            if (tgt >= 0) uf.unite(t, static_cast<std::size_t>(tgt));

    std::vector<int> root_to_comp(g.nodes.size(), -1);
    std::vector<std::vector<int>> comps;
    for (std::size_t t = 0; t < g.nodes.size(); ++t) {
        const std::size_t root = uf.find(t);
        if (root_to_comp[root] < 0) {
            root_to_comp[root] = static_cast<int>(comps.size());
            comps.emplace_back();
        }
        comps[static_cast<std::size_t>(root_to_comp[root])].push_back(static_cast<int>(t));
    }
    // node ids are lex-sorted, so each component list is sorted and the
    // component order (by first node) already follows the smallest frame
    return comps;
}

struct WarpingPath {
    std::vector<std::pair<int, int>> entries;  // (i, j) pairs, consecutive ones differ by a step
    double cost = 0.0;

    std::size_t length() const { return entries.size(); }
    int span_a() const { return entries.empty() ? 0 : entries.back().first - entries.front().first + 1; }
    int span_b() const { return entries.empty() ? 0 : entries.back().second - entries.front().second + 1; }

    // average gradient: frames advanced on the trial axis per frame advanced
    // on the matched axis
    double slope() const {
        if (entries.size() < 2) return std::numeric_limits<double>::quiet_NaN();
        const double da = entries.back().first - entries.front().first;
        const double db = entries.back().second - entries.front().second;
        if (db == 0.0) return std::numeric_limits<double>::infinity();
        return da / db;
    }
};

// Minimum-cost path over a sorted subset of nodes: a virtual start node
// connects at zero cost to the entries of the subset's first neighbour set
// (smallest i), a virtual end node hangs off the last; every real edge costs
// the landing entry's distance. Ties resolve toward the lexicographically
// earliest predecessor. Returns nothing when no last-row entry is reachable.
inline std::optional<WarpingPath> dag_shortest_path(const std::vector<GraphNode>& nodes,
                                                    const std::vector<StepLinks>& out,
                                                    const std::vector<int>& subset,
                                                    GraphStats* stats = nullptr) {
    if (subset.empty()) throw std::invalid_argument("dag_shortest_path: empty node subset");
    int i_min = nodes[static_cast<std::size_t>(subset.front())].i;
    int i_max = i_min;
    for (int id : subset) {
        i_min = std::min(i_min, nodes[static_cast<std::size_t>(id)].i);
        i_max = std::max(i_max, nodes[static_cast<std::size_t>(id)].i);
    }

    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(subset.size(), kInf);
    std::vector<int> parent(subset.size(), -1);
    // steps never leave a component, so targets are found by binary search
    auto local = [&](int node_id) {
        const auto it = std::lower_bound(subset.begin(), subset.end(), node_id);
        return static_cast<std::size_t>(it - subset.begin());
    };

    for (std::size_t idx = 0; idx < subset.size(); ++idx) {
        const auto& node = nodes[static_cast<std::size_t>(subset[idx])];
        if (node.i == i_min) dist[idx] = node.dist;
    }
    // subset ids are lex-sorted, which is a topological order of the steps
    for (std::size_t idx = 0; idx < subset.size(); ++idx) {
        if (dist[idx] == kInf) continue;
        for (int tgt : out[static_cast<std::size_t>(subset[idx])]) {
            if (tgt < 0) continue;
            if (stats) ++stats->path_ops;
            const std::size_t tl = local(tgt);
            if (tl >= subset.size() || subset[tl] != tgt) continue;  // target outside subset
            const double cand = dist[idx] + nodes[static_cast<std::size_t>(tgt)].dist;
            if (cand < dist[tl]) {
                dist[tl] = cand;
                parent[tl] = static_cast<int>(idx);
            }
        }
    }

    int best = -1;
    for (std::size_t idx = 0; idx < subset.size(); ++idx) {
        const auto& node = nodes[static_cast<std::size_t>(subset[idx])];
        if (node.i != i_max || dist[idx] == kInf) continue;
        if (best < 0 || dist[idx] < dist[static_cast<std::size_t>(best)]) best = static_cast<int>(idx);
    }
    if (best < 0) return std::nullopt;

    WarpingPath path;
    path.cost = dist[static_cast<std::size_t>(best)];
    std::vector<int> chain;
    for (int cur = best; cur >= 0; cur = parent[static_cast<std::size_t>(cur)])
        chain.push_back(subset[static_cast<std::size_t>(cur)]);
    std::reverse(chain.begin(), chain.end());
    path.entries.reserve(chain.size());
    for (int id : chain) {
        const auto& node = nodes[static_cast<std::size_t>(id)];
        path.entries.emplace_back(node.i, node.j);
    }
    return path;
}

inline std::optional<WarpingPath> shortest_warping_path(const NeighborhoodGraph& g,
                                                        const std::vector<int>& component,
                                                        GraphStats* stats = nullptr) {
    return dag_shortest_path(g.nodes, g.out, component, stats);
}

// Discards paths that cover too few trial frames or whose average slope
// falls outside [1/nu, nu].
inline std::vector<WarpingPath> filter_paths(std::vector<WarpingPath> paths, int min_span,
                                             double nu) {
    if (!(nu > 1.0)) throw std::invalid_argument("filter_paths: nu must be > 1");
    std::erase_if(paths, [&](const WarpingPath& p) {
        if (p.span_a() < min_span) return true;
        const double s = p.slope();
        return !(s >= 1.0 / nu && s <= nu);
    });
    return paths;
}

struct MotionPrimitive {
    Interval span;
    int activity = -1;           // index into the segmentation's activity list
    bool whole_activity = false; // no valid warping path produced a cut
};

struct CutCandidate {
    int frame = 0;
    double cost = 0.0;
};

// Greedy candidate merging: cheapest paths win, and every kept cut is more
// than `merge_distance` frames from any other kept cut.
inline std::vector<CutCandidate> merge_cut_candidates(std::vector<CutCandidate> candidates,
                                                      int merge_distance) {
    std::sort(candidates.begin(), candidates.end(), [](const CutCandidate& a, const CutCandidate& b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        return a.frame < b.frame;
    });
    std::vector<CutCandidate> kept;
    for (const auto& cand : candidates) {
        bool blocked = false;
        for (const auto& k : kept)
            if (std::abs(k.frame - cand.frame) <= merge_distance) {
                blocked = true;
                break;
            }
        if (!blocked) kept.push_back(cand);
    }
    std::sort(kept.begin(), kept.end(),
              [](const CutCandidate& a, const CutCandidate& b) { return a.frame < b.frame; });
    return kept;
}

inline std::vector<MotionPrimitive> cuts_to_primitives(Interval activity,
                                                       const std::vector<int>& cuts,
                                                       int activity_index) {
    std::vector<MotionPrimitive> prims;
    int start = activity.start;
    for (int cut : cuts) {
        if (cut <= start || cut > activity.end) continue;
        prims.push_back({{start, cut - 1}, activity_index, false});
        start = cut;
    }
    prims.push_back({{start, activity.end}, activity_index, cuts.empty()});
    return prims;
}

struct PrimitiveParams {
    int min_span = 5;
    double nu = 2.0;
    int merge_distance = 5;
};

struct PrimitiveExtraction {
    std::vector<MotionPrimitive> primitives;
    std::vector<CutCandidate> cuts;          // interior cuts with their path costs
    std::size_t component_count = 0;
    std::size_t accepted_paths = 0;
};

// Full per-activity pipeline: graph, components, per-component shortest
// paths, filtering, cut merging. With no surviving path the activity itself
// is the single primitive.
inline PrimitiveExtraction extract_primitives(const Neighborhoods& banded, Interval activity,
                                              int activity_index, const PrimitiveParams& params,
                                              GraphStats* stats = nullptr) {
    const NeighborhoodGraph g = build_neighborhood_graph(banded, activity, stats);
    const auto comps = connected_components(g);

    PrimitiveExtraction out;
    out.component_count = comps.size();
    std::vector<WarpingPath> paths;
    for (const auto& comp : comps) {
        auto path = shortest_warping_path(g, comp, stats);
        if (path) paths.push_back(std::move(*path));
    }
    paths = filter_paths(std::move(paths), params.min_span, params.nu);
    out.accepted_paths = paths.size();

    std::vector<CutCandidate> candidates;
    for (const auto& p : paths) {
        const int cut = p.entries.front().first;  // a_i: start position on the trial axis
        if (cut > activity.start && cut <= activity.end) candidates.push_back({cut, p.cost});
    }
    out.cuts = merge_cut_candidates(std::move(candidates), params.merge_distance);

    std::vector<int> cut_frames;
    cut_frames.reserve(out.cuts.size());
    for (const auto& c : out.cuts) cut_frames.push_back(c.frame);
    out.primitives = cuts_to_primitives(activity, cut_frames, activity_index);
    return out;
}

} // namespace motseg
