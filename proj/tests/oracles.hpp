#pragma once

// Independent brute-force oracles. Everything here recomputes results from
// first principles and must stay decoupled from the implementation paths it
// checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "motseg/core.hpp"
#include "motseg/neighborhood.hpp"
#include "motseg/primitives.hpp"

namespace oracles {

// All pairs within radius by a full O(m^2) scan.
inline motseg::Neighborhoods brute_force_neighborhoods(const motseg::Matrix& points, double r) {
    motseg::Neighborhoods nbrs;
    nbrs.radius_used = r;
    const std::size_t m = points.rows();
    nbrs.sets.resize(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j) continue;
            const double d =
                std::sqrt(motseg::squared_distance(points.row(i), points.row(j), points.cols()));
            if (d <= r) nbrs.sets[i].push_back({static_cast<int>(j), d});
        }
    return nbrs;
}

// k nearest by full sort with the same tie rule as the tree (distance, then index).
inline std::vector<std::pair<std::size_t, double>> brute_force_knn(const motseg::Matrix& points,
                                                                   std::size_t query, std::size_t k) {
    std::vector<std::pair<std::size_t, double>> all;
    for (std::size_t j = 0; j < points.rows(); ++j) {
        if (j == query) continue;
        all.emplace_back(j, std::sqrt(motseg::squared_distance(points.row(query), points.row(j),
                                                               points.cols())));
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        return a.first < b.first;
    });
    if (all.size() > k) all.resize(k);
    return all;
}

// Exhaustive enumeration of every start-to-end path through a component.
// Start nodes are the entries of the first neighbour set (minimal i), end
// nodes those of the last; cost sums every entry on the path.
inline double enumerate_min_path_cost(const motseg::NeighborhoodGraph& g,
                                      const std::vector<int>& component) {
    int i_min = g.nodes[static_cast<std::size_t>(component.front())].i;
    int i_max = i_min;
    for (int id : component) {
        i_min = std::min(i_min, g.nodes[static_cast<std::size_t>(id)].i);
        i_max = std::max(i_max, g.nodes[static_cast<std::size_t>(id)].i);
    }
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> in_comp;
    for (int id : component) in_comp.push_back(id);
    auto is_member = [&](int id) {
        return std::binary_search(in_comp.begin(), in_comp.end(), id);
    };
    // depth-first over all step sequences
    std::function<void(int, double)> walk = [&](int node, double cost) {
        if (g.nodes[static_cast<std::size_t>(node)].i == i_max) best = std::min(best, cost);
        for (int tgt : g.out[static_cast<std::size_t>(node)]) {
            if (tgt < 0 || !is_member(tgt)) continue;
            walk(tgt, cost + g.nodes[static_cast<std::size_t>(tgt)].dist);
        }
    };
    for (int id : component)
        if (g.nodes[static_cast<std::size_t>(id)].i == i_min)
            walk(id, g.nodes[static_cast<std::size_t>(id)].dist);
    return best;
}

// Strongly connected components by reachability closure (Floyd-Warshall).
inline std::vector<int> scc_by_closure(const std::vector<std::vector<int>>& adj) {
    const std::size_t n = adj.size();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t v = 0; v < n; ++v) {
        reach[v][v] = true;
        for (int w : adj[v]) reach[v][static_cast<std::size_t>(w)] = true;
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                if (reach[a][k] && reach[k][b]) reach[a][b] = true;
    std::vector<int> comp(n, -1);
    int next = 0;
    for (std::size_t v = 0; v < n; ++v) {
        if (comp[v] != -1) continue;
        comp[v] = next;
        for (std::size_t w = v + 1; w < n; ++w)
            if (reach[v][w] && reach[w][v]) comp[w] = next;
        ++next;
    }
    return comp;
}

// Minimum DTW alignment cost by full recursion over all monotone paths.
inline double enumerate_dtw(const std::vector<std::vector<double>>& cell) {
    const std::size_t la = cell.size();
    const std::size_t lb = cell.front().size();
    std::function<double(std::size_t, std::size_t)> go = [&](std::size_t p, std::size_t q) -> double {
        if (p == 0 && q == 0) return cell[0][0];
        double best = std::numeric_limits<double>::infinity();
        if (p > 0 && q > 0) best = std::min(best, go(p - 1, q - 1));
        if (p > 0) best = std::min(best, go(p - 1, q));
        if (q > 0) best = std::min(best, go(p, q - 1));
        return cell[p][q] + best;
    };
    return go(la - 1, lb - 1);
}

// Direct Gaussian kernel sum, written independently of kde_value.
inline double direct_kernel_sum(const motseg::Matrix& samples, const std::vector<double>& h,
                                const std::vector<double>& point) {
    const std::size_t k = samples.rows();
    const std::size_t d = samples.cols();
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double quad = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double z = (point[j] - samples(i, j)) / h[j];
            quad += z * z;
        }
        total += std::exp(-0.5 * quad);
    }
    double norm = static_cast<double>(k);
    for (std::size_t j = 0; j < d; ++j) norm *= h[j] * std::sqrt(2.0 * M_PI);
    return total / norm;
}

} // namespace oracles
