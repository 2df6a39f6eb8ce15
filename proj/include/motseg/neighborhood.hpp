#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "motseg/core.hpp"
#include "motseg/kdtree.hpp"

// Per-frame radius-bounded neighbour sets: the sparse self-similarity
// structure every later stage works on. Search is exact; the dense matrix is
// only ever materialized for visualization.

namespace motseg {

struct Neighbor {
    int frame = 0;
    double dist = 0.0;
};

struct Neighborhoods {
    std::vector<std::vector<Neighbor>> sets;  // per frame, sorted by frame index
    double radius_used = 0.0;

    int frame_count() const { return static_cast<int>(sets.size()); }

    std::size_t total_entries() const {
        std::size_t n = 0;
        for (const auto& s : sets) n += s.size();
        return n;
    }

    // max |S_i|; the paper's k when stating complexity bounds
    std::size_t max_set_size() const {
        std::size_t n = 0;
        for (const auto& s : sets) n = std::max(n, s.size());
        return n;
    }
};

// r = R * sqrt(|w| * N): rescales the generalized radius R (defined for one
// channel and one stacked frame) to the actual feature dimensionality.
inline double generalized_radius(double R, std::size_t window_size, std::size_t dim) {
    if (!(R > 0.0)) throw std::invalid_argument("generalized_radius: R must be positive");
    if (window_size < 1 || dim < 1)
        throw std::invalid_argument("generalized_radius: window size and dimension must be >= 1");
    return R * std::sqrt(static_cast<double>(window_size * dim));
}

// Exact radius search of every frame against all others (self excluded).
// The result is symmetric by construction: d(i,j) and d(j,i) are evaluated
// by the same squared-difference sum and compare identically.
inline Neighborhoods compute_neighborhoods(const FeatureSequence& feats, double R,
                                           KdTreeStats* stats = nullptr) {
    const std::size_t m = feats.frames();
    if (m < 2) throw std::invalid_argument("compute_neighborhoods: need at least 2 frames");
    const double r = generalized_radius(R, feats.stacking_offsets.size(), feats.source_dim);

    Neighborhoods nbrs;
    nbrs.radius_used = r;
    nbrs.sets.resize(m);

    KdTree tree(feats.vectors);
    std::vector<std::pair<std::size_t, double>> hits;
    for (std::size_t i = 0; i < m; ++i) {
        tree.radius_search(feats.vectors.row(i), r, i, hits, stats);
        auto& set = nbrs.sets[i];
        set.reserve(hits.size());
        for (const auto& [j, d] : hits) set.push_back({static_cast<int>(j), d});
    }
    return nbrs;
}

// Cross-similarity between two feature sequences of equal length (used with
// a mirrored variant of the same trial). Entry (i, j) of the result means
// ||A_i - B_j|| <= r. Equivalent to the cross block of a search over the
// concatenation of A and B.
inline Neighborhoods cross_neighborhoods(const FeatureSequence& a, const FeatureSequence& b,
                                         double R, KdTreeStats* stats = nullptr) {
    if (a.frames() != b.frames() || a.dim() != b.dim())
        throw std::invalid_argument("cross_neighborhoods: sequences must have equal shape");
    const std::size_t m = a.frames();
    if (m < 2) throw std::invalid_argument("cross_neighborhoods: need at least 2 frames");
    const double r = generalized_radius(R, a.stacking_offsets.size(), a.source_dim);

    Neighborhoods nbrs;
    nbrs.radius_used = r;
    nbrs.sets.resize(m);

    KdTree tree(b.vectors);
    std::vector<std::pair<std::size_t, double>> hits;
    for (std::size_t i = 0; i < m; ++i) {
        tree.radius_search(a.vectors.row(i), r, m, hits, stats);  // no self-exclusion
        auto& set = nbrs.sets[i];
        set.reserve(hits.size());
        for (const auto& [j, d] : hits) set.push_back({static_cast<int>(j), d});
    }
    return nbrs;
}

inline void validate_neighborhoods(const Neighborhoods& nbrs) {
    const int m = nbrs.frame_count();
    for (int i = 0; i < m; ++i) {
        int prev = -1;
        for (const auto& nb : nbrs.sets[static_cast<std::size_t>(i)]) {
            if (nb.frame < 0 || nb.frame >= m)
                throw std::logic_error("Neighborhoods: frame index out of range");
            if (nb.frame <= prev) throw std::logic_error("Neighborhoods: set not sorted");
            if (nb.dist > nbrs.radius_used + 1e-12)
                throw std::logic_error("Neighborhoods: distance exceeds radius");
            prev = nb.frame;
        }
    }
}

// m x m grayscale raster of the sparse self-similarity matrix. Distance maps
// linearly from black (0) to white (r); absent pairs and the background stay
// white; the main diagonal is drawn black.
struct SssmImage {
    std::size_t size = 0;             // image is size x size
    std::vector<std::uint8_t> pixels; // row-major
};

inline SssmImage sssm_export(const Neighborhoods& nbrs, bool draw_diagonal = true) {
    const auto m = static_cast<std::size_t>(nbrs.frame_count());
    SssmImage img;
    img.size = m;
    img.pixels.assign(m * m, 255);
    const double r = nbrs.radius_used > 0.0 ? nbrs.radius_used : 1.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (const auto& nb : nbrs.sets[i]) {
            const double v = std::clamp(nb.dist / r, 0.0, 1.0);
            img.pixels[i * m + static_cast<std::size_t>(nb.frame)] =
                static_cast<std::uint8_t>(std::lround(v * 255.0));
        }
        if (draw_diagonal) img.pixels[i * m + i] = 0;
    }
    return img;
}

} // namespace motseg
