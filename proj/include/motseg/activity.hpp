#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "motseg/core.hpp"
#include "motseg/neighborhood.hpp"

// Splitting a trial into distinct activities and transitions by growing
// triangular regions over the neighbour sets, once forward and once
// backward.

namespace motseg {

struct RegionGrowStats {
    std::size_t rows_scanned = 0;
    std::size_t entries_inspected = 0;
};

// Drops all pairs with |i - j| <= round(rate): trivially similar frames
// less than a second apart would otherwise glue every region together.
inline Neighborhoods remove_diagonal_band(const Neighborhoods& nbrs, double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("remove_diagonal_band: rate must be positive");
    const int band = static_cast<int>(std::lround(rate));
    Neighborhoods out;
    out.radius_used = nbrs.radius_used;
    out.sets.resize(nbrs.sets.size());
    for (std::size_t i = 0; i < nbrs.sets.size(); ++i) {
        for (const auto& nb : nbrs.sets[i])
            if (std::abs(nb.frame - static_cast<int>(i)) > band) out.sets[i].push_back(nb);
    }
    return out;
}

// Band removal in cross coordinates: for a cross-similarity block between a
// trial and its mirrored variant the "diagonal" means equal frame numbers on
// both axes, not adjacency in a concatenated index space.
inline Neighborhoods remove_diagonal_band_cross(const Neighborhoods& cross, double rate) {
    return remove_diagonal_band(cross, rate);
}

// One region found by a growing pass.
struct GrownRegion {
    int corner = 0;     // forward: closing (end) frame; backward: opening (start) frame
    Interval extent;    // frames actually spanned by the counted neighbour entries
};

// Forward region growing. Seeds at frame 0 and extends row by row; a scan
// line at row j counts entries (i', j) with seed <= i' < j. Once a region
// holds at least one neighbour, a gap of `stop_window` neighbour-free rows
// closes it at the last neighbour-bearing row, and the next region is seeded
// right after. Regions that never see a neighbour produce no corner.
inline std::vector<GrownRegion> region_grow_forward(const Neighborhoods& nbrs, int stop_window,
                                                    RegionGrowStats* stats = nullptr) {
    if (stop_window < 1) throw std::invalid_argument("region_grow: stop window must be >= 1");
    const int m = nbrs.frame_count();
    std::vector<GrownRegion> regions;

    int seed = 0;
    int last_nb = -1;   // last neighbour-bearing row of the current region
    int block_lo = std::numeric_limits<int>::max();
    for (int j = 0; j < m; ++j) {
        if (stats) ++stats->rows_scanned;
        int count = 0;
        for (const auto& nb : nbrs.sets[static_cast<std::size_t>(j)]) {
            if (stats) ++stats->entries_inspected;
            if (nb.frame >= j) break;  // sets sorted: upper triangle from here on
            if (nb.frame < seed) continue;
            ++count;
            block_lo = std::min(block_lo, nb.frame);
        }
        if (count > 0) {
            last_nb = j;
        } else if (last_nb >= seed && j - last_nb >= stop_window) {
            regions.push_back({last_nb, {block_lo, last_nb}});
            seed = last_nb + 1;
            last_nb = -1;
            block_lo = std::numeric_limits<int>::max();
            // rows (old last_nb, j] held no entries for the old seed and
            // therefore none for the new, larger seed: scanning continues at j+1
        }
    }
    if (last_nb >= seed) regions.push_back({last_nb, {block_lo, last_nb}});
    return regions;
}

namespace detail {

inline Neighborhoods reverse_neighborhoods(const Neighborhoods& nbrs) {
    const int m = nbrs.frame_count();
    Neighborhoods out;
    out.radius_used = nbrs.radius_used;
    out.sets.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        const auto& src = nbrs.sets[static_cast<std::size_t>(i)];
        auto& dst = out.sets[static_cast<std::size_t>(m - 1 - i)];
        dst.reserve(src.size());
        for (auto it = src.rbegin(); it != src.rend(); ++it)
            dst.push_back({m - 1 - it->frame, it->dist});
    }
    return out;
}

} // namespace detail

// Backward pass: the forward procedure on the time-reversed trial. Corners
// map back to opening (start) frames of the repetitive blocks.
inline std::vector<GrownRegion> region_grow_backward(const Neighborhoods& nbrs, int stop_window,
                                                     RegionGrowStats* stats = nullptr) {
    const int m = nbrs.frame_count();
    auto reversed = detail::reverse_neighborhoods(nbrs);
    auto regions = region_grow_forward(reversed, stop_window, stats);
    for (auto& region : regions) {
        region.corner = m - 1 - region.corner;
        region.extent = {m - 1 - region.extent.end, m - 1 - region.extent.start};
    }
    std::sort(regions.begin(), regions.end(),
              [](const GrownRegion& a, const GrownRegion& b) { return a.corner < b.corner; });
    return regions;
}

struct ActivitySegmentation {
    std::vector<Interval> activities;   // sorted, disjoint
    std::vector<Interval> transitions;  // the complement of the activities
    int trial_length = 0;

    void validate() const {
        std::vector<std::pair<Interval, bool>> all;
        for (const auto& a : activities) all.push_back({a, true});
        for (const auto& t : transitions) all.push_back({t, false});
        std::sort(all.begin(), all.end(),
                  [](const auto& a, const auto& b) { return a.first.start < b.first.start; });
        int expect = 0;
        for (const auto& [iv, is_activity] : all) {
            if (iv.start != expect || iv.end < iv.start)
                throw std::logic_error("ActivitySegmentation: coverage violated");
            expect = iv.end + 1;
        }
        if (expect != trial_length) throw std::logic_error("ActivitySegmentation: coverage violated");
    }
};

// Pairs backward start corners with forward end corners by intersecting the
// regions' neighbour extents. Overlapping candidates are clipped at the
// midpoint of the overlap; activities shorter than one second are demoted to
// transitions; everything not covered by an activity becomes a transition.
inline ActivitySegmentation combine_regions(const std::vector<GrownRegion>& forward,
                                            const std::vector<GrownRegion>& backward, int m,
                                            double rate) {
    std::vector<Interval> candidates;
    for (const auto& b : backward)
        for (const auto& f : forward)
            if (b.extent.intersects(f.extent) && b.corner <= f.corner)
                candidates.push_back({b.corner, f.corner});

    std::sort(candidates.begin(), candidates.end(), [](const Interval& a, const Interval& b) {
        if (a.start != b.start) return a.start < b.start;
        return a.end < b.end;
    });
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    // resolve nesting and overlap
    std::vector<Interval> activities;
    for (const auto& cand : candidates) {
        if (activities.empty()) {
            activities.push_back(cand);
            continue;
        }
        Interval& prev = activities.back();
        if (cand.start > prev.end) {
            activities.push_back(cand);
        } else if (cand.end <= prev.end) {
            // nested: same evidence seen twice
        } else {
            const int mid = (cand.start + prev.end) / 2;
            prev.end = mid;
            Interval next{mid + 1, cand.end};
            if (prev.end < prev.start) prev = next;
            else if (next.start <= next.end) activities.push_back(next);
        }
    }

    const int min_len = static_cast<int>(std::lround(rate));
    std::erase_if(activities, [&](const Interval& a) { return a.length() < min_len; });

    ActivitySegmentation seg;
    seg.trial_length = m;
    seg.activities = activities;
    int cursor = 0;
    for (const auto& a : seg.activities) {
        if (a.start > cursor) seg.transitions.push_back({cursor, a.start - 1});
        cursor = a.end + 1;
    }
    if (cursor < m) seg.transitions.push_back({cursor, m - 1});
    seg.validate();
    return seg;
}

inline ActivitySegmentation segment_activities(const Neighborhoods& banded, int stop_window,
                                               double rate, RegionGrowStats* stats = nullptr) {
    auto fwd = region_grow_forward(banded, stop_window, stats);
    auto bwd = region_grow_backward(banded, stop_window, stats);
    return combine_regions(fwd, bwd, banded.frame_count(), rate);
}

} // namespace motseg
