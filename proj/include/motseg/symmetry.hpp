#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "motseg/core.hpp"
#include "motseg/neighborhood.hpp"
#include "motseg/primitives.hpp"

// Symmetry analysis per activity: primitive cuts found on the original
// features are compared against cuts found on the cross-similarity between
// original and mirrored features. Phase-shifted cuts (single steps inside
// full strides) are merged into the segmentation.

namespace motseg {

enum class SymmetryKind { symmetric, phase_shifted, asymmetric, mixed };

inline std::string to_string(SymmetryKind kind) {
    switch (kind) {
        case SymmetryKind::symmetric: return "symmetric";
        case SymmetryKind::phase_shifted: return "phase_shifted";
        case SymmetryKind::asymmetric: return "asymmetric";
        case SymmetryKind::mixed: return "mixed";
    }
    return "?";
}

struct SymmetryReport {
    Interval activity;
    SymmetryKind kind = SymmetryKind::asymmetric;
    std::vector<int> original_cuts;
    std::vector<int> mirrored_cuts;
    std::vector<int> merged_cuts;
};

// Cut candidates of one activity from the mirrored cross block, computed
// with the same graph/path machinery as the original primitive detection.
inline std::vector<CutCandidate> mirrored_cut_candidates(const Neighborhoods& cross_banded,
                                                         Interval activity,
                                                         const PrimitiveParams& params,
                                                         GraphStats* stats = nullptr) {
    const NeighborhoodGraph g = build_neighborhood_graph(cross_banded, activity, stats);
    const auto comps = connected_components(g);
    std::vector<WarpingPath> paths;
    for (const auto& comp : comps) {
        auto path = shortest_warping_path(g, comp, stats);
        if (path) paths.push_back(std::move(*path));
    }
    paths = filter_paths(std::move(paths), params.min_span, params.nu);
    std::vector<CutCandidate> candidates;
    for (const auto& p : paths) {
        const int cut = p.entries.front().first;
        if (cut > activity.start && cut <= activity.end) candidates.push_back({cut, p.cost});
    }
    return merge_cut_candidates(std::move(candidates), params.merge_distance);
}

// Classification per the three cases plus their mixture:
//   symmetric      both cut lists match pairwise within the tolerance
//   phase_shifted  mirrored cuts exist and none matches an original cut
//   asymmetric     the mirrored segmentation produced no cuts at all
//   mixed          some mirrored cuts match, others do not
// Merged cuts keep every original cut and insert the non-matching mirrored
// ones, cheapest first, never closer than the merge distance to a kept cut.
inline SymmetryReport classify_symmetry(Interval activity,
                                        const std::vector<CutCandidate>& original,
                                        const std::vector<CutCandidate>& mirrored,
                                        int tolerance, int merge_distance) {
    SymmetryReport report;
    report.activity = activity;
    for (const auto& c : original) report.original_cuts.push_back(c.frame);
    for (const auto& c : mirrored) report.mirrored_cuts.push_back(c.frame);
    std::sort(report.original_cuts.begin(), report.original_cuts.end());
    std::sort(report.mirrored_cuts.begin(), report.mirrored_cuts.end());

    auto matches_original = [&](int frame) {
        for (int o : report.original_cuts)
            if (std::abs(o - frame) <= tolerance) return true;
        return false;
    };

    if (report.mirrored_cuts.empty()) {
        report.kind = SymmetryKind::asymmetric;
    } else if (report.mirrored_cuts.size() == report.original_cuts.size() &&
               [&] {
                   for (std::size_t idx = 0; idx < report.original_cuts.size(); ++idx)
                       if (std::abs(report.original_cuts[idx] - report.mirrored_cuts[idx]) > tolerance)
                           return false;
                   return true;
               }()) {
        report.kind = SymmetryKind::symmetric;
    } else {
        bool any_match = false;
        for (int mc : report.mirrored_cuts) any_match = any_match || matches_original(mc);
        report.kind = any_match ? SymmetryKind::mixed : SymmetryKind::phase_shifted;
    }

    report.merged_cuts = report.original_cuts;
    if (report.kind == SymmetryKind::phase_shifted || report.kind == SymmetryKind::mixed) {
        std::vector<CutCandidate> inserts = mirrored;
        std::sort(inserts.begin(), inserts.end(), [](const CutCandidate& a, const CutCandidate& b) {
            if (a.cost != b.cost) return a.cost < b.cost;
            return a.frame < b.frame;
        });
        for (const auto& cand : inserts) {
            if (matches_original(cand.frame)) continue;  // mixed case: matching cuts add nothing
            bool blocked = false;
            for (int kept : report.merged_cuts)
                if (std::abs(kept - cand.frame) <= merge_distance) {
                    blocked = true;
                    break;
                }
            if (!blocked) report.merged_cuts.push_back(cand.frame);
        }
        std::sort(report.merged_cuts.begin(), report.merged_cuts.end());
    }
    return report;
}

} // namespace motseg
