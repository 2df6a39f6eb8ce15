#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "motseg/core.hpp"
#include "motseg/csv.hpp"
#include "motseg/primitives.hpp"

// The paper's quantitative measures: strict/tolerant frame accuracy,
// DTW-based intra-cluster variance, key-point consistency, and interval
// boundary/overlap statistics.

namespace motseg {

enum class AccuracyMode { strict, tolerant };

using LabelAliases = std::map<std::string, std::string>;

namespace detail {

inline std::string apply_alias(const LabelAliases& aliases, const std::string& label) {
    const auto it = aliases.find(label);
    return it == aliases.end() ? label : it->second;
}

inline std::vector<std::string> frame_labels(const GroundTruth& gt, int trial_len,
                                             const LabelAliases& aliases) {
    std::vector<std::string> labels(static_cast<std::size_t>(trial_len), "transition");
    for (const auto& iv : gt.intervals) {
        const int lo = std::max(0, iv.span.start);
        const int hi = std::min(trial_len - 1, iv.span.end);
        const std::string label = apply_alias(aliases, iv.label);
        for (int f = lo; f <= hi; ++f) labels[static_cast<std::size_t>(f)] = label;
    }
    return labels;
}

inline double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double std_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mu = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - mu) * (x - mu);
    return std::sqrt(s / static_cast<double>(v.size()));
}

} // namespace detail

// Majority ground-truth label per cluster (reserved labels never win unless
// nothing else is present), then frame-wise agreement over all frames that
// belong to a primitive. Tolerant mode additionally accepts frames whose
// ground truth is transition/uncertain.
inline double frame_accuracy(const std::vector<MotionPrimitive>& primitives,
                             const std::vector<int>& cluster_of, int trial_len,
                             const GroundTruth& gt, AccuracyMode mode,
                             const LabelAliases& aliases = {}) {
    if (!gt.is_interval())
        throw std::invalid_argument("frame_accuracy: needs interval ground truth");
    const auto labels = detail::frame_labels(gt, trial_len, aliases);

    int cluster_count = 0;
    for (int c : cluster_of) cluster_count = std::max(cluster_count, c + 1);
    std::vector<std::map<std::string, std::size_t>> votes(static_cast<std::size_t>(cluster_count));
    for (std::size_t p = 0; p < primitives.size(); ++p) {
        const int c = cluster_of[p];
        for (int f = primitives[p].span.start; f <= primitives[p].span.end; ++f)
            ++votes[static_cast<std::size_t>(c)][labels[static_cast<std::size_t>(f)]];
    }
    std::vector<std::string> cluster_label(static_cast<std::size_t>(cluster_count), "transition");
    for (int c = 0; c < cluster_count; ++c) {
        std::size_t best = 0;
        for (const auto& [label, count] : votes[static_cast<std::size_t>(c)]) {
            if (is_reserved_label(label)) continue;
            if (count > best) {
                best = count;
                cluster_label[static_cast<std::size_t>(c)] = label;
            }
        }
    }

    std::size_t scored = 0, correct = 0;
    for (std::size_t p = 0; p < primitives.size(); ++p) {
        const auto& want = cluster_label[static_cast<std::size_t>(cluster_of[p])];
        for (int f = primitives[p].span.start; f <= primitives[p].span.end; ++f) {
            const auto& have = labels[static_cast<std::size_t>(f)];
            ++scored;
            if (have == want || (mode == AccuracyMode::tolerant && is_reserved_label(have)))
                ++correct;
        }
    }
    return scored == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(scored);
}

// --- dynamic time warping -------------------------------------------------

// Classical DP alignment with steps {(1,1),(0,1),(1,0)} over an arbitrary
// frame-distance function; cost accumulates the distance of every visited
// cell.
inline double dtw_cost(std::size_t len_a, std::size_t len_b,
                       const std::function<double(std::size_t, std::size_t)>& dist) {
    if (len_a == 0 || len_b == 0) throw std::invalid_argument("dtw_cost: empty sequence");
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(len_b, kInf), cur(len_b, kInf);
    for (std::size_t q = 0; q < len_b; ++q)
        prev[q] = dist(0, q) + (q ? prev[q - 1] : 0.0);
    for (std::size_t p = 1; p < len_a; ++p) {
        for (std::size_t q = 0; q < len_b; ++q) {
            double best = prev[q];                                   // step (1,0)
            if (q) {
                best = std::min(best, prev[q - 1]);                  // step (1,1)
                best = std::min(best, cur[q - 1]);                   // step (0,1)
            }
            cur[q] = dist(p, q) + best;
        }
        std::swap(prev, cur);
    }
    return prev[len_b - 1];
}

// Frame distance over feature rows restricted to a span of the trial.
inline double dtw_feature_cost(const FeatureSequence& feats, Interval a, Interval b) {
    const std::size_t d = feats.dim();
    return dtw_cost(static_cast<std::size_t>(a.length()), static_cast<std::size_t>(b.length()),
                    [&](std::size_t p, std::size_t q) {
                        return std::sqrt(squared_distance(
                            feats.vectors.row(static_cast<std::size_t>(a.start) + p),
                            feats.vectors.row(static_cast<std::size_t>(b.start) + q), d));
                    });
}

// Point-cloud frame distance: channels are J joints of (x, y, z) triplets,
// y up. Each comparison aligns the second cloud by the closed-form optimal
// rotation about the vertical axis plus ground-plane translation, then sums
// the weighted squared residuals. Used by the point-cloud DTW variant when
// the input declares 3-D joint positions.
inline double pointcloud_distance(const double* a, const double* b, std::size_t joints,
                                  const std::vector<double>& weights) {
    double sw = 0.0, xb = 0.0, zb = 0.0, xb2 = 0.0, zb2 = 0.0;
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < joints; ++j) {
        const double w = weights.empty() ? 1.0 : weights[j];
        const double x = a[3 * j], z = a[3 * j + 2];
        const double x2 = b[3 * j], z2 = b[3 * j + 2];
        sw += w;
        xb += w * x;
        zb += w * z;
        xb2 += w * x2;
        zb2 += w * z2;
        num += w * (x * z2 - x2 * z);
        den += w * (x * x2 + z * z2);
    }
    num -= (xb * zb2 - xb2 * zb) / sw;
    den -= (xb * xb2 + zb * zb2) / sw;
    const double theta = std::atan2(num, den);
    const double c = std::cos(theta), s = std::sin(theta);
    const double x0 = (xb - xb2 * c - zb2 * s) / sw;
    const double z0 = (zb + xb2 * s - zb2 * c) / sw;

    double ssd = 0.0;
    for (std::size_t j = 0; j < joints; ++j) {
        const double w = weights.empty() ? 1.0 : weights[j];
        const double tx = c * b[3 * j] + s * b[3 * j + 2] + x0;
        const double ty = b[3 * j + 1];
        const double tz = -s * b[3 * j] + c * b[3 * j + 2] + z0;
        const double dx = a[3 * j] - tx, dy = a[3 * j + 1] - ty, dz = a[3 * j + 2] - tz;
        ssd += w * (dx * dx + dy * dy + dz * dz);
    }
    return std::sqrt(std::max(0.0, ssd));
}

inline double dtw_pointcloud_cost(const FeatureSequence& feats, Interval a, Interval b,
                                  const std::vector<double>& joint_weights = {}) {
    if (feats.dim() % 3 != 0)
        throw std::invalid_argument("dtw_pointcloud_cost: dimension is not a multiple of 3");
    const std::size_t joints = feats.dim() / 3;
    return dtw_cost(static_cast<std::size_t>(a.length()), static_cast<std::size_t>(b.length()),
                    [&](std::size_t p, std::size_t q) {
                        return pointcloud_distance(
                            feats.vectors.row(static_cast<std::size_t>(a.start) + p),
                            feats.vectors.row(static_cast<std::size_t>(b.start) + q), joints,
                            joint_weights);
                    });
}

// Cumulative intra-cluster distance D: sum over ordered segment pairs of
// DTW(s_i, s_j) / |s_i|. Undefined (absent) for singleton clusters. The
// asymmetric normalization follows the defining equation as written.
inline std::optional<double> intra_cluster_variance(const std::vector<Interval>& segments,
                                                    const FeatureSequence& feats,
                                                    bool pointcloud = false) {
    if (segments.size() < 2) return std::nullopt;
    double total = 0.0;
    for (std::size_t i = 0; i < segments.size(); ++i)
        for (std::size_t j = 0; j < segments.size(); ++j) {
            if (i == j) continue;
            const double cost = pointcloud ? dtw_pointcloud_cost(feats, segments[i], segments[j])
                                           : dtw_feature_cost(feats, segments[i], segments[j]);
            total += cost / static_cast<double>(segments[i].length());
        }
    return total;
}

// --- key-point consistency --------------------------------------------------

struct KeypointReport {
    std::array<std::size_t, 10> histogram{};  // relative positions binned over [0,1]
    std::vector<double> relative_positions;
    double mean = 0.0;
    double stddev = 0.0;
    std::map<std::string, double> per_class_std;
    std::size_t in_transitions = 0;  // key points enclosed by no primitive
};

// Relative position of each key point inside its enclosing primitive:
// (key - start) / length. Key points outside every primitive are counted
// separately instead of skewing the histogram.
inline KeypointReport keypoint_consistency(const std::vector<MotionPrimitive>& primitives,
                                           const GroundTruth& gt) {
    if (!gt.is_keypoint())
        throw std::invalid_argument("keypoint_consistency: needs key point ground truth");
    KeypointReport report;
    std::map<std::string, std::vector<double>> per_class;
    for (const auto& kp : gt.keypoints) {
        const MotionPrimitive* owner = nullptr;
        for (const auto& p : primitives)
            if (p.span.contains(kp.frame)) {
                owner = &p;
                break;
            }
        if (!owner) {
            ++report.in_transitions;
            continue;
        }
        const double rel = static_cast<double>(kp.frame - owner->span.start) /
                           static_cast<double>(owner->span.length());
        report.relative_positions.push_back(rel);
        per_class[kp.label].push_back(rel);
        const auto bin = std::min<std::size_t>(9, static_cast<std::size_t>(rel * 10.0));
        ++report.histogram[bin];
    }
    report.mean = detail::mean_of(report.relative_positions);
    report.stddev = detail::std_of(report.relative_positions);
    for (const auto& [label, values] : per_class)
        report.per_class_std[label] = detail::std_of(values);
    return report;
}

// --- interval boundary / overlap statistics ---------------------------------

struct IntervalReport {
    double boundary_mean = 0.0;   // frames from annotation endpoints to nearest cut
    double boundary_std = 0.0;
    double overlap_mean = 0.0;    // percent of each annotation covered by its largest primitive
    double overlap_std = 0.0;
    std::size_t annotations = 0;
};

inline IntervalReport interval_overlap(const std::vector<MotionPrimitive>& primitives,
                                       const GroundTruth& gt) {
    if (!gt.is_interval())
        throw std::invalid_argument("interval_overlap: needs interval ground truth");

    std::vector<int> cuts;
    for (const auto& p : primitives) {
        cuts.push_back(p.span.start);
        cuts.push_back(p.span.end + 1);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    auto nearest_cut_distance = [&](int frame) {
        double best = std::numeric_limits<double>::infinity();
        for (int c : cuts) best = std::min(best, static_cast<double>(std::abs(c - frame)));
        return best;
    };

    std::vector<double> distances, overlaps;
    for (const auto& iv : gt.intervals) {
        if (is_reserved_label(iv.label)) continue;
        distances.push_back(nearest_cut_distance(iv.span.start));
        distances.push_back(nearest_cut_distance(iv.span.end + 1));
        int best_overlap = 0;
        for (const auto& p : primitives) {
            const int lo = std::max(p.span.start, iv.span.start);
            const int hi = std::min(p.span.end, iv.span.end);
            best_overlap = std::max(best_overlap, hi - lo + 1);
        }
        overlaps.push_back(100.0 * static_cast<double>(best_overlap) /
                           static_cast<double>(iv.span.length()));
    }
    IntervalReport report;
    report.annotations = overlaps.size();
    report.boundary_mean = detail::mean_of(distances);
    report.boundary_std = detail::std_of(distances);
    report.overlap_mean = detail::mean_of(overlaps);
    report.overlap_std = detail::std_of(overlaps);
    return report;
}

} // namespace motseg
