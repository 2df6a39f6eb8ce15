#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "motseg/core.hpp"
#include "motseg/csv.hpp"

// Synthetic trials with known structure. They ship with the repository so
// the test suite can assert boundary positions, cycle counts, symmetry kinds
// and cluster purity without external data.
//
// Transitions are polylines that leave and enter the cyclic loops radially
// and otherwise keep a clearance of at least half a loop radius, so they
// never produce similarity stripes of their own.

namespace motseg::fixtures {

namespace detail {

inline void add_noise(TimeSeries& ts, double sigma, std::uint64_t seed) {
    if (sigma <= 0.0) return;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma);
    for (double& v : ts.samples.data()) v += gauss(rng);
}

// Constant-speed traversal of a polyline, excluding both endpoints (they
// belong to the adjacent cyclic blocks).
inline std::vector<std::pair<double, double>> polyline_ramp(
    const std::vector<std::pair<double, double>>& pts, int frames) {
    std::vector<double> seg_len;
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
        const double dx = pts[s + 1].first - pts[s].first;
        const double dy = pts[s + 1].second - pts[s].second;
        seg_len.push_back(std::hypot(dx, dy));
        total += seg_len.back();
    }
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<std::size_t>(frames));
    for (int t = 0; t < frames; ++t) {
        double at = total * static_cast<double>(t + 1) / (frames + 1);
        std::size_t s = 0;
        while (s + 1 < seg_len.size() && at > seg_len[s]) at -= seg_len[s++];
        const double u = seg_len[s] > 0.0 ? at / seg_len[s] : 0.0;
        out.emplace_back(pts[s].first + (pts[s + 1].first - pts[s].first) * u,
                         pts[s].second + (pts[s + 1].second - pts[s].second) * u);
    }
    return out;
}

} // namespace detail

// FIX-A: one activity of 10 identical cycles (period 40 at 30 fps) tracing a
// unit circle in two channels. True cuts sit at every period multiple.
inline TimeSeries fix_a(double noise_sigma = 0.0, std::uint64_t seed = 1) {
    constexpr int period = 40;
    constexpr int cycles = 10;
    TimeSeries ts;
    ts.sample_rate = 30.0;
    ts.channel_names = {"x", "y"};
    ts.samples = Matrix(period * cycles, 2);
    for (int t = 0; t < period * cycles; ++t) {
        const double phi = 2.0 * M_PI * t / period;
        ts.samples(static_cast<std::size_t>(t), 0) = std::cos(phi);
        ts.samples(static_cast<std::size_t>(t), 1) = std::sin(phi);
    }
    detail::add_noise(ts, noise_sigma, seed);
    return ts;
}

inline int fix_a_period() { return 40; }
inline int fix_a_cycles() { return 10; }

// FIX-B: two cyclic blocks around a 30-frame transition at 25 fps. Block one
// is 10 cycles of period 30 on a unit circle at the origin; block two is 7.1
// cycles of period 42 on a unit circle around (4, 0). The transition edges
// are frames 300..329 (0-based).
inline TimeSeries fix_b(double noise_sigma = 0.0, std::uint64_t seed = 1) {
    constexpr int block = 300;
    constexpr int gap = 30;
    const int m = 2 * block + gap;
    TimeSeries ts;
    ts.sample_rate = 25.0;
    ts.channel_names = {"x", "y"};
    ts.samples = Matrix(static_cast<std::size_t>(m), 2);
    auto set = [&](int t, double x, double y) {
        ts.samples(static_cast<std::size_t>(t), 0) = x;
        ts.samples(static_cast<std::size_t>(t), 1) = y;
    };
    for (int t = 0; t < block; ++t) {
        const double phi = 2.0 * M_PI * t / 30.0;
        set(t, std::cos(phi), std::sin(phi));
    }
    // radial exit from block one, around the top, radial entry into block two
    const auto ramp = detail::polyline_ramp(
        {{1.0, 0.0}, {2.2, 0.0}, {2.2, 2.4}, {6.3, 2.4}, {6.3, 0.0}, {5.0, 0.0}}, gap);
    for (int t = 0; t < gap; ++t) set(block + t, ramp[static_cast<std::size_t>(t)].first,
                                     ramp[static_cast<std::size_t>(t)].second);
    for (int t = 0; t < block; ++t) {
        const double phi = 2.0 * M_PI * t / 42.0;
        set(block + gap + t, 4.0 + std::cos(phi), std::sin(phi));
    }
    detail::add_noise(ts, noise_sigma, seed);
    return ts;
}

// 0-based inclusive ground-truth intervals of FIX-B
inline Interval fix_b_block1() { return {0, 299}; }
inline Interval fix_b_transition() { return {300, 329}; }
inline Interval fix_b_block2() { return {330, 629}; }

inline GroundTruth fix_b_ground_truth() {
    GroundTruth gt;
    gt.intervals.push_back({fix_b_block1(), "block_a"});
    gt.intervals.push_back({fix_b_transition(), "transition"});
    gt.intervals.push_back({fix_b_block2(), "block_b"});
    return gt;
}

enum class GaitVariant { phase_shifted, symmetric, asymmetric };

// Gait-style fixture: four channels (lx, ly, rx, ry) at 30 fps, stride
// period 80, five strides.
//   phase_shifted  R(t) = L(t + T/2), the canonical walking pattern
//   symmetric      R(t) = L(t)
//   asymmetric     left and right trace disjoint curves, so the mirrored
//                  trial resembles the original nowhere
inline TimeSeries gait(GaitVariant variant = GaitVariant::phase_shifted, double noise_sigma = 0.0,
                       std::uint64_t seed = 1) {
    constexpr int period = 80;
    constexpr int strides = 5;
    const int m = period * strides;
    TimeSeries ts;
    ts.sample_rate = 30.0;
    ts.channel_names = {"lx", "ly", "rx", "ry"};
    ts.samples = Matrix(static_cast<std::size_t>(m), 4);
    for (int t = 0; t < m; ++t) {
        const double phi = 2.0 * M_PI * t / period;
        double lx, ly, rx, ry;
        switch (variant) {
            case GaitVariant::phase_shifted:
                lx = std::cos(phi);
                ly = std::sin(phi);
                rx = std::cos(phi + M_PI);  // half a stride ahead
                ry = std::sin(phi + M_PI);
                break;
            case GaitVariant::symmetric:
                lx = rx = std::cos(phi);
                ly = ry = std::sin(phi);
                break;
            default: {  // asymmetric
                const double fast = 2.0 * M_PI * t / (period / 2);
                lx = 2.0 + std::cos(fast);
                ly = std::sin(fast);
                rx = -2.0 + std::cos(fast);
                ry = 0.4 * std::sin(2.0 * fast);
                break;
            }
        }
        ts.samples(static_cast<std::size_t>(t), 0) = lx;
        ts.samples(static_cast<std::size_t>(t), 1) = ly;
        ts.samples(static_cast<std::size_t>(t), 2) = rx;
        ts.samples(static_cast<std::size_t>(t), 3) = ry;
    }
    detail::add_noise(ts, noise_sigma, seed);
    return ts;
}

inline int gait_period() { return 80; }
inline int gait_strides() { return 5; }

inline MirrorMap gait_mirror_map() {
    MirrorMap map = MirrorMap::identity(4);
    map.permutation = {2, 3, 0, 1};  // swap left and right
    return map;
}

// A,B,A fixture at 30 fps: activity A is 5 cycles of period 40 on the unit
// circle at the origin (10 A-cycles in total across both blocks), activity B
// is 4.5 cycles of period 50 on a unit circle around (0, 5). The first ramp
// runs up the right side, the second down the left, so the two transitions
// share no positions. The second blocks enter at opposite phases, which the
// clustering must not care about.
inline TimeSeries aba(double noise_sigma = 0.0, std::uint64_t seed = 1) {
    constexpr int period_a = 40, cycles_a = 5;
    constexpr int period_b = 50;
    constexpr int block_b = 225;  // 4.5 cycles: enters at phase 0, exits at phase pi
    constexpr int gap = 30;
    const int block_a = period_a * cycles_a;
    const int m = 2 * block_a + block_b + 2 * gap;
    TimeSeries ts;
    ts.sample_rate = 30.0;
    ts.channel_names = {"x", "y"};
    ts.samples = Matrix(static_cast<std::size_t>(m), 2);
    int t = 0;
    auto circle = [&](int frames, int period, double cx, double cy, double phase) {
        for (int k = 0; k < frames; ++k, ++t) {
            const double phi = phase + 2.0 * M_PI * k / period;
            ts.samples(static_cast<std::size_t>(t), 0) = cx + std::cos(phi);
            ts.samples(static_cast<std::size_t>(t), 1) = cy + std::sin(phi);
        }
    };
    auto ramp = [&](const std::vector<std::pair<double, double>>& pts) {
        for (const auto& [x, y] : detail::polyline_ramp(pts, gap)) {
            ts.samples(static_cast<std::size_t>(t), 0) = x;
            ts.samples(static_cast<std::size_t>(t), 1) = y;
            ++t;
        }
    };
    circle(block_a, period_a, 0.0, 0.0, 0.0);                      // A1, exits at (1,0)
    ramp({{1.0, 0.0}, {2.5, 0.0}, {2.5, 5.0}, {1.0, 5.0}});        // right side up
    circle(block_b, period_b, 0.0, 5.0, 0.0);                      // B, exits at (-1,5)
    ramp({{-1.0, 5.0}, {-2.5, 5.0}, {-2.5, 0.0}, {-1.0, 0.0}});    // left side down
    circle(block_a, period_a, 0.0, 0.0, M_PI);                     // A2, enters at (-1,0)
    detail::add_noise(ts, noise_sigma, seed);
    return ts;
}

inline GroundTruth aba_ground_truth() {
    constexpr int block_a = 200, block_b = 225, gap = 30;
    GroundTruth gt;
    gt.intervals.push_back({{0, block_a - 1}, "A"});
    gt.intervals.push_back({{block_a, block_a + gap - 1}, "transition"});
    gt.intervals.push_back({{block_a + gap, block_a + gap + block_b - 1}, "B"});
    gt.intervals.push_back({{block_a + gap + block_b, block_a + 2 * gap + block_b - 1}, "transition"});
    gt.intervals.push_back({{block_a + 2 * gap + block_b, 2 * block_a + 2 * gap + block_b - 1}, "A"});
    return gt;
}

// Bounded-density fixture for scaling measurements: a circle whose centre
// drifts steadily along a third axis, so every frame keeps a roughly
// constant number of neighbours no matter how long the trial grows.
inline TimeSeries drifting_circle(int frames, double noise_sigma = 0.0, std::uint64_t seed = 1) {
    constexpr int period = 40;
    TimeSeries ts;
    ts.sample_rate = 30.0;
    ts.channel_names = {"x", "y", "z"};
    ts.samples = Matrix(static_cast<std::size_t>(frames), 3);
    const double drift_per_frame = 0.25 / period;  // neighbours span about two cycles
    for (int t = 0; t < frames; ++t) {
        const double phi = 2.0 * M_PI * t / period;
        ts.samples(static_cast<std::size_t>(t), 0) = std::cos(phi);
        ts.samples(static_cast<std::size_t>(t), 1) = std::sin(phi);
        ts.samples(static_cast<std::size_t>(t), 2) = drift_per_frame * t;
    }
    detail::add_noise(ts, noise_sigma, seed);
    return ts;
}

inline TimeSeries by_name(const std::string& name, double noise_sigma, std::uint64_t seed) {
    if (name == "fixA") return fix_a(noise_sigma, seed);
    if (name == "fixB") return fix_b(noise_sigma, seed);
    if (name == "gait") return gait(GaitVariant::phase_shifted, noise_sigma, seed);
    if (name == "gait_symmetric") return gait(GaitVariant::symmetric, noise_sigma, seed);
    if (name == "gait_asymmetric") return gait(GaitVariant::asymmetric, noise_sigma, seed);
    if (name == "aba") return aba(noise_sigma, seed);
    throw std::invalid_argument("unknown fixture: " + name);
}

inline GroundTruth ground_truth_by_name(const std::string& name) {
    if (name == "fixB") return fix_b_ground_truth();
    if (name == "aba") return aba_ground_truth();
    throw std::invalid_argument("no ground truth for fixture: " + name);
}

} // namespace motseg::fixtures
