#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "motseg/core.hpp"
#include "motseg/csv.hpp"
#include "motseg/kdtree.hpp"
#include "motseg/parallel.hpp"

// Feature construction: temporal stacking, mirrored variants, and the
// density-based feature bundling that pulls repeated cycles onto a common
// manifold before any neighbourhood search.

namespace motseg {

// Concatenates frames i+o for each offset o (clamped to the trial bounds)
// into one row per frame. Offsets must contain 0.
inline FeatureSequence stack_features(const TimeSeries& series, std::vector<int> offsets) {
    if (offsets.empty()) throw std::invalid_argument("stack_features: offsets must not be empty");
    std::sort(offsets.begin(), offsets.end());
    if (std::adjacent_find(offsets.begin(), offsets.end()) != offsets.end())
        throw std::invalid_argument("stack_features: duplicate offsets");
    if (!std::binary_search(offsets.begin(), offsets.end(), 0))
        throw std::invalid_argument("stack_features: offsets must contain 0");

    const std::size_t m = series.frames();
    const std::size_t n = series.channels();
    FeatureSequence out;
    out.stacking_offsets = offsets;
    out.source_dim = n;
    out.bundled = false;
    out.vectors = Matrix(m, n * offsets.size());
    for (std::size_t i = 0; i < m; ++i) {
        double* row = out.vectors.row(i);
        for (std::size_t o = 0; o < offsets.size(); ++o) {
            long src = static_cast<long>(i) + offsets[o];
            src = std::clamp<long>(src, 0, static_cast<long>(m) - 1);
            const double* from = series.samples.row(static_cast<std::size_t>(src));
            std::copy(from, from + n, row + o * n);
        }
    }
    return out;
}

// Reflection across the sagittal plane realized as a channel permutation
// plus sign flips.
inline TimeSeries mirror_features(const TimeSeries& series, const MirrorMap& map) {
    if (map.channels() != series.channels())
        throw std::invalid_argument("mirror_features: map channel count mismatch");
    map.validate();
    TimeSeries out = series;
    const std::size_t m = series.frames();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t c = 0; c < map.channels(); ++c) {
            double v = series.samples(i, map.permutation[c]);
            if (map.sign_flip[c]) v = -v;
            out.samples(i, c) = v;
        }
    }
    return out;
}

// Same reflection applied to an already stacked (and possibly bundled)
// feature sequence: the map acts on every stacked block. Valid because
// stacking and mirroring commute.
inline FeatureSequence mirror_stacked(const FeatureSequence& feats, const MirrorMap& map) {
    if (map.channels() != feats.source_dim)
        throw std::invalid_argument("mirror_stacked: map channel count mismatch");
    map.validate();
    FeatureSequence out = feats;
    const std::size_t blocks = feats.stacking_offsets.size();
    const std::size_t n = feats.source_dim;
    for (std::size_t i = 0; i < feats.frames(); ++i) {
        const double* src = feats.vectors.row(i);
        double* dst = out.vectors.row(i);
        for (std::size_t b = 0; b < blocks; ++b)
            for (std::size_t c = 0; c < n; ++c) {
                double v = src[b * n + map.permutation[c]];
                if (map.sign_flip[c]) v = -v;
                dst[b * n + c] = v;
            }
    }
    return out;
}

struct Direction {
    std::vector<double> unit;  // length D; zero vector when !moving
    bool moving = false;
};

// Numerically centered five-point derivative, normalized. The first and last
// two frames fall back to the one-sided five-point formulas of matching
// order (exact for polynomials up to degree 4).
inline Direction direction_of_movement(const FeatureSequence& feats, std::size_t i) {
    const std::size_t m = feats.frames();
    if (m < 5) throw std::invalid_argument("direction_of_movement: need at least 5 frames");
    if (i >= m) throw std::out_of_range("direction_of_movement: frame index out of range");
    const std::size_t d = feats.dim();

    // rows and weights of the applicable five-point stencil, premultiplied by 12
    std::size_t base;
    const double* w;
    static const double interior[5] = {1, -8, 0, 8, -1};
    static const double first[5] = {-25, 48, -36, 16, -3};
    static const double second[5] = {-3, -10, 18, -6, 1};
    static const double second_last[5] = {-1, 6, -18, 10, 3};
    static const double last[5] = {3, -16, 36, -48, 25};
    if (i >= 2 && i + 2 < m) {
        base = i - 2;
        w = interior;
    } else if (i == 0) {
        base = 0;
        w = first;
    } else if (i == 1) {
        base = 0;
        w = second;
    } else if (i == m - 2) {
        base = m - 5;
        w = second_last;
    } else {
        base = m - 5;
        w = last;
    }

    Direction dir;
    dir.unit.assign(d, 0.0);
    for (int t = 0; t < 5; ++t) {
        const double* row = feats.vectors.row(base + static_cast<std::size_t>(t));
        if (w[t] == 0.0) continue;
        for (std::size_t c = 0; c < d; ++c) dir.unit[c] += w[t] * row[c];
    }
    double norm = 0.0, scale = 1.0;
    const double* here = feats.vectors.row(i);
    for (std::size_t c = 0; c < d; ++c) {
        dir.unit[c] /= 12.0;
        norm += dir.unit[c] * dir.unit[c];
        scale = std::max(scale, std::fabs(here[c]));
    }
    norm = std::sqrt(norm);
    if (norm < 1e-12 * scale) {
        dir.unit.assign(d, 0.0);
        return dir;
    }
    for (std::size_t c = 0; c < d; ++c) dir.unit[c] /= norm;
    dir.moving = true;
    return dir;
}

// Raw (unnormalized) five-point derivative of a scalar sequence; exposed for
// tests against symbolic differentiation.
inline double five_point_derivative(const std::vector<double>& f, std::size_t i) {
    FeatureSequence tmp;
    tmp.vectors = Matrix(f.size(), 1);
    for (std::size_t t = 0; t < f.size(); ++t) tmp.vectors(t, 0) = f[t];
    tmp.stacking_offsets = {0};
    tmp.source_dim = 1;
    // re-run the stencil without normalization
    const std::size_t m = f.size();
    if (m < 5) throw std::invalid_argument("five_point_derivative: need at least 5 samples");
    auto at = [&](std::size_t t) { return f[t]; };
    if (i >= 2 && i + 2 < m)
        return (-at(i + 2) + 8 * at(i + 1) - 8 * at(i - 1) + at(i - 2)) / 12.0;
    if (i == 0) return (-25 * at(0) + 48 * at(1) - 36 * at(2) + 16 * at(3) - 3 * at(4)) / 12.0;
    if (i == 1) return (-3 * at(0) - 10 * at(1) + 18 * at(2) - 6 * at(3) + at(4)) / 12.0;
    if (i == m - 2)
        return (-at(m - 5) + 6 * at(m - 4) - 18 * at(m - 3) + 10 * at(m - 2) + 3 * at(m - 1)) / 12.0;
    return (3 * at(m - 5) - 16 * at(m - 4) + 36 * at(m - 3) - 48 * at(m - 2) + 25 * at(m - 1)) / 12.0;
}

// Orthonormal basis of the (D-1)-dimensional complement of `direction`,
// from a QR decomposition of a matrix whose first column is the direction
// and whose remaining entries are random (seeded, so reproducible).
inline Matrix orthogonal_subspace(const std::vector<double>& direction, std::uint64_t seed) {
    const std::size_t d = direction.size();
    double norm = 0.0;
    for (double v : direction) norm += v * v;
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) throw std::invalid_argument("orthogonal_subspace: zero direction");

    Eigen::MatrixXd a(d, d);
    for (std::size_t r = 0; r < d; ++r) a(static_cast<Eigen::Index>(r), 0) = direction[r] / norm;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t c = 1; c < d; ++c)
        for (std::size_t r = 0; r < d; ++r)
            a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = gauss(rng);

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ();
    Matrix basis(d, d - 1);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c + 1 < d; ++c)
            basis(r, c) = q(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c + 1));
    return basis;
}

// Scott's rule per variate: H_jj = sigma_j * k^(-1/(d+4)). Zero-variance
// variates are floored so the kernel never becomes singular.
inline std::vector<double> kde_bandwidth(const Matrix& samples) {
    const std::size_t k = samples.rows();
    const std::size_t d = samples.cols();
    if (k < 2) throw std::invalid_argument("kde_bandwidth: need at least 2 samples");

    double global_range = 0.0;
    std::vector<double> h(d, 0.0);
    const double factor = std::pow(static_cast<double>(k), -1.0 / (static_cast<double>(d) + 4.0));
    for (std::size_t j = 0; j < d; ++j) {
        double mean = 0.0, lo = samples(0, j), hi = samples(0, j);
        for (std::size_t i = 0; i < k; ++i) {
            mean += samples(i, j);
            lo = std::min(lo, samples(i, j));
            hi = std::max(hi, samples(i, j));
        }
        mean /= static_cast<double>(k);
        double var = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double dv = samples(i, j) - mean;
            var += dv * dv;
        }
        var /= static_cast<double>(k - 1);
        h[j] = std::sqrt(var) * factor;
        global_range = std::max(global_range, hi - lo);
    }
    const double floor_value = global_range > 0.0 ? 1e-12 * global_range : 1e-12;
    for (double& v : h) v = std::max(v, floor_value);
    return h;
}

// Gaussian kernel density over the sample set with a diagonal bandwidth.
inline double kde_value(const Matrix& samples, const std::vector<double>& bandwidth,
                        const double* point) {
    const std::size_t k = samples.rows();
    const std::size_t d = samples.cols();
    double norm = 1.0 / static_cast<double>(k);
    for (std::size_t j = 0; j < d; ++j) norm /= bandwidth[j] * std::sqrt(2.0 * M_PI);
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double e = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double z = (point[j] - samples(i, j)) / bandwidth[j];
            e += z * z;
        }
        sum += std::exp(-0.5 * e);
    }
    return norm * sum;
}

struct BundleStats {
    std::size_t frames_adjusted = 0;
    std::size_t frames_skipped = 0;   // flagged zero direction
    std::size_t total_iterations = 0;
};

namespace detail {

inline std::uint64_t frame_seed(std::uint64_t seed, std::size_t frame) {
    std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(frame) + 1));
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    return x;
}

} // namespace detail

// Density-based feature bundling. Per frame: take the k nearest neighbours,
// reduce them with a PCA keeping 97.5% of their variance, and climb the
// Gaussian kernel density by mean shift, with the step confined to the
// orthogonal complement of the direction of movement so the trajectory
// structure cannot collapse. The resulting offset is backprojected and added
// to the original feature vector.
inline FeatureSequence bundle_features(const FeatureSequence& feats, std::size_t k,
                                       std::uint64_t seed, int threads = 1,
                                       BundleStats* stats = nullptr) {
    const std::size_t m = feats.frames();
    const std::size_t dim = feats.dim();
    if (k < 2) throw std::invalid_argument("bundle_features: k must be >= 2");
    if (m <= k) throw std::invalid_argument("bundle_features: need more frames than neighbours");
    if (m < 5) throw std::invalid_argument("bundle_features: need at least 5 frames");

    FeatureSequence out = feats;
    out.bundled = true;
    if (dim < 2) {
        if (stats) stats->frames_skipped = m;
        return out;  // no orthogonal complement to move in
    }

    KdTree tree(feats.vectors);
    std::vector<std::uint8_t> adjusted(m, 0);
    std::vector<std::uint32_t> iterations(m, 0);

    parallel_for(static_cast<int>(m), threads, [&](int frame) {
        const auto i = static_cast<std::size_t>(frame);
        const Direction dir = direction_of_movement(feats, i);
        if (!dir.moving) return;

        std::vector<std::pair<std::size_t, double>> hits;
        tree.knn_search(feats.vectors.row(i), k, i, hits);
        const double local_scale = hits.back().second;  // distance to k-th neighbour

        // neighbour set, centered
        Eigen::MatrixXd x(k, dim);
        Eigen::VectorXd mu = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
        for (std::size_t n = 0; n < k; ++n) {
            const double* row = feats.vectors.row(hits[n].first);
            for (std::size_t c = 0; c < dim; ++c) {
                x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(c)) = row[c];
                mu(static_cast<Eigen::Index>(c)) += row[c];
            }
        }
        mu /= static_cast<double>(k);
        Eigen::MatrixXd xc = x.rowwise() - mu.transpose();

        // PCA of the neighbour set keeping >= 97.5% of its variance
        Eigen::MatrixXd cov = xc.transpose() * xc / static_cast<double>(k - 1);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
        const Eigen::VectorXd evals = eig.eigenvalues();  // ascending
        double total = 0.0;
        for (Eigen::Index e = 0; e < evals.size(); ++e) total += std::max(0.0, evals(e));
        std::size_t d_red = 1;
        if (total > 0.0) {
            double acc = 0.0;
            for (Eigen::Index e = evals.size() - 1; e >= 0; --e) {
                acc += std::max(0.0, evals(e));
                d_red = static_cast<std::size_t>(evals.size() - e);
                if (acc >= 0.975 * total) break;
            }
        }
        Eigen::MatrixXd w(dim, d_red);
        for (std::size_t c = 0; c < d_red; ++c)
            w.col(static_cast<Eigen::Index>(c)) =
                eig.eigenvectors().col(evals.size() - 1 - static_cast<Eigen::Index>(c));

        // neighbours and query in PCA coordinates
        Eigen::MatrixXd y_nbrs = xc * w;  // k x d_red
        Eigen::VectorXd fi(static_cast<Eigen::Index>(dim));
        for (std::size_t c = 0; c < dim; ++c) fi(static_cast<Eigen::Index>(c)) = feats.vectors(i, c);
        const Eigen::VectorXd y0 = w.transpose() * (fi - mu);

        Matrix y_samples(k, d_red);
        for (std::size_t n = 0; n < k; ++n)
            for (std::size_t c = 0; c < d_red; ++c)
                y_samples(n, c) = y_nbrs(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(c));
        const std::vector<double> h = kde_bandwidth(y_samples);

        // direction of movement projected into PCA coordinates; steps are kept
        // orthogonal to it so the offset stays inside the orthogonal subspace
        Eigen::VectorXd dvec(static_cast<Eigen::Index>(dim));
        for (std::size_t c = 0; c < dim; ++c) dvec(static_cast<Eigen::Index>(c)) = dir.unit[c];
        Eigen::VectorXd delta = w.transpose() * dvec;
        const bool constrained = delta.norm() > 1e-9;
        if (constrained) delta.normalize();

        auto density = [&](const Eigen::VectorXd& y) {
            return kde_value(y_samples, h, y.data());
        };

        Eigen::VectorXd y = y0;
        double f_cur = density(y);
        const double f_init = f_cur;
        const double step_tol = 1e-6 * std::max(local_scale, 1e-300);
        std::uint32_t iters = 0;
        for (; iters < 50; ++iters) {
            // mean-shift proposal
            Eigen::VectorXd num = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d_red));
            double den = 0.0;
            for (std::size_t n = 0; n < k; ++n) {
                double e = 0.0;
                for (std::size_t c = 0; c < d_red; ++c) {
                    const double z = (y(static_cast<Eigen::Index>(c)) - y_samples(n, c)) / h[c];
                    e += z * z;
                }
                const double wgt = std::exp(-0.5 * e);
                den += wgt;
                for (std::size_t c = 0; c < d_red; ++c)
                    num(static_cast<Eigen::Index>(c)) += wgt * y_samples(n, c);
            }
            if (den < 1e-290) break;
            Eigen::VectorXd step = num / den - y;
            if (constrained) step -= step.dot(delta) * delta;

            // guarded ascent: never accept a density decrease
            double f_next = density(y + step);
            int halvings = 0;
            while (f_next < f_cur && halvings < 12) {
                step *= 0.5;
                f_next = density(y + step);
                ++halvings;
            }
            if (f_next < f_cur) break;
            y += step;
            f_cur = f_next;
            if (step.norm() < step_tol) {
                ++iters;
                break;
            }
        }

        Eigen::VectorXd offset = w * (y - y0);
        // materialize the offset through the QR subspace basis so it is an
        // element of span(orthogonal_subspace(d_i)) by construction
        if (constrained) {
            const Matrix basis = orthogonal_subspace(dir.unit, detail::frame_seed(seed, i));
            Eigen::MatrixXd bmat(dim, dim - 1);
            for (std::size_t r = 0; r < dim; ++r)
                for (std::size_t c = 0; c + 1 < dim; ++c)
                    bmat(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = basis(r, c);
            offset = bmat * (bmat.transpose() * offset);
        }

        // the invariant "density never decreases" must survive the projection
        const Eigen::VectorXd y_final = w.transpose() * (fi + offset - mu);
        if (density(y_final) < f_init) return;

        double* dst = out.vectors.row(i);
        for (std::size_t c = 0; c < dim; ++c) dst[c] += offset(static_cast<Eigen::Index>(c));
        adjusted[i] = 1;
        iterations[i] = iters;
    });

    if (stats) {
        for (std::size_t i = 0; i < m; ++i) {
            if (adjusted[i]) ++stats->frames_adjusted;
            stats->total_iterations += iterations[i];
        }
        stats->frames_skipped = m - stats->frames_adjusted;
    }
    return out;
}

} // namespace motseg
