#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

// Core data types shared by the whole pipeline. Frame indices are 0-based
// everywhere inside the library; the CSV/JSON interfaces are 1-based and
// convert at the boundary.

namespace motseg {

// Row-major m x c matrix of doubles. Small wrapper instead of a full linear
// algebra type: the pipeline only ever needs row access and element reads.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* row(std::size_t r) { return data_.data() + r * cols_; }
    const double* row(std::size_t r) const { return data_.data() + r * cols_; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline double squared_distance(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// A multichannel motion trial: m frames x c channels at a fixed sample rate.
struct TimeSeries {
    Matrix samples;                          // m x c
    double sample_rate = 0.0;                // frames per second
    std::vector<std::string> channel_names;  // length c

    std::size_t frames() const { return samples.rows(); }
    std::size_t channels() const { return samples.cols(); }

    void validate() const {
        if (frames() < 1) throw std::invalid_argument("TimeSeries: no frames");
        if (channels() < 1) throw std::invalid_argument("TimeSeries: no channels");
        if (!(sample_rate > 0.0)) throw std::invalid_argument("TimeSeries: sample_rate must be positive");
        if (channel_names.size() != channels())
            throw std::invalid_argument("TimeSeries: channel name count mismatch");
        for (std::size_t i = 0; i < channel_names.size(); ++i)
            for (std::size_t j = i + 1; j < channel_names.size(); ++j)
                if (channel_names[i] == channel_names[j])
                    throw std::invalid_argument("TimeSeries: duplicate channel name '" + channel_names[i] + "'");
        if (!samples.all_finite())
            throw std::invalid_argument("TimeSeries: non-finite sample");
    }
};

// Per-frame stacked feature vectors F_1..F_m. D = source_dim * |offsets|.
struct FeatureSequence {
    Matrix vectors;                   // m x D
    std::vector<int> stacking_offsets;
    std::size_t source_dim = 0;       // channels per un-stacked frame
    bool bundled = false;

    std::size_t frames() const { return vectors.rows(); }
    std::size_t dim() const { return vectors.cols(); }
};

// Closed frame interval [start, end], 0-based inclusive.
struct Interval {
    int start = 0;
    int end = 0;

    int length() const { return end - start + 1; }
    bool contains(int f) const { return f >= start && f <= end; }
    bool intersects(const Interval& o) const { return start <= o.end && o.start <= end; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

} // namespace motseg
