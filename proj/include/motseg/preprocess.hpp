#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "motseg/core.hpp"

// Sensor preprocessing: resampling plus the rectify / low-pass / binomial
// filters used for EMG and accelerometer trials. All functions return a new
// TimeSeries and preserve frame count except resample.

namespace motseg {

// Linear-interpolation resampling. Output frame count is
// round(m * target_rate / input_rate); output frame o samples the source at
// position o * input_rate / target_rate (clamped to the last frame).
inline TimeSeries resample(const TimeSeries& ts, double target_rate) {
    if (!(target_rate > 0.0)) throw std::invalid_argument("resample: target rate must be positive");
    if (target_rate == ts.sample_rate) return ts;

    const std::size_t m = ts.frames();
    const std::size_t c = ts.channels();
    const auto n_out = static_cast<std::size_t>(
        std::max<long long>(1, std::llround(static_cast<double>(m) * target_rate / ts.sample_rate)));

    TimeSeries out;
    out.sample_rate = target_rate;
    out.channel_names = ts.channel_names;
    out.samples = Matrix(n_out, c);
    const double step = ts.sample_rate / target_rate;
    for (std::size_t o = 0; o < n_out; ++o) {
        double pos = static_cast<double>(o) * step;
        if (pos > static_cast<double>(m - 1)) pos = static_cast<double>(m - 1);
        const auto lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, m - 1);
        const double t = pos - static_cast<double>(lo);
        for (std::size_t j = 0; j < c; ++j)
            out.samples(o, j) = (1.0 - t) * ts.samples(lo, j) + t * ts.samples(hi, j);
    }
    return out;
}

inline TimeSeries rectify(const TimeSeries& ts) {
    TimeSeries out = ts;
    for (double& v : out.samples.data()) v = std::fabs(v);
    return out;
}

namespace detail {

// Reflected padding index: ... 2 1 | 0 1 2 ... m-1 | m-2 m-3 ...
inline std::size_t reflect_index(long i, long m) {
    if (m == 1) return 0;
    const long period = 2 * (m - 1);
    long k = i % period;
    if (k < 0) k += period;
    if (k >= m) k = period - k;
    return static_cast<std::size_t>(k);
}

// One biquad pass over a single channel, reflect-padded at both ends so the
// filter is warmed up before the first real frame.
inline void biquad_pass(std::vector<double>& x, const double b[3], const double a[2]) {
    const long m = static_cast<long>(x.size());
    const long pad = std::min<long>(m - 1, 24);
    std::vector<double> ext;
    ext.reserve(static_cast<std::size_t>(m + 2 * pad));
    for (long i = -pad; i < m + pad; ++i) ext.push_back(x[reflect_index(i, m)]);

    double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
    bool primed = false;
    for (std::size_t i = 0; i < ext.size(); ++i) {
        const double xin = ext[i];
        double y;
        if (!primed) {
            // start the recursion at steady state for the first padded sample
            y = xin;
            x1 = x2 = xin;
            y1 = y2 = xin;
            primed = true;
        } else {
            y = b[0] * xin + b[1] * x1 + b[2] * x2 - a[0] * y1 - a[1] * y2;
            x2 = x1;
            x1 = xin;
            y2 = y1;
            y1 = y;
        }
        ext[i] = y;
    }
    for (long i = 0; i < m; ++i) x[static_cast<std::size_t>(i)] = ext[static_cast<std::size_t>(i + pad)];
}

} // namespace detail

// Second-order Butterworth low-pass, applied forward and backward so the
// result is zero-phase: cut positions downstream are compared frame-wise and
// must not drift. Cutoff must be below the Nyquist frequency.
inline TimeSeries lowpass(const TimeSeries& ts, double cutoff_hz) {
    const double nyquist = ts.sample_rate / 2.0;
    if (!(cutoff_hz > 0.0) || cutoff_hz >= nyquist)
        throw std::invalid_argument("lowpass: cutoff must lie in (0, rate/2)");

    // bilinear-transform design
    const double w = std::tan(M_PI * cutoff_hz / ts.sample_rate);
    const double k = 1.0 + std::sqrt(2.0) * w + w * w;
    const double b[3] = {w * w / k, 2.0 * w * w / k, w * w / k};
    const double a[2] = {2.0 * (w * w - 1.0) / k, (1.0 - std::sqrt(2.0) * w + w * w) / k};

    TimeSeries out = ts;
    const std::size_t m = ts.frames();
    std::vector<double> chan(m);
    for (std::size_t j = 0; j < ts.channels(); ++j) {
        for (std::size_t i = 0; i < m; ++i) chan[i] = ts.samples(i, j);
        detail::biquad_pass(chan, b, a);
        std::reverse(chan.begin(), chan.end());
        detail::biquad_pass(chan, b, a);
        std::reverse(chan.begin(), chan.end());
        for (std::size_t i = 0; i < m; ++i) out.samples(i, j) = chan[i];
    }
    return out;
}

// Smoothing with normalized binomial coefficients C(window-1, k) / 2^(window-1).
// Edges use reflected padding; the weights sum to one, so constants pass
// through unchanged.
inline TimeSeries binomial_filter(const TimeSeries& ts, int window) {
    if (window < 2) throw std::invalid_argument("binomial_filter: window must be >= 2");

    std::vector<double> taps(static_cast<std::size_t>(window));
    taps[0] = 1.0;
    for (int i = 1; i < window; ++i) {
        taps[static_cast<std::size_t>(i)] = taps[static_cast<std::size_t>(i - 1)] *
                                            static_cast<double>(window - i) / static_cast<double>(i);
    }
    double sum = 0.0;
    for (double t : taps) sum += t;
    for (double& t : taps) t /= sum;

    const long m = static_cast<long>(ts.frames());
    const long offset = (window - 1) / 2;
    TimeSeries out = ts;
    for (std::size_t j = 0; j < ts.channels(); ++j) {
        for (long i = 0; i < m; ++i) {
            double acc = 0.0;
            for (int t = 0; t < window; ++t)
                acc += taps[static_cast<std::size_t>(t)] *
                       ts.samples(detail::reflect_index(i + t - offset, m), j);
            out.samples(static_cast<std::size_t>(i), j) = acc;
        }
    }
    return out;
}

// Designed zero-phase amplitude response of the low-pass at frequency f:
// forward+backward second-order Butterworth gives 1 / (1 + (f/fc)^4).
inline double lowpass_design_response(double cutoff_hz, double f_hz) {
    const double r = f_hz / cutoff_hz;
    return 1.0 / (1.0 + r * r * r * r);
}

} // namespace motseg
