#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "motseg/csv.hpp"
#include "motseg/preprocess.hpp"

using namespace motseg;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
    const fs::path path = fs::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

TimeSeries make_series(std::vector<std::vector<double>> rows, double rate) {
    TimeSeries ts;
    ts.sample_rate = rate;
    ts.samples = Matrix(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) ts.samples(i, j) = rows[i][j];
    for (std::size_t j = 0; j < rows.front().size(); ++j)
        ts.channel_names.push_back("c" + std::to_string(j));
    return ts;
}

// naive O(n^2) discrete Fourier transform, plenty for short test signals
std::vector<double> dft_magnitudes(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> mags(n / 2 + 1, 0.0);
    for (std::size_t k = 0; k < mags.size(); ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t t = 0; t < n; ++t)
            acc += x[t] * std::exp(std::complex<double>(0.0, -2.0 * M_PI * k * t / n));
        mags[k] = std::abs(acc);
    }
    return mags;
}

} // namespace

TEST_CASE("csv: 3-row 2-channel file loads verbatim") {
    const auto path = write_temp("motseg_ok.csv", "# rate=30\na,b\n1,2\n3,4\n5,6\n");
    const auto ts = load_timeseries(path.string());
    REQUIRE(ts.frames() == 3);
    REQUIRE(ts.channels() == 2);
    REQUIRE(ts.sample_rate == 30.0);
    REQUIRE(ts.samples(1, 0) == 3.0);
    REQUIRE(ts.channel_names == std::vector<std::string>{"a", "b"});
}

TEST_CASE("csv: NaN cell is rejected with row and column name") {
    const auto path = write_temp("motseg_nan.csv", "# rate=30\nx,lhumerus_rx\n1,2\n3,nan\n");
    try {
        load_timeseries(path.string());
        FAIL("expected an exception");
    } catch (const std::exception& e) {
        const std::string msg = e.what();
        REQUIRE(msg.find("row 2") != std::string::npos);
        REQUIRE(msg.find("lhumerus_rx") != std::string::npos);
    }
}

TEST_CASE("csv: empty data section reports no frames") {
    const auto path = write_temp("motseg_empty.csv", "# rate=30\na,b\n");
    REQUIRE_THROWS_WITH(load_timeseries(path.string()), Catch::Matchers::ContainsSubstring("no frames"));
}

TEST_CASE("csv: wrong column count names the row") {
    const auto path = write_temp("motseg_cols.csv", "# rate=30\na,b\n1,2\n3\n");
    REQUIRE_THROWS_WITH(load_timeseries(path.string()), Catch::Matchers::ContainsSubstring("row 2"));
}

TEST_CASE("csv: missing file and bad header fail") {
    REQUIRE_THROWS(load_timeseries("/nonexistent/motseg.csv"));
    const auto path = write_temp("motseg_hdr.csv", "rate=30\na\n1\n");
    REQUIRE_THROWS(load_timeseries(path.string()));
    const auto dup = write_temp("motseg_dup.csv", "# rate=30\na,a\n1,2\n");
    REQUIRE_THROWS(load_timeseries(dup.string()));
}

TEST_CASE("csv: save/load round trip is exact") {
    auto ts = make_series({{0.125, -3.5}, {1e-9, 2.0 / 3.0}, {5.0, 6.0}}, 120.0);
    const auto path = fs::temp_directory_path() / "motseg_roundtrip.csv";
    save_timeseries(ts, path.string());
    const auto back = load_timeseries(path.string());
    REQUIRE(back.frames() == ts.frames());
    REQUIRE(back.sample_rate == ts.sample_rate);
    for (std::size_t i = 0; i < ts.frames(); ++i)
        for (std::size_t j = 0; j < ts.channels(); ++j)
            REQUIRE(back.samples(i, j) == ts.samples(i, j));
}

TEST_CASE("resample: 2000 Hz to 30 Hz forces the frame ratio") {
    std::vector<std::vector<double>> rows(2000, {0.0});
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i][0] = std::sin(0.01 * i);
    const auto ts = make_series(rows, 2000.0);
    const auto out = resample(ts, 30.0);
    REQUIRE(out.frames() == 30);
    REQUIRE(out.sample_rate == 30.0);
}

TEST_CASE("resample: identity when target equals input rate") {
    const auto ts = make_series({{1.0}, {2.0}, {3.0}}, 30.0);
    const auto out = resample(ts, 30.0);
    REQUIRE(out.frames() == 3);
    for (std::size_t i = 0; i < 3; ++i) REQUIRE(out.samples(i, 0) == ts.samples(i, 0));
}

TEST_CASE("resample: ramp halving matches hand-evaluated interpolation") {
    const auto ts = make_series({{0.0}, {1.0}, {2.0}, {3.0}}, 4.0);
    const auto out = resample(ts, 2.0);
    REQUIRE(out.frames() == 2);
    REQUIRE(out.samples(0, 0) == Catch::Approx(0.0));
    REQUIRE(out.samples(1, 0) == Catch::Approx(2.0));
}

TEST_CASE("resample: rejects non-positive target rate") {
    const auto ts = make_series({{1.0}, {2.0}}, 10.0);
    REQUIRE_THROWS(resample(ts, 0.0));
    REQUIRE_THROWS(resample(ts, -3.0));
}

TEST_CASE("resample: down then up restores frame count on commensurate rates") {
    std::vector<std::vector<double>> rows(120, {0.0});
    for (std::size_t i = 0; i < rows.size(); ++i)
        rows[i][0] = std::sin(2.0 * M_PI * 1.5 * i / 120.0);  // band-limited, 1.5 Hz at 120 fps
    const auto ts = make_series(rows, 120.0);
    const auto down = resample(ts, 30.0);
    REQUIRE(down.frames() == 30);
    const auto up = resample(down, 120.0);
    REQUIRE(up.frames() == 120);
    for (std::size_t i = 0; i < 120; ++i)
        REQUIRE(up.samples(i, 0) == Catch::Approx(ts.samples(i, 0)).margin(0.02));
}

TEST_CASE("rectify: absolute value, idempotent") {
    const auto ts = make_series({{-1.0}, {2.0}, {-3.0}}, 10.0);
    const auto out = rectify(ts);
    REQUIRE(out.samples(0, 0) == 1.0);
    REQUIRE(out.samples(1, 0) == 2.0);
    REQUIRE(out.samples(2, 0) == 3.0);
    const auto twice = rectify(out);
    for (std::size_t i = 0; i < 3; ++i) REQUIRE(twice.samples(i, 0) == out.samples(i, 0));
}

TEST_CASE("binomial: window 16 leaves a constant channel unchanged") {
    std::vector<std::vector<double>> rows(50, {4.25});
    const auto ts = make_series(rows, 30.0);
    const auto out = binomial_filter(ts, 16);
    REQUIRE(out.frames() == 50);
    for (std::size_t i = 0; i < 50; ++i)
        REQUIRE(out.samples(i, 0) == Catch::Approx(4.25).epsilon(1e-12));
}

TEST_CASE("binomial: rejects window below 2, smooths a spike") {
    const auto ts = make_series({{0.0}, {0.0}, {1.0}, {0.0}, {0.0}}, 10.0);
    REQUIRE_THROWS(binomial_filter(ts, 1));
    const auto out = binomial_filter(ts, 3);
    REQUIRE(out.samples(2, 0) == Catch::Approx(0.5));   // (1+2+1)/4 weights
    REQUIRE(out.samples(1, 0) == Catch::Approx(0.25));
}

TEST_CASE("lowpass: stopband attenuation matches the design response (FFT oracle)") {
    // 30 Hz sampling, cutoff 10 Hz: the 1 Hz component must survive within
    // 2%, the 14 Hz component must be attenuated at least as strongly as the
    // designed zero-phase response predicts.
    const double rate = 30.0;
    const std::size_t n = 600;
    std::vector<std::vector<double>> rows(n, {0.0});
    for (std::size_t t = 0; t < n; ++t)
        rows[t][0] = std::sin(2.0 * M_PI * 1.0 * t / rate) + std::sin(2.0 * M_PI * 14.0 * t / rate);
    const auto ts = make_series(rows, rate);
    const auto out = lowpass(ts, 10.0);

    std::vector<double> before(n), after(n);
    for (std::size_t t = 0; t < n; ++t) {
        before[t] = ts.samples(t, 0);
        after[t] = out.samples(t, 0);
    }
    const auto mag_before = dft_magnitudes(before);
    const auto mag_after = dft_magnitudes(after);
    // bin k corresponds to k * rate / n Hz; n = 600 -> 0.05 Hz per bin
    const std::size_t bin_1hz = 20, bin_14hz = 280;
    const double pass_gain = mag_after[bin_1hz] / mag_before[bin_1hz];
    const double stop_gain = mag_after[bin_14hz] / mag_before[bin_14hz];
    REQUIRE(pass_gain == Catch::Approx(1.0).margin(0.02));
    const double designed = lowpass_design_response(10.0, 14.0);
    REQUIRE(stop_gain <= designed * 1.05);
    REQUIRE(stop_gain > 0.0);
}

TEST_CASE("lowpass: zero phase keeps a slow sine aligned") {
    const double rate = 100.0;
    const std::size_t n = 400;
    std::vector<std::vector<double>> rows(n, {0.0});
    for (std::size_t t = 0; t < n; ++t) rows[t][0] = std::sin(2.0 * M_PI * 2.0 * t / rate);
    const auto ts = make_series(rows, rate);
    const auto out = lowpass(ts, 20.0);
    for (std::size_t t = 50; t < n - 50; ++t)
        REQUIRE(out.samples(t, 0) == Catch::Approx(ts.samples(t, 0)).margin(0.02));
}

TEST_CASE("lowpass: cutoff must stay below Nyquist") {
    const auto ts = make_series({{1.0}, {2.0}, {3.0}, {4.0}}, 30.0);
    REQUIRE_THROWS(lowpass(ts, 15.0));
    REQUIRE_THROWS(lowpass(ts, 20.0));
    REQUIRE_THROWS(lowpass(ts, 0.0));
}

TEST_CASE("ground truth: interval and keypoint files parse, 1-based to 0-based") {
    const auto gti = write_temp("motseg_gti.csv",
                                "start_frame,end_frame,label\n1,300,walk\n301,330,transition\n");
    const auto gt = load_ground_truth(gti.string());
    REQUIRE(gt.is_interval());
    REQUIRE(gt.intervals.size() == 2);
    REQUIRE(gt.intervals[0].span.start == 0);
    REQUIRE(gt.intervals[0].span.end == 299);
    REQUIRE(gt.intervals[1].label == "transition");

    const auto gtk = write_temp("motseg_gtk.csv", "keyframe,label\n10,wave\n25,wave\n");
    const auto kp = load_ground_truth(gtk.string());
    REQUIRE(kp.is_keypoint());
    REQUIRE(kp.keypoints[0].frame == 9);
}

TEST_CASE("mirror map: file parses, involution enforced") {
    const auto path = write_temp("motseg_map.csv", "lx,rx\nly,ry,negate\n");
    const auto map = load_mirror_map(path.string(), {"lx", "ly", "rx", "ry"});
    REQUIRE(map.permutation == std::vector<std::size_t>{2, 3, 0, 1});
    REQUIRE(map.sign_flip[1]);
    REQUIRE(map.sign_flip[3]);
    REQUIRE_FALSE(map.sign_flip[0]);
    REQUIRE_THROWS(load_mirror_map(path.string(), {"lx", "ly"}));  // unknown channels
}
