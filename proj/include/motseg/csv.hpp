#pragma once

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "motseg/core.hpp"

// CSV interchange format:
//   # rate=<fps>
//   name_1,name_2,...
//   v,v,...              one line per frame
//
// Annotation files: "start_frame,end_frame,label" intervals or
// "keyframe,label" key points, 1-based inclusive, optional header line.
// Mirror map files: "channel_a,channel_b[,negate]" rows.

namespace motseg {

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(trim(cur));
    return out;
}

inline bool parse_double(const std::string& s, double& v) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto res = std::from_chars(b, e, v);
    return res.ec == std::errc{} && res.ptr == e;
}

inline bool parse_long(const std::string& s, long& v) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto res = std::from_chars(b, e, v);
    return res.ec == std::errc{} && res.ptr == e;
}

} // namespace detail

inline TimeSeries load_timeseries(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open time series file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    line = detail::trim(line);
    const std::string prefix = "#";
    if (line.rfind(prefix, 0) != 0)
        throw std::runtime_error(path + ": first line must be '# rate=<fps>'");
    const auto eq = line.find("rate=");
    if (eq == std::string::npos)
        throw std::runtime_error(path + ": first line must be '# rate=<fps>'");
    double rate = 0.0;
    if (!detail::parse_double(detail::trim(line.substr(eq + 5)), rate) || !(rate > 0.0))
        throw std::runtime_error(path + ": invalid sample rate");

    if (!std::getline(in, line)) throw std::runtime_error(path + ": missing channel name line");
    TimeSeries ts;
    ts.sample_rate = rate;
    ts.channel_names = detail::split_csv_line(line);
    const std::size_t c = ts.channel_names.size();
    if (c == 0 || (c == 1 && ts.channel_names[0].empty()))
        throw std::runtime_error(path + ": no channel names");

    std::vector<double> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_csv_line(line);
        ++rows;
        if (cells.size() != c) {
            throw std::runtime_error(path + ": row " + std::to_string(rows) + " has " +
                                     std::to_string(cells.size()) + " columns, expected " +
                                     std::to_string(c));
        }
        for (std::size_t j = 0; j < c; ++j) {
            double v = 0.0;
            if (!detail::parse_double(cells[j], v) || !std::isfinite(v)) {
                throw std::runtime_error(path + ": non-finite or malformed value at row " +
                                         std::to_string(rows) + ", column \"" +
                                         ts.channel_names[j] + "\"");
            }
            values.push_back(v);
        }
    }
    if (rows == 0) throw std::runtime_error(path + ": no frames");

    ts.samples = Matrix(rows, c);
    ts.samples.data() = std::move(values);
    ts.validate();
    return ts;
}

inline void save_timeseries(const TimeSeries& ts, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write time series file: " + path);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", ts.sample_rate);
    out << "# rate=" << buf << "\n";
    for (std::size_t j = 0; j < ts.channels(); ++j) {
        if (j) out << ',';
        out << ts.channel_names[j];
    }
    out << "\n";
    for (std::size_t i = 0; i < ts.frames(); ++i) {
        for (std::size_t j = 0; j < ts.channels(); ++j) {
            if (j) out << ',';
            std::snprintf(buf, sizeof(buf), "%.17g", ts.samples(i, j));
            out << buf;
        }
        out << "\n";
    }
}

// --- ground truth annotations -------------------------------------------

struct LabeledInterval {
    Interval span;      // 0-based inclusive
    std::string label;
};

struct KeyPoint {
    int frame = 0;      // 0-based
    std::string label;
};

struct GroundTruth {
    std::vector<LabeledInterval> intervals;
    std::vector<KeyPoint> keypoints;

    bool is_interval() const { return !intervals.empty(); }
    bool is_keypoint() const { return !keypoints.empty(); }
};

inline bool is_reserved_label(const std::string& label) {
    return label == "transition" || label == "uncertain";
}

inline GroundTruth load_ground_truth(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open ground truth file: " + path);
    GroundTruth gt;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto cells = detail::split_csv_line(t);
        long a = 0, b = 0;
        if (cells.size() == 3) {
            if (!detail::parse_long(cells[0], a)) {
                if (lineno == 1) continue;  // header line
                throw std::runtime_error(path + ": bad interval at line " + std::to_string(lineno));
            }
            if (!detail::parse_long(cells[1], b) || a < 1 || b < a)
                throw std::runtime_error(path + ": bad interval at line " + std::to_string(lineno));
            gt.intervals.push_back({{static_cast<int>(a - 1), static_cast<int>(b - 1)}, cells[2]});
        } else if (cells.size() == 2) {
            if (!detail::parse_long(cells[0], a)) {
                if (lineno == 1) continue;
                throw std::runtime_error(path + ": bad key point at line " + std::to_string(lineno));
            }
            if (a < 1) throw std::runtime_error(path + ": bad key point at line " + std::to_string(lineno));
            gt.keypoints.push_back({static_cast<int>(a - 1), cells[1]});
        } else {
            throw std::runtime_error(path + ": expected 2 or 3 columns at line " + std::to_string(lineno));
        }
    }
    if (gt.intervals.empty() && gt.keypoints.empty())
        throw std::runtime_error(path + ": no annotations");
    if (!gt.intervals.empty() && !gt.keypoints.empty())
        throw std::runtime_error(path + ": mixed interval and key point annotations");
    return gt;
}

inline void save_ground_truth(const GroundTruth& gt, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write ground truth file: " + path);
    if (gt.is_interval()) {
        out << "start_frame,end_frame,label\n";
        for (const auto& iv : gt.intervals)
            out << iv.span.start + 1 << ',' << iv.span.end + 1 << ',' << iv.label << "\n";
    } else {
        out << "keyframe,label\n";
        for (const auto& kp : gt.keypoints) out << kp.frame + 1 << ',' << kp.label << "\n";
    }
}

// --- mirror map -----------------------------------------------------------

// Channel-level realization of the sagittal-plane reflection: a channel
// permutation (an involution) plus per-channel sign flips.
struct MirrorMap {
    std::vector<std::size_t> permutation;  // target index per channel
    std::vector<bool> sign_flip;           // negate after permuting

    std::size_t channels() const { return permutation.size(); }

    static MirrorMap identity(std::size_t c) {
        MirrorMap m;
        m.permutation.resize(c);
        for (std::size_t i = 0; i < c; ++i) m.permutation[i] = i;
        m.sign_flip.assign(c, false);
        return m;
    }

    void validate() const {
        const std::size_t c = channels();
        if (sign_flip.size() != c) throw std::invalid_argument("MirrorMap: size mismatch");
        for (std::size_t i = 0; i < c; ++i) {
            if (permutation[i] >= c) throw std::invalid_argument("MirrorMap: index out of range");
            if (permutation[permutation[i]] != i)
                throw std::invalid_argument("MirrorMap: permutation is not an involution");
            if (sign_flip[i] != sign_flip[permutation[i]])
                throw std::invalid_argument("MirrorMap: inconsistent sign flip on swap pair");
        }
    }
};

inline MirrorMap load_mirror_map(const std::string& path,
                                 const std::vector<std::string>& channel_names) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mirror map file: " + path);
    auto index_of = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < channel_names.size(); ++i)
            if (channel_names[i] == name) return i;
        throw std::runtime_error(path + ": unknown channel '" + name + "'");
    };
    MirrorMap map = MirrorMap::identity(channel_names.size());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto cells = detail::split_csv_line(t);
        if (cells.size() != 2 && cells.size() != 3)
            throw std::runtime_error(path + ": expected 2 or 3 columns at line " + std::to_string(lineno));
        const std::size_t a = index_of(cells[0]);
        const std::size_t b = index_of(cells[1]);
        map.permutation[a] = b;
        map.permutation[b] = a;
        if (cells.size() == 3) {
            if (cells[2] != "negate")
                throw std::runtime_error(path + ": third column must be 'negate' at line " +
                                         std::to_string(lineno));
            map.sign_flip[a] = true;
            map.sign_flip[b] = true;
        }
    }
    map.validate();
    return map;
}

} // namespace motseg
