#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "motseg/activity.hpp"
#include "motseg/clustering.hpp"
#include "motseg/neighborhood.hpp"
#include "motseg/primitives.hpp"

// File renderers: SSSM as binary PGM, segmentation timeline and histograms
// as standalone SVG.

namespace motseg {

inline void write_pgm(const SssmImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write image: " + path);
    out << "P5\n" << img.size << " " << img.size << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
}

namespace detail {

inline std::string cluster_color(int cluster, int total) {
    const double hue = total > 0 ? 360.0 * cluster / total : 0.0;
    char buf[48];
    std::snprintf(buf, sizeof(buf), "hsl(%.0f,70%%,55%%)", hue);
    return buf;
}

} // namespace detail

// Horizontal timeline: activity bar on top (activities coloured, transitions
// grey), primitive bar below coloured by cluster.
inline void write_timeline_svg(const ActivitySegmentation& seg,
                               const std::vector<MotionPrimitive>& primitives,
                               const std::vector<int>& cluster_of, int cluster_count,
                               const std::string& path) {
    const double width = 960.0, height = 90.0;
    const double sx = width / std::max(1, seg.trial_length);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write timeline: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    char buf[256];
    for (const auto& t : seg.transitions) {
        std::snprintf(buf, sizeof(buf),
                      "<rect x=\"%.2f\" y=\"10\" width=\"%.2f\" height=\"30\" fill=\"#bbbbbb\"/>\n",
                      t.start * sx, t.length() * sx);
        out << buf;
    }
    for (const auto& a : seg.activities) {
        std::snprintf(buf, sizeof(buf),
                      "<rect x=\"%.2f\" y=\"10\" width=\"%.2f\" height=\"30\" fill=\"#4477aa\"/>\n",
                      a.start * sx, a.length() * sx);
        out << buf;
    }
    for (std::size_t p = 0; p < primitives.size(); ++p) {
        const auto& span = primitives[p].span;
        const auto color = detail::cluster_color(cluster_of[p], cluster_count);
        std::snprintf(buf, sizeof(buf),
                      "<rect x=\"%.2f\" y=\"50\" width=\"%.2f\" height=\"30\" fill=\"%s\" "
                      "stroke=\"#222222\" stroke-width=\"0.5\"/>\n",
                      span.start * sx, span.length() * sx, color.c_str());
        out << buf;
    }
    out << "</svg>\n";
}

inline void write_histogram_svg(const std::vector<std::size_t>& bins, const std::string& title,
                                const std::string& path) {
    const double width = 480.0, height = 320.0, margin = 30.0;
    std::size_t peak = 1;
    for (std::size_t b : bins) peak = std::max(peak, b);
    const double bar_w = (width - 2 * margin) / std::max<std::size_t>(1, bins.size());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write histogram: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    out << "<text x=\"" << margin << "\" y=\"20\" font-size=\"14\">" << title << "</text>\n";
    char buf[256];
    for (std::size_t b = 0; b < bins.size(); ++b) {
        const double h = (height - 2 * margin) * static_cast<double>(bins[b]) / static_cast<double>(peak);
        std::snprintf(buf, sizeof(buf),
                      "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"#4477aa\"/>\n",
                      margin + bar_w * b + 1.0, height - margin - h, bar_w - 2.0, h);
        out << buf;
    }
    out << "</svg>\n";
}

// Accuracy heat map for parameter sweeps: rows = offset configurations,
// columns = radii, cell colour scaled over [0, 1].
inline void write_heatmap_svg(const std::vector<std::vector<double>>& cells,
                              const std::vector<std::string>& row_labels,
                              const std::vector<std::string>& col_labels, const std::string& title,
                              const std::string& path) {
    const double cell_size = 46.0, left = 120.0, top = 50.0;
    const double width = left + cell_size * (col_labels.size() + 1);
    const double height = top + cell_size * (row_labels.size() + 1);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write heat map: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    out << "<text x=\"10\" y=\"24\" font-size=\"14\">" << title << "</text>\n";
    char buf[320];
    for (std::size_t r = 0; r < cells.size(); ++r) {
        std::snprintf(buf, sizeof(buf), "<text x=\"8\" y=\"%.2f\" font-size=\"11\">%s</text>\n",
                      top + cell_size * r + cell_size * 0.6, row_labels[r].c_str());
        out << buf;
        for (std::size_t c = 0; c < cells[r].size(); ++c) {
            const double v = std::clamp(cells[r][c], 0.0, 1.0);
            const int shade = static_cast<int>(255.0 * (1.0 - v));
            std::snprintf(buf, sizeof(buf),
                          "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                          "fill=\"rgb(%d,%d,255)\"/>\n<text x=\"%.2f\" y=\"%.2f\" font-size=\"10\" "
                          "fill=\"#333\">%.2f</text>\n",
                          left + cell_size * c, top + cell_size * r, cell_size - 2.0,
                          cell_size - 2.0, shade, shade, left + cell_size * c + 4.0,
                          top + cell_size * r + cell_size * 0.6, v);
            out << buf;
        }
    }
    for (std::size_t c = 0; c < col_labels.size(); ++c) {
        std::snprintf(buf, sizeof(buf), "<text x=\"%.2f\" y=\"%.2f\" font-size=\"11\">%s</text>\n",
                      left + cell_size * c + 4.0, top - 8.0, col_labels[c].c_str());
        out << buf;
    }
    out << "</svg>\n";
}

} // namespace motseg
