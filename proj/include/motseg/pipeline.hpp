#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "motseg/activity.hpp"
#include "motseg/clustering.hpp"
#include "motseg/csv.hpp"
#include "motseg/evaluation.hpp"
#include "motseg/features.hpp"
#include "motseg/fixtures.hpp"
#include "motseg/neighborhood.hpp"
#include "motseg/preprocess.hpp"
#include "motseg/primitives.hpp"
#include "motseg/render.hpp"
#include "motseg/symmetry.hpp"

// Pipeline orchestration: a validated flat configuration, the end-to-end
// segment/cluster run, JSON serialization (1-based frames on disk), and the
// accuracy sweep over parameter grids.

namespace motseg {

struct PipelineConfig {
    double radius = 0.25;             // generalized search radius R
    std::vector<int> offsets = {-5, 0, 5};
    bool bundle = false;
    int bundle_k = 64;
    std::uint64_t seed = 1;
    int stop_window = 8;
    double nu = 2.0;
    int min_span = 5;
    int merge_distance = 5;
    double band_seconds = 1.0;
    std::string mirror_map_path;
    bool symmetry = false;
    int symmetry_tolerance = 5;
    LabelAliases aliases;
    int threads = 1;

    // optional input preprocessing, applied in this order
    bool rectify_input = false;
    double resample_hz = 0.0;  // 0 = keep input rate
    double lowpass_hz = 0.0;   // 0 = off
    int binomial_window = 0;   // 0 = off

    void validate() const {
        if (!(radius > 0.0)) throw std::invalid_argument("config: radius must be positive");
        if (offsets.empty()) throw std::invalid_argument("config: offsets must not be empty");
        if (std::find(offsets.begin(), offsets.end(), 0) == offsets.end())
            throw std::invalid_argument("config: offsets must contain 0");
        if (bundle_k < 2) throw std::invalid_argument("config: bundle_k must be >= 2");
        if (stop_window < 1) throw std::invalid_argument("config: stop_window must be >= 1");
        if (!(nu > 1.0)) throw std::invalid_argument("config: nu must be > 1");
        if (min_span < 1) throw std::invalid_argument("config: min_span must be >= 1");
        if (merge_distance < 0) throw std::invalid_argument("config: merge_distance must be >= 0");
        if (!(band_seconds > 0.0)) throw std::invalid_argument("config: band_seconds must be positive");
        if (symmetry_tolerance < 0)
            throw std::invalid_argument("config: symmetry_tolerance must be >= 0");
        if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
        if (resample_hz < 0.0) throw std::invalid_argument("config: resample_hz must be >= 0");
        if (lowpass_hz < 0.0) throw std::invalid_argument("config: lowpass_hz must be >= 0");
        if (binomial_window != 0 && binomial_window < 2)
            throw std::invalid_argument("config: binomial_window must be 0 or >= 2");
    }

    PrimitiveParams primitive_params() const { return {min_span, nu, merge_distance}; }
};

namespace detail {

inline std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = motseg::detail::trim(item);
        if (item.empty()) continue;
        out.push_back(std::stoi(item));
    }
    return out;
}

inline LabelAliases parse_aliases(const std::string& text) {
    LabelAliases out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = motseg::detail::trim(item);
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("config: alias entries must be 'label:canonical'");
        out[motseg::detail::trim(item.substr(0, colon))] =
            motseg::detail::trim(item.substr(colon + 1));
    }
    return out;
}

} // namespace detail

// Flat "key = value" configuration file; '#' starts a comment.
inline PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    PipelineConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = motseg::detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ": expected 'key = value' at line " +
                                     std::to_string(lineno));
        const std::string key = motseg::detail::trim(line.substr(0, eq));
        const std::string value = motseg::detail::trim(line.substr(eq + 1));
        auto as_bool = [&] {
            if (value == "true" || value == "1") return true;
            if (value == "false" || value == "0") return false;
            throw std::runtime_error(path + ": boolean expected for " + key);
        };
        if (key == "radius") cfg.radius = std::stod(value);
        else if (key == "offsets") cfg.offsets = detail::parse_int_list(value);
        else if (key == "bundle") cfg.bundle = as_bool();
        else if (key == "bundle_k") cfg.bundle_k = std::stoi(value);
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
        else if (key == "stop_window") cfg.stop_window = std::stoi(value);
        else if (key == "nu") cfg.nu = std::stod(value);
        else if (key == "min_span") cfg.min_span = std::stoi(value);
        else if (key == "merge_distance") cfg.merge_distance = std::stoi(value);
        else if (key == "band_seconds") cfg.band_seconds = std::stod(value);
        else if (key == "mirror_map") cfg.mirror_map_path = value;
        else if (key == "symmetry") cfg.symmetry = as_bool();
        else if (key == "symmetry_tolerance") cfg.symmetry_tolerance = std::stoi(value);
        else if (key == "aliases") cfg.aliases = detail::parse_aliases(value);
        else if (key == "threads") cfg.threads = std::stoi(value);
        else if (key == "rectify") cfg.rectify_input = as_bool();
        else if (key == "resample_hz") cfg.resample_hz = std::stod(value);
        else if (key == "lowpass_hz") cfg.lowpass_hz = std::stod(value);
        else if (key == "binomial_window") cfg.binomial_window = std::stoi(value);
        else throw std::runtime_error(path + ": unknown key '" + key + "'");
    }
    return cfg;
}

struct RunStats {
    KdTreeStats kdtree;
    RegionGrowStats region_grow;
    GraphStats primitive_graph;
    GraphStats cluster_graph;
    BundleStats bundling;
};

struct RunResult {
    TimeSeries series;              // after preprocessing
    FeatureSequence features;       // stacked, bundled when configured
    Neighborhoods banded;           // diagonal band removed
    double effective_radius = 0.0;
    ActivitySegmentation segmentation;
    std::vector<MotionPrimitive> primitives;
    std::vector<SymmetryReport> symmetry;   // one per activity when enabled
    ClusterGraph clusters;
    std::vector<std::optional<double>> cluster_variance;  // per cluster
    RunStats stats;
};

inline TimeSeries apply_preprocessing(TimeSeries series, const PipelineConfig& cfg) {
    if (cfg.rectify_input) series = rectify(series);
    if (cfg.resample_hz > 0.0) series = resample(series, cfg.resample_hz);
    if (cfg.lowpass_hz > 0.0) series = lowpass(series, cfg.lowpass_hz);
    if (cfg.binomial_window >= 2) series = binomial_filter(series, cfg.binomial_window);
    return series;
}

inline RunResult run_pipeline(const PipelineConfig& cfg, TimeSeries input,
                              const MirrorMap* mirror_map = nullptr) {
    cfg.validate();
    RunResult run;
    run.series = apply_preprocessing(std::move(input), cfg);
    run.series.validate();

    run.features = stack_features(run.series, cfg.offsets);
    if (cfg.bundle)
        run.features = bundle_features(run.features, static_cast<std::size_t>(cfg.bundle_k),
                                       cfg.seed, cfg.threads, &run.stats.bundling);

    auto nbrs = compute_neighborhoods(run.features, cfg.radius, &run.stats.kdtree);
    run.effective_radius = nbrs.radius_used;
    const double band_rate = run.series.sample_rate * cfg.band_seconds;
    run.banded = remove_diagonal_band(nbrs, band_rate);

    run.segmentation =
        segment_activities(run.banded, cfg.stop_window, band_rate, &run.stats.region_grow);

    const PrimitiveParams params = cfg.primitive_params();
    std::vector<PrimitiveExtraction> extractions;
    extractions.reserve(run.segmentation.activities.size());
    for (std::size_t a = 0; a < run.segmentation.activities.size(); ++a)
        extractions.push_back(extract_primitives(run.banded, run.segmentation.activities[a],
                                                 static_cast<int>(a), params,
                                                 &run.stats.primitive_graph));

    std::optional<MirrorMap> loaded_map;
    if (cfg.symmetry && !mirror_map) {
        if (cfg.mirror_map_path.empty())
            throw std::invalid_argument("config: symmetry requires a mirror_map");
        loaded_map = load_mirror_map(cfg.mirror_map_path, run.series.channel_names);
        mirror_map = &*loaded_map;
    }

    if (cfg.symmetry && mirror_map) {
        const FeatureSequence mirrored = mirror_stacked(run.features, *mirror_map);
        auto cross = cross_neighborhoods(run.features, mirrored, cfg.radius, &run.stats.kdtree);
        const Neighborhoods cross_banded = remove_diagonal_band_cross(cross, band_rate);
        for (std::size_t a = 0; a < run.segmentation.activities.size(); ++a) {
            const Interval activity = run.segmentation.activities[a];
            const auto mirrored_cuts = mirrored_cut_candidates(cross_banded, activity, params,
                                                               &run.stats.primitive_graph);
            auto report = classify_symmetry(activity, extractions[a].cuts, mirrored_cuts,
                                            cfg.symmetry_tolerance, cfg.merge_distance);
            extractions[a].primitives =
                cuts_to_primitives(activity, report.merged_cuts, static_cast<int>(a));
            run.symmetry.push_back(std::move(report));
        }
    }

    for (const auto& ex : extractions)
        for (const auto& p : ex.primitives) run.primitives.push_back(p);

    run.clusters = build_clusters(run.primitives, run.banded, params, cfg.threads,
                                  &run.stats.cluster_graph);

    run.cluster_variance.reserve(run.clusters.clusters.size());
    for (const auto& cluster : run.clusters.clusters) {
        std::vector<Interval> segments;
        segments.reserve(cluster.size());
        for (int p : cluster) segments.push_back(run.primitives[static_cast<std::size_t>(p)].span);
        run.cluster_variance.push_back(intra_cluster_variance(segments, run.features));
    }
    return run;
}

// --- JSON serialization (frames 1-based inclusive on disk) ------------------

using ordered_json = nlohmann::ordered_json;

inline ordered_json interval_to_json(Interval iv) {
    return ordered_json{{"start", iv.start + 1}, {"end", iv.end + 1}};
}

inline ordered_json result_to_json(const RunResult& run, const PipelineConfig& cfg,
                                   const std::string& input_name) {
    ordered_json j;
    j["meta"] = {
        {"input", input_name},
        {"frames", run.series.frames()},
        {"rate", run.series.sample_rate},
        {"channels", run.series.channels()},
        {"radius", cfg.radius},
        {"effective_radius", run.effective_radius},
        {"offsets", cfg.offsets},
        {"bundle", cfg.bundle},
        {"bundle_k", cfg.bundle_k},
        {"seed", cfg.seed},
        {"stop_window", cfg.stop_window},
        {"nu", cfg.nu},
        {"min_span", cfg.min_span},
        {"merge_distance", cfg.merge_distance},
        {"band_seconds", cfg.band_seconds},
        {"symmetry", cfg.symmetry},
        {"max_neighbors", run.banded.max_set_size()},
        {"neighbor_entries", run.banded.total_entries()},
    };
    j["activities"] = ordered_json::array();
    for (std::size_t a = 0; a < run.segmentation.activities.size(); ++a) {
        auto item = interval_to_json(run.segmentation.activities[a]);
        item["id"] = a + 1;
        j["activities"].push_back(std::move(item));
    }
    j["transitions"] = ordered_json::array();
    for (const auto& t : run.segmentation.transitions)
        j["transitions"].push_back(interval_to_json(t));
    j["primitives"] = ordered_json::array();
    for (std::size_t p = 0; p < run.primitives.size(); ++p) {
        const auto& prim = run.primitives[p];
        auto item = interval_to_json(prim.span);
        item["id"] = p + 1;
        item["activity"] = prim.activity + 1;
        item["source"] = prim.whole_activity ? "whole-activity" : "path-derived";
        item["cluster"] = run.clusters.cluster_of[p] + 1;
        j["primitives"].push_back(std::move(item));
    }
    j["clusters"] = ordered_json::array();
    for (std::size_t c = 0; c < run.clusters.clusters.size(); ++c) {
        ordered_json item;
        item["id"] = c + 1;
        item["primitives"] = ordered_json::array();
        for (int p : run.clusters.clusters[c]) item["primitives"].push_back(p + 1);
        if (run.cluster_variance[c])
            item["intra_variance"] = *run.cluster_variance[c];
        else
            item["intra_variance"] = nullptr;
        j["clusters"].push_back(std::move(item));
    }
    j["cluster_edges"] = ordered_json::array();
    for (const auto& e : run.clusters.edges)
        j["cluster_edges"].push_back({{"a", e.a + 1}, {"b", e.b + 1}, {"cost", e.cost}});
    j["symmetry"] = ordered_json::array();
    for (const auto& report : run.symmetry) {
        ordered_json item;
        item["activity"] = interval_to_json(report.activity);
        item["kind"] = to_string(report.kind);
        auto cuts = [](const std::vector<int>& v) {
            ordered_json arr = ordered_json::array();
            for (int c : v) arr.push_back(c + 1);
            return arr;
        };
        item["original_cuts"] = cuts(report.original_cuts);
        item["mirrored_cuts"] = cuts(report.mirrored_cuts);
        item["merged_cuts"] = cuts(report.merged_cuts);
        j["symmetry"].push_back(std::move(item));
    }
    return j;
}

// Runs the pipeline on a file and writes seg.json, sssm.pgm and timeline.svg
// into the output directory.
inline RunResult run_pipeline_files(const PipelineConfig& cfg, const std::string& input_path,
                                    const std::string& out_dir) {
    const TimeSeries series = load_timeseries(input_path);
    RunResult run = run_pipeline(cfg, series);

    std::filesystem::create_directories(out_dir);
    const auto dir = std::filesystem::path(out_dir);
    {
        std::ofstream out(dir / "seg.json");
        if (!out) throw std::runtime_error("cannot write seg.json");
        out << result_to_json(run, cfg, std::filesystem::path(input_path).filename().string()).dump(2)
            << "\n";
    }
    write_pgm(sssm_export(run.banded), (dir / "sssm.pgm").string());
    write_timeline_svg(run.segmentation, run.primitives, run.clusters.cluster_of,
                       static_cast<int>(run.clusters.clusters.size()),
                       (dir / "timeline.svg").string());
    return run;
}

// --- parameter sweep ---------------------------------------------------------

struct SweepResult {
    std::vector<double> radii;
    std::vector<std::string> row_labels;           // offset lists or stop windows
    std::vector<std::vector<double>> strict;       // rows x radii
    std::vector<std::vector<double>> tolerant;
};

inline std::pair<double, double> run_accuracy(const PipelineConfig& cfg, const TimeSeries& series,
                                              const GroundTruth& gt) {
    const RunResult run = run_pipeline(cfg, series);
    const double strict = frame_accuracy(run.primitives, run.clusters.cluster_of,
                                         static_cast<int>(run.series.frames()), gt,
                                         AccuracyMode::strict, cfg.aliases);
    const double tolerant = frame_accuracy(run.primitives, run.clusters.cluster_of,
                                           static_cast<int>(run.series.frames()), gt,
                                           AccuracyMode::tolerant, cfg.aliases);
    return {strict, tolerant};
}

// Strict and tolerant accuracy over a radius x offsets grid (or radius x
// stop-window grid when `stop_windows` is non-empty).
inline SweepResult sweep(const PipelineConfig& base, const TimeSeries& series,
                         const GroundTruth& gt, const std::vector<double>& radii,
                         const std::vector<std::vector<int>>& offset_sets,
                         const std::vector<int>& stop_windows = {}) {
    SweepResult result;
    result.radii = radii;
    const bool by_window = !stop_windows.empty();
    const std::size_t rows = by_window ? stop_windows.size() : offset_sets.size();
    for (std::size_t r = 0; r < rows; ++r) {
        PipelineConfig cfg = base;
        std::string label;
        if (by_window) {
            cfg.stop_window = stop_windows[r];
            label = "w=" + std::to_string(stop_windows[r]);
        } else {
            cfg.offsets = offset_sets[r];
            label = "[";
            for (std::size_t o = 0; o < cfg.offsets.size(); ++o)
                label += (o ? " " : "") + std::to_string(cfg.offsets[o]);
            label += "]";
        }
        result.row_labels.push_back(label);
        result.strict.emplace_back();
        result.tolerant.emplace_back();
        for (double radius : radii) {
            cfg.radius = radius;
            const auto [strict, tolerant] = run_accuracy(cfg, series, gt);
            result.strict.back().push_back(strict);
            result.tolerant.back().push_back(tolerant);
        }
    }
    return result;
}

inline void write_sweep_csv(const SweepResult& result, const std::vector<std::vector<double>>& cells,
                            const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write sweep csv: " + path);
    out << "row";
    char buf[64];
    for (double r : result.radii) {
        std::snprintf(buf, sizeof(buf), ",%g", r);
        out << buf;
    }
    out << "\n";
    for (std::size_t row = 0; row < cells.size(); ++row) {
        out << result.row_labels[row];
        for (double v : cells[row]) {
            std::snprintf(buf, sizeof(buf), ",%.6f", v);
            out << buf;
        }
        out << "\n";
    }
}

} // namespace motseg
