// Command-line driver for the segmentation pipeline.
//
//   motseg segment --config c.cfg --input trial.csv --out dir/
//   motseg eval    --segmentation dir/seg.json --gt gt.csv --mode strict|tolerant
//   motseg sweep   --config c.cfg --input trial.csv --gt gt.csv \
//                  --radii 0.1:0.5:0.1 --offsets "[-5,0,5];[0]"
//   motseg render  --input trial.csv --out dir/ [--segmentation seg.json]
//   motseg synth   --fixture fixA --noise 0.05 --seed 3 --out trial.csv

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "motseg/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct ConfigCliOptions {
    std::optional<std::string> config_path;
    std::optional<double> radius;
    std::optional<std::string> offsets;
    std::optional<bool> bundle;
    std::optional<int> bundle_k;
    std::optional<std::uint64_t> seed;
    std::optional<int> stop_window;
    std::optional<double> nu;
    std::optional<int> min_span;
    std::optional<int> merge_distance;
    std::optional<double> band_seconds;
    std::optional<std::string> mirror_map;
    std::optional<bool> symmetry;
    std::optional<int> symmetry_tolerance;
    std::optional<std::string> aliases;
    std::optional<int> threads;
    std::optional<bool> rectify;
    std::optional<double> resample_hz;
    std::optional<double> lowpass_hz;
    std::optional<int> binomial_window;
};

void add_config_flags(CLI::App* cmd, ConfigCliOptions& opt) {
    cmd->add_option("--config", opt.config_path, "configuration file (key = value lines)");
    cmd->add_option("--radius", opt.radius, "generalized search radius R");
    cmd->add_option("--offsets", opt.offsets, "stacking offsets, e.g. \"-5,0,5\"");
    cmd->add_flag("--bundle,!--no-bundle", opt.bundle, "enable feature bundling");
    cmd->add_option("--bundle-k", opt.bundle_k, "neighbours per frame for bundling");
    cmd->add_option("--seed", opt.seed, "seed for the bundling subspace fill");
    cmd->add_option("--stop-window", opt.stop_window, "region growing stop window w");
    cmd->add_option("--nu", opt.nu, "warping path slope bound (slopes in [1/nu, nu])");
    cmd->add_option("--min-span", opt.min_span, "minimum trial frames a warping path must cover");
    cmd->add_option("--merge-distance", opt.merge_distance, "cut merge distance in frames");
    cmd->add_option("--band-seconds", opt.band_seconds, "diagonal band half-width in seconds");
    cmd->add_option("--mirror-map", opt.mirror_map, "mirror map CSV for symmetry analysis");
    cmd->add_flag("--symmetry,!--no-symmetry", opt.symmetry, "enable symmetry refinement");
    cmd->add_option("--symmetry-tolerance", opt.symmetry_tolerance,
                    "cut match tolerance in frames");
    cmd->add_option("--aliases", opt.aliases, "label aliases, e.g. \"step_l:step,step_r:step\"");
    cmd->add_option("--threads", opt.threads, "worker threads (results identical at any count)");
    cmd->add_flag("--rectify", opt.rectify, "rectify the input before anything else");
    cmd->add_option("--resample-hz", opt.resample_hz, "resample the input to this rate");
    cmd->add_option("--lowpass-hz", opt.lowpass_hz, "zero-phase low-pass cutoff");
    cmd->add_option("--binomial-window", opt.binomial_window, "binomial smoothing window");
}

motseg::PipelineConfig resolve_config(const ConfigCliOptions& opt) {
    motseg::PipelineConfig cfg;
    if (opt.config_path) cfg = motseg::load_config(*opt.config_path);
    if (opt.radius) cfg.radius = *opt.radius;
    if (opt.offsets) cfg.offsets = motseg::detail::parse_int_list(*opt.offsets);
    if (opt.bundle) cfg.bundle = *opt.bundle;
    if (opt.bundle_k) cfg.bundle_k = *opt.bundle_k;
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.stop_window) cfg.stop_window = *opt.stop_window;
    if (opt.nu) cfg.nu = *opt.nu;
    if (opt.min_span) cfg.min_span = *opt.min_span;
    if (opt.merge_distance) cfg.merge_distance = *opt.merge_distance;
    if (opt.band_seconds) cfg.band_seconds = *opt.band_seconds;
    if (opt.mirror_map) cfg.mirror_map_path = *opt.mirror_map;
    if (opt.symmetry) cfg.symmetry = *opt.symmetry;
    if (opt.symmetry_tolerance) cfg.symmetry_tolerance = *opt.symmetry_tolerance;
    if (opt.aliases) cfg.aliases = motseg::detail::parse_aliases(*opt.aliases);
    if (opt.threads) cfg.threads = *opt.threads;
    if (opt.rectify) cfg.rectify_input = *opt.rectify;
    if (opt.resample_hz) cfg.resample_hz = *opt.resample_hz;
    if (opt.lowpass_hz) cfg.lowpass_hz = *opt.lowpass_hz;
    if (opt.binomial_window) cfg.binomial_window = *opt.binomial_window;
    cfg.validate();
    return cfg;
}

std::vector<double> parse_radius_range(const std::string& text) {
    // "a:b:step" inclusive, or a comma list
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        const auto c1 = text.find(':');
        const auto c2 = text.find(':', c1 + 1);
        if (c2 == std::string::npos) throw CLI::ValidationError("--radii", "expected a:b:step");
        const double a = std::stod(text.substr(0, c1));
        const double b = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        const double step = std::stod(text.substr(c2 + 1));
        if (!(step > 0.0)) throw CLI::ValidationError("--radii", "step must be positive");
        for (double r = a; r <= b + 1e-12; r += step) out.push_back(r);
    } else {
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    }
    if (out.empty()) throw CLI::ValidationError("--radii", "no radii given");
    return out;
}

std::vector<std::vector<int>> parse_offsets_grid(const std::string& text) {
    std::vector<std::vector<int>> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        std::erase(item, '[');
        std::erase(item, ']');
        item = motseg::detail::trim(item);
        if (item.empty()) continue;
        out.push_back(motseg::detail::parse_int_list(item));
    }
    return out;
}

int run_segment(const ConfigCliOptions& opt, const std::string& input, const std::string& out_dir) {
    const auto cfg = resolve_config(opt);
    motseg::run_pipeline_files(cfg, input, out_dir);
    std::cout << "wrote " << (fs::path(out_dir) / "seg.json").string() << "\n";
    return 0;
}

int run_eval(const std::string& seg_path, const std::string& gt_path, const std::string& mode,
             const std::string& out_path, const std::string& aliases) {
    std::ifstream in(seg_path);
    if (!in) throw std::runtime_error("cannot open segmentation: " + seg_path);
    ordered_json seg = ordered_json::parse(in);

    std::vector<motseg::MotionPrimitive> primitives;
    std::vector<int> cluster_of;
    for (const auto& p : seg.at("primitives")) {
        motseg::MotionPrimitive prim;
        prim.span = {p.at("start").get<int>() - 1, p.at("end").get<int>() - 1};
        prim.activity = p.at("activity").get<int>() - 1;
        primitives.push_back(prim);
        cluster_of.push_back(p.at("cluster").get<int>() - 1);
    }
    const int frames = seg.at("meta").at("frames").get<int>();
    const auto gt = motseg::load_ground_truth(gt_path);
    const auto alias_map = aliases.empty() ? motseg::LabelAliases{}
                                           : motseg::detail::parse_aliases(aliases);

    ordered_json report;
    report["segmentation"] = seg_path;
    report["ground_truth"] = gt_path;
    if (gt.is_interval()) {
        const double strict = motseg::frame_accuracy(primitives, cluster_of, frames, gt,
                                                     motseg::AccuracyMode::strict, alias_map);
        const double tolerant = motseg::frame_accuracy(primitives, cluster_of, frames, gt,
                                                       motseg::AccuracyMode::tolerant, alias_map);
        report["strict_accuracy"] = strict;
        report["tolerant_accuracy"] = tolerant;
        report["accuracy"] = mode == "tolerant" ? tolerant : strict;
        report["mode"] = mode;
        const auto intervals = motseg::interval_overlap(primitives, gt);
        report["boundary_distance"] = {{"mean", intervals.boundary_mean},
                                       {"std", intervals.boundary_std}};
        report["largest_segment_overlap"] = {{"mean", intervals.overlap_mean},
                                             {"std", intervals.overlap_std},
                                             {"annotations", intervals.annotations}};
    } else {
        const auto kp = motseg::keypoint_consistency(primitives, gt);
        report["keypoints"] = {{"mean_relative_position", kp.mean},
                               {"std_relative_position", kp.stddev},
                               {"in_transitions", kp.in_transitions}};
        report["keypoints"]["histogram"] = kp.histogram;
        ordered_json per_class = ordered_json::object();
        for (const auto& [label, sd] : kp.per_class_std) per_class[label] = sd;
        report["keypoints"]["per_class_std"] = per_class;
        if (!out_path.empty()) {
            const auto svg = fs::path(out_path).parent_path() / "keypoint_histogram.svg";
            motseg::write_histogram_svg(
                std::vector<std::size_t>(kp.histogram.begin(), kp.histogram.end()),
                "key point relative positions", svg.string());
        }
    }
    if (out_path.empty()) {
        std::cout << report.dump(2) << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write report: " + out_path);
        out << report.dump(2) << "\n";
        std::cout << "wrote " << out_path << "\n";
    }
    return 0;
}

int run_sweep(const ConfigCliOptions& opt, const std::string& input, const std::string& gt_path,
              const std::string& radii_text, const std::string& offsets_text,
              const std::string& windows_text, const std::string& out_dir, bool heatmap) {
    auto cfg = resolve_config(opt);
    const auto series = motseg::load_timeseries(input);
    const auto gt = motseg::load_ground_truth(gt_path);
    const auto radii = parse_radius_range(radii_text);
    std::vector<std::vector<int>> offset_sets;
    std::vector<int> windows;
    if (!windows_text.empty())
        windows = motseg::detail::parse_int_list(windows_text);
    else
        offset_sets = offsets_text.empty() ? std::vector<std::vector<int>>{cfg.offsets}
                                           : parse_offsets_grid(offsets_text);

    const auto result = motseg::sweep(cfg, series, gt, radii, offset_sets, windows);
    fs::create_directories(out_dir);
    motseg::write_sweep_csv(result, result.strict, (fs::path(out_dir) / "sweep_strict.csv").string());
    motseg::write_sweep_csv(result, result.tolerant,
                            (fs::path(out_dir) / "sweep_tolerant.csv").string());
    if (heatmap) {
        std::vector<std::string> col_labels;
        char buf[32];
        for (double r : result.radii) {
            std::snprintf(buf, sizeof(buf), "%g", r);
            col_labels.push_back(buf);
        }
        motseg::write_heatmap_svg(result.strict, result.row_labels, col_labels,
                                  "strict accuracy", (fs::path(out_dir) / "sweep_strict.svg").string());
        motseg::write_heatmap_svg(result.tolerant, result.row_labels, col_labels,
                                  "tolerant accuracy",
                                  (fs::path(out_dir) / "sweep_tolerant.svg").string());
    }
    std::cout << "wrote " << (fs::path(out_dir) / "sweep_strict.csv").string() << "\n";
    return 0;
}

int run_render(const ConfigCliOptions& opt, const std::string& input, const std::string& out_dir) {
    const auto cfg = resolve_config(opt);
    const auto series = motseg::load_timeseries(input);
    const auto feats = motseg::stack_features(series, cfg.offsets);
    auto nbrs = motseg::compute_neighborhoods(feats, cfg.radius);
    fs::create_directories(out_dir);
    motseg::write_pgm(motseg::sssm_export(nbrs), (fs::path(out_dir) / "sssm.pgm").string());
    motseg::write_pgm(
        motseg::sssm_export(motseg::remove_diagonal_band(nbrs, series.sample_rate * cfg.band_seconds)),
        (fs::path(out_dir) / "sssm_banded.pgm").string());
    std::cout << "wrote " << (fs::path(out_dir) / "sssm.pgm").string() << "\n";
    return 0;
}

int run_synth(const std::string& fixture, double noise, std::uint64_t seed,
              const std::string& out_path, const std::string& gt_path) {
    const auto series = motseg::fixtures::by_name(fixture, noise, seed);
    motseg::save_timeseries(series, out_path);
    std::cout << "wrote " << out_path << " (" << series.frames() << " frames at "
              << series.sample_rate << " fps)\n";
    if (!gt_path.empty()) {
        motseg::save_ground_truth(motseg::fixtures::ground_truth_by_name(fixture), gt_path);
        std::cout << "wrote " << gt_path << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"unsupervised temporal segmentation of motion data"};
    app.require_subcommand(1);

    ConfigCliOptions seg_opt;
    std::string seg_input, seg_out;
    auto* seg_cmd = app.add_subcommand("segment", "segment and cluster a trial");
    add_config_flags(seg_cmd, seg_opt);
    seg_cmd->add_option("--input", seg_input, "trial CSV")->required();
    seg_cmd->add_option("--out", seg_out, "output directory")->required();

    std::string eval_seg, eval_gt, eval_mode = "strict", eval_out, eval_aliases;
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a segmentation against ground truth");
    eval_cmd->add_option("--segmentation", eval_seg, "seg.json from segment")->required();
    eval_cmd->add_option("--gt", eval_gt, "annotation CSV")->required();
    eval_cmd->add_option("--mode", eval_mode, "strict or tolerant")
        ->check(CLI::IsMember({"strict", "tolerant"}));
    eval_cmd->add_option("--out", eval_out, "report JSON path (default: stdout)");
    eval_cmd->add_option("--aliases", eval_aliases, "label aliases, e.g. \"step_l:step\"");

    ConfigCliOptions sweep_opt;
    std::string sweep_input, sweep_gt, sweep_radii, sweep_offsets, sweep_windows, sweep_out;
    bool sweep_heatmap = false;
    auto* sweep_cmd = app.add_subcommand("sweep", "accuracy map over a parameter grid");
    add_config_flags(sweep_cmd, sweep_opt);
    sweep_cmd->add_option("--input", sweep_input, "trial CSV")->required();
    sweep_cmd->add_option("--gt", sweep_gt, "annotation CSV")->required();
    sweep_cmd->add_option("--radii", sweep_radii, "a:b:step or comma list")->required();
    sweep_cmd->add_option("--offsets-grid", sweep_offsets,
                          "semicolon-separated offset lists, e.g. \"[-5,0,5];[0]\"");
    sweep_cmd->add_option("--stop-windows", sweep_windows,
                          "sweep the stop window instead of offsets, e.g. \"2,4,8,16\"");
    sweep_cmd->add_option("--out", sweep_out, "output directory")->required();
    sweep_cmd->add_flag("--heatmap", sweep_heatmap, "write SVG heat maps too");

    ConfigCliOptions render_opt;
    std::string render_input, render_out;
    auto* render_cmd = app.add_subcommand("render", "write SSSM images for a trial");
    add_config_flags(render_cmd, render_opt);
    render_cmd->add_option("--input", render_input, "trial CSV")->required();
    render_cmd->add_option("--out", render_out, "output directory")->required();

    std::string synth_fixture, synth_out, synth_gt;
    double synth_noise = 0.0;
    std::uint64_t synth_seed = 1;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic fixture trial");
    synth_cmd->add_option("--fixture", synth_fixture, "fixA, fixB, gait, gait_symmetric, gait_asymmetric, aba")
        ->required()
        ->check(CLI::IsMember({"fixA", "fixB", "gait", "gait_symmetric", "gait_asymmetric", "aba"}));
    synth_cmd->add_option("--noise", synth_noise, "additive Gaussian noise sigma");
    synth_cmd->add_option("--seed", synth_seed, "noise seed");
    synth_cmd->add_option("--out", synth_out, "output trial CSV")->required();
    synth_cmd->add_option("--gt", synth_gt, "also write ground truth CSV (fixB, aba)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (seg_cmd->parsed()) return run_segment(seg_opt, seg_input, seg_out);
        if (eval_cmd->parsed()) return run_eval(eval_seg, eval_gt, eval_mode, eval_out, eval_aliases);
        if (sweep_cmd->parsed())
            return run_sweep(sweep_opt, sweep_input, sweep_gt, sweep_radii, sweep_offsets,
                             sweep_windows, sweep_out, sweep_heatmap);
        if (render_cmd->parsed()) return run_render(render_opt, render_input, render_out);
        if (synth_cmd->parsed())
            return run_synth(synth_fixture, synth_noise, synth_seed, synth_out, synth_gt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
