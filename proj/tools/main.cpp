// crossinject command-line front end.
//
//   crossinject synthesize --normal-dir D --manifest M --out O [options]
//   crossinject replay     --normal-dir D --manifest M --out O --meta O/meta.jsonl --line N [options]
//
// Exit codes: 0 success, 1 some targets failed, 2 fatal configuration or I/O error.

#include "crossinject/image_io.hpp"
#include "crossinject/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace ci = crossinject;

namespace {

constexpr int kExitFatal = 2;

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, sep);)
        if (!item.empty()) out.push_back(item);
    return out;
}

struct RawOptions {
    std::string normal_dir, manifest, out;
    std::uint64_t seed = 0;
    std::string counts = "4,3,3";
    std::string mode = "normal";
    std::string target_size = "256x256";
    double threshold = 25.0 / 255.0;
    std::size_t min_component_area = 5;
    std::string exclude_sources;
    std::string class_filter;
    int workers = 1;
    int max_attempts = 500;
    std::string matting = "allones";
    double border_tolerance = 0.08;
    std::size_t border_min_area = 64;
};

void add_common(CLI::App* app, RawOptions& o)
{
    app->add_option("--normal-dir", o.normal_dir, "Directory of normal target images")->required();
    app->add_option("--manifest", o.manifest, "JSON-lines anomaly manifest")->required();
    app->add_option("--out", o.out, "Output directory")->required();
    app->add_option("--seed", o.seed, "Master seed");
    app->add_option("--counts", o.counts, "Large,medium,small pseudo anomalies per target");
    app->add_option("--mode", o.mode, "Poisson guidance: normal or mixed");
    app->add_option("--target-size", o.target_size, "Working size HxW");
    app->add_option("--threshold", o.threshold, "Difference threshold for the ground-truth mask");
    app->add_option("--min-component-area", o.min_component_area, "Smallest kept mask component (px)");
    app->add_option("--exclude-sources", o.exclude_sources, "Comma-separated source tags to leave out");
    app->add_option("--class-filter", o.class_filter, "Comma-separated anomaly classes to sample from");
    app->add_option("--workers", o.workers, "Parallel workers");
    app->add_option("--max-attempts", o.max_attempts, "Attempt cap per target");
    app->add_option("--matting", o.matting, "allones | border | external:TEMPLATE ({id} = target stem)");
    app->add_option("--border-tolerance", o.border_tolerance, "Border heuristic color tolerance (L-inf)");
    app->add_option("--border-min-area", o.border_min_area, "Border heuristic smallest foreground component");
}

ci::PipelineConfig to_config(const RawOptions& o)
{
    ci::PipelineConfig cfg;
    cfg.normal_dir = o.normal_dir;
    cfg.manifest_path = o.manifest;
    cfg.out_dir = o.out;
    cfg.seed = o.seed;

    const auto counts = split(o.counts, ',');
    if (counts.size() != 3) throw ci::Error("--counts expects L,M,S");
    cfg.counts = {std::stoi(counts[0]), std::stoi(counts[1]), std::stoi(counts[2])};

    const auto mode = ci::parse_pe_mode(o.mode);
    if (!mode) throw ci::Error("--mode must be normal or mixed");
    cfg.mode = *mode;

    const auto size = split(o.target_size, 'x');
    if (size.size() != 2) throw ci::Error("--target-size expects HxW");
    cfg.target_height = std::stoi(size[0]);
    cfg.target_width = std::stoi(size[1]);

    cfg.mask.threshold = o.threshold;
    cfg.mask.min_component_area = o.min_component_area;
    for (const auto& s : split(o.exclude_sources, ',')) cfg.excluded_sources.insert(s);
    if (!o.class_filter.empty()) {
        std::set<ci::AnomalyClass> filter;
        for (const auto& name : split(o.class_filter, ',')) {
            const auto cls = ci::parse_anomaly_class(name);
            if (!cls) throw ci::Error("unknown anomaly class '" + name + "'");
            filter.insert(*cls);
        }
        cfg.class_filter = filter;
    }
    cfg.workers = o.workers;
    cfg.max_attempts = o.max_attempts;

    if (o.matting == "allones") {
        cfg.matting.kind = ci::MattingKind::AllOnes;
    } else if (o.matting == "border") {
        cfg.matting.kind = ci::MattingKind::Border;
    } else if (o.matting.rfind("external:", 0) == 0) {
        cfg.matting.kind = ci::MattingKind::External;
        cfg.matting.external_template = o.matting.substr(9);
    } else {
        throw ci::Error("--matting must be allones, border or external:TEMPLATE");
    }
    cfg.matting.border.tolerance = o.border_tolerance;
    cfg.matting.border.min_area = o.border_min_area;
    cfg.validate();
    return cfg;
}

int run_synthesize(const RawOptions& o)
{
    const ci::PipelineConfig cfg = to_config(o);
    const ci::RunReport report = ci::run_batch(cfg);
    for (const auto& t : report.targets)
        if (!t.ok) std::cerr << "warning: target " << t.id << " failed: " << t.error << '\n';
    std::cout << report.total_syntheses << " pseudo anomalies from " << report.targets.size() << " targets ("
              << report.failed_targets << " failed), " << report.mean_time_per_synthesis_s
              << " s per synthesis\n";
    return report.exit_code();
}

int run_replay(const RawOptions& o, const std::string& meta_path, std::size_t line)
{
    const ci::PipelineConfig cfg = to_config(o);
    std::ifstream in(meta_path);
    if (!in) throw ci::Error("cannot read " + meta_path);
    std::string text;
    for (std::size_t n = 0; n < line && std::getline(in, text); ++n) {}
    if (text.empty()) throw ci::Error("metadata line " + std::to_string(line) + " not found");
    const ci::SynthesisMeta meta = ci::meta_from_json(nlohmann::json::parse(text));

    const auto images = ci::list_normal_images(cfg.normal_dir);
    if (meta.target_index >= images.size()) throw ci::Error("target index outside the normal directory");
    const ci::ManifestIndex index = ci::load_manifest(cfg.manifest_path, cfg.excluded_sources);
    const ci::PreparedTarget target = ci::prepare_target(images[meta.target_index], cfg);
    const ci::SynthesisResult r = ci::replay_synthesis(meta, target, index, cfg);

    std::filesystem::create_directories(cfg.out_dir);
    const std::string name = "replay_" + meta.target_id + "_" + std::to_string(meta.output_index) + ".png";
    ci::write_png(cfg.out_dir / ("image_" + name), r.image);
    ci::write_mask_png(cfg.out_dir / ("mask_" + name), r.mask);
    std::cout << "replayed " << meta.target_id << " #" << meta.output_index << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cross-domain anomaly injection: synthesize pseudo-anomaly images with masks"};
    app.require_subcommand(1);

    RawOptions synth_opts;
    CLI::App* synth = app.add_subcommand("synthesize", "Synthesize pseudo anomalies for a directory of normal images");
    add_common(synth, synth_opts);

    RawOptions replay_opts;
    std::string meta_path;
    std::size_t meta_line = 1;
    CLI::App* replay = app.add_subcommand("replay", "Re-run one synthesis from its metadata record");
    add_common(replay, replay_opts);
    replay->add_option("--meta", meta_path, "meta.jsonl of an earlier run")->required();
    replay->add_option("--line", meta_line, "1-based line of the record to replay");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitFatal;
    }

    try {
        if (*synth) return run_synthesize(synth_opts);
        return run_replay(replay_opts, meta_path, meta_line);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFatal;
    }
}
