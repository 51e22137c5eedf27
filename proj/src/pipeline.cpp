#include "crossinject/pipeline.hpp"

#include "crossinject/image_io.hpp"
#include "crossinject/placement.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <fstream>
#include <thread>

namespace crossinject {

namespace fs = std::filesystem;

void PipelineConfig::validate() const
{
    if (counts.large < 0 || counts.medium < 0 || counts.small < 0) throw Error("counts must be non-negative");
    if (counts.total() < 1) throw Error("counts must request at least one synthesis");
    if (target_height < 32 || target_width < 32) throw Error("target size sides must be at least 32 px");
    if (!(mask.threshold > 0.0 && mask.threshold < 1.0)) throw Error("threshold must lie in (0, 1)");
    if (max_attempts < 1) throw Error("max_attempts must be positive");
    if (workers < 1) throw Error("workers must be positive");
    if (matting.kind == MattingKind::External && matting.external_template.empty())
        throw Error("external matting needs a path template");
    if (class_filter && class_filter->empty()) throw Error("class filter is empty");
}

nlohmann::json to_json(const SynthesisMeta& meta)
{
    return {
        {"target_id", meta.target_id},
        {"output_index", meta.output_index},
        {"source_anomaly_id", meta.source_anomaly_id},
        {"anomaly_class", std::string(to_string(meta.anomaly_class))},
        {"R", meta.str},
        {"R_prime", meta.synthesis_str},
        {"scale_class", std::string(to_string(meta.scale))},
        {"l_c", {meta.center.row, meta.center.col}},
        {"mode", std::string(to_string(meta.mode))},
        {"attempt_index", meta.attempt_index},
        {"seed_path", {meta.seed, meta.target_index, meta.attempt_index}},
    };
}

SynthesisMeta meta_from_json(const nlohmann::json& j)
{
    SynthesisMeta m;
    try {
        m.target_id = j.at("target_id").get<std::string>();
        m.output_index = j.at("output_index").get<std::size_t>();
        m.source_anomaly_id = j.at("source_anomaly_id").get<std::string>();
        const auto cls = parse_anomaly_class(j.at("anomaly_class").get<std::string>());
        const auto scale = parse_scale_class(j.at("scale_class").get<std::string>());
        const auto mode = parse_pe_mode(j.at("mode").get<std::string>());
        if (!cls || !scale || !mode) throw Error("metadata has an unknown enumeration value");
        m.anomaly_class = *cls;
        m.scale = *scale;
        m.mode = *mode;
        m.str = j.at("R").get<double>();
        m.synthesis_str = j.at("R_prime").get<double>();
        m.center = {j.at("l_c").at(0).get<int>(), j.at("l_c").at(1).get<int>()};
        m.attempt_index = j.at("attempt_index").get<int>();
        const auto& path = j.at("seed_path");
        m.seed = path.at(0).get<std::uint64_t>();
        m.target_index = path.at(1).get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed metadata record: ") + e.what());
    }
    return m;
}

PreparedTarget prepare_target(const fs::path& image_path, const PipelineConfig& cfg)
{
    PreparedTarget t;
    t.id = image_path.stem().string();
    const Image original = read_image(image_path);
    t.image = resize_image_to(original, cfg.target_height, cfg.target_width);
    switch (cfg.matting.kind) {
    case MattingKind::AllOnes:
        t.foreground = foreground_mask(t.image, AllOnesMatting{});
        break;
    case MattingKind::Border:
        t.foreground = foreground_mask(t.image, cfg.matting.border);
        break;
    case MattingKind::External: {
        std::string path = cfg.matting.external_template;
        for (std::size_t pos; (pos = path.find("{id}")) != std::string::npos;) path.replace(pos, 4, t.id);
        const BinaryMask fg = foreground_mask(original, ExternalMaskMatting{path});
        t.foreground = resize_mask_to(fg, cfg.target_height, cfg.target_width);
        break;
    }
    }
    return t;
}

QuotaLoopStats fill_quota(ScaleCounts counts, int max_attempts,
                          const std::function<void(int attempt, Quota& trial)>& attempt)
{
    Quota quota(counts);
    QuotaLoopStats stats;
    int n = 0;
    for (; n < max_attempts && !quota.satisfied(); ++n) {
        Quota trial = quota;
        try {
            attempt(n, trial);
            quota = trial;
        } catch (const Rejected& r) {
            ++stats.rejects[std::string(to_string(r.reason()))];
        }
    }
    stats.attempts = n;
    stats.filled = quota.filled();
    stats.complete = quota.satisfied();
    return stats;
}

namespace {

// One attempt of the injection loop. With `forced_scale` the quota is
// bypassed and R' is drawn from that class (metadata replay).
SynthesisResult run_attempt(const PreparedTarget& target, std::uint64_t target_index, int attempt,
                            const ManifestIndex& index, const PipelineConfig& cfg, Quota* trial,
                            std::optional<ScaleClass> forced_scale)
{
    Rng rng = Rng::child(cfg.seed, target_index, static_cast<std::uint64_t>(attempt));
    const AnomalyRecord& rec = sample_record(index, cfg.class_filter, rng);

    Image source;
    BinaryMask source_mask;
    try {
        source = read_image(rec.image_path);
        source_mask = read_mask(rec.mask_path);
    } catch (const Error& e) {
        throw Rejected(RejectReason::SourceUnreadable, rec.id + ": " + e.what());
    }
    if (source.height() != source_mask.height() || source.width() != source_mask.width() || !source_mask.any())
        throw Rejected(RejectReason::SourceUnreadable, rec.id + ": image/mask pair no longer valid");

    ScalePlan plan;
    const double str = compute_str(source_mask, target.foreground);
    if (forced_scale) {
        plan.str = str;
        plan.scale = *forced_scale;
        plan.synthesis_str = draw_synthesis_str(*forced_scale, rng);
        plan.ratio = plan.synthesis_str / str;
    } else {
        const auto selected = select_synthesis_str(str, *trial, rng);
        if (!selected) {
            if (classify_scale(str) == ScaleClass::Trivial)
                throw Rejected(RejectReason::TrivialPattern, rec.id + ": trivial pattern");
            throw Rejected(RejectReason::QuotaFull, rec.id + ": no assignable scale left");
        }
        plan = *selected;
    }

    const ResizedPattern pattern = resize_for_injection(source, source_mask, plan);
    const auto candidates = candidate_locations(target.foreground, pattern.box.height, pattern.box.width);
    const Location center = sample_location(candidates, rng);
    const Placement placement =
        materialize_placement(pattern.mask, center, target.image.height(), target.image.width());

    // Source pixels covering the pattern box plus a one-pixel halo, so that
    // gradients across the pattern edge come from the source image.
    const BBox& pb = pattern.box;
    BBox halo;
    halo.top = std::max(pb.top - 1, 0);
    halo.left = std::max(pb.left - 1, 0);
    halo.height = std::min(pb.bottom() + 1, pattern.image.height() - 1) - halo.top + 1;
    halo.width = std::min(pb.right() + 1, pattern.image.width() - 1) - halo.left + 1;
    SourcePatch patch;
    patch.pixels = crop(pattern.image, halo);
    patch.row_offset = placement.box.top - pb.top + halo.top;
    patch.col_offset = placement.box.left - pb.left + halo.left;

    SynthesisResult result;
    try {
        result.image = inject(target.image, target.foreground, placement, patch, cfg.mode, cfg.solver);
    } catch (const SolverError& e) {
        throw Rejected(RejectReason::SolverFailed, e.what());
    }
    result.region = mask_and(placement.omega, target.foreground);
    result.mask = derive_mask(result.image, target.image, result.region, cfg.mask);

    SynthesisMeta& m = result.meta;
    m.target_id = target.id;
    m.source_anomaly_id = rec.id;
    m.anomaly_class = rec.anomaly_class;
    m.str = plan.str;
    m.synthesis_str = plan.synthesis_str;
    m.scale = plan.scale;
    m.center = center;
    m.mode = cfg.mode;
    m.attempt_index = attempt;
    m.seed = cfg.seed;
    m.target_index = target_index;
    return result;
}

std::string describe(const QuotaLoopStats& s)
{
    std::string out = "filled (" + std::to_string(s.filled.large) + "," + std::to_string(s.filled.medium) + "," +
                      std::to_string(s.filled.small) + ") after " + std::to_string(s.attempts) + " attempts; rejects:";
    for (const auto& [reason, n] : s.rejects) out += " " + reason + "=" + std::to_string(n);
    return out;
}

}  // namespace

std::vector<SynthesisResult> synthesize_for_target(const PreparedTarget& target, std::uint64_t target_index,
                                                   const ManifestIndex& index, const PipelineConfig& cfg,
                                                   QuotaLoopStats* stats)
{
    std::vector<SynthesisResult> results;
    const QuotaLoopStats loop = fill_quota(cfg.counts, cfg.max_attempts, [&](int attempt, Quota& trial) {
        SynthesisResult r = run_attempt(target, target_index, attempt, index, cfg, &trial, std::nullopt);
        r.meta.output_index = results.size();
        results.push_back(std::move(r));
    });
    if (stats) *stats = loop;
    if (!loop.complete) throw Error("target " + target.id + ": attempt cap reached, " + describe(loop));
    return results;
}

SynthesisResult replay_synthesis(const SynthesisMeta& meta, const PreparedTarget& target,
                                 const ManifestIndex& index, const PipelineConfig& cfg)
{
    PipelineConfig replay_cfg = cfg;
    replay_cfg.seed = meta.seed;
    replay_cfg.mode = meta.mode;
    SynthesisResult r =
        run_attempt(target, meta.target_index, meta.attempt_index, index, replay_cfg, nullptr, meta.scale);
    if (r.meta.source_anomaly_id != meta.source_anomaly_id || r.meta.synthesis_str != meta.synthesis_str ||
        !(r.meta.center == meta.center))
        throw Error("replay diverged from the recorded synthesis (manifest or config differ)");
    r.meta.output_index = meta.output_index;
    return r;
}

nlohmann::json to_json(const RunReport& report)
{
    nlohmann::json targets = nlohmann::json::array();
    for (const auto& t : report.targets) {
        nlohmann::json rejects = nlohmann::json::object();
        for (const auto& [reason, n] : t.loop.rejects) rejects[reason] = n;
        targets.push_back({
            {"id", t.id},
            {"index", t.index},
            {"status", t.ok ? "ok" : "failed"},
            {"error", t.error},
            {"results", t.results},
            {"attempts", t.loop.attempts},
            {"filled", {{"large", t.loop.filled.large}, {"medium", t.loop.filled.medium}, {"small", t.loop.filled.small}}},
            {"rejects", rejects},
            {"wall_time_s", t.wall_time_s},
        });
    }
    return {
        {"targets", targets},
        {"total_syntheses", report.total_syntheses},
        {"failed_targets", report.failed_targets},
        {"wall_time_s", report.wall_time_s},
        {"mean_time_per_synthesis_s", report.mean_time_per_synthesis_s},
    };
}

std::vector<fs::path> list_normal_images(const fs::path& dir)
{
    if (!fs::is_directory(dir)) throw Error("normal image directory not found: " + dir.string());
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

RunReport run_batch(const PipelineConfig& cfg)
{
    using Clock = std::chrono::steady_clock;
    const auto run_start = Clock::now();

    cfg.validate();
    const auto images = list_normal_images(cfg.normal_dir);
    if (images.empty()) throw Error("no PNG/JPEG images in " + cfg.normal_dir.string());
    const ManifestIndex index = load_manifest(cfg.manifest_path, cfg.excluded_sources);
    if (cfg.class_filter) {
        bool any = false;
        for (auto cls : *cfg.class_filter) any = any || index.by_class().count(cls);
        if (!any) throw Error("class filter matches no usable manifest record");
    }

    fs::create_directories(cfg.out_dir / "images");
    fs::create_directories(cfg.out_dir / "masks");

    RunReport report;
    report.targets.resize(images.size());
    std::vector<std::vector<SynthesisMeta>> metas(images.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        for (std::size_t i; (i = next.fetch_add(1)) < images.size();) {
            TargetReport& tr = report.targets[i];
            tr.index = i;
            tr.id = images[i].stem().string();
            const auto start = Clock::now();
            try {
                const PreparedTarget target = prepare_target(images[i], cfg);
                auto results = synthesize_for_target(target, i, index, cfg, &tr.loop);
                for (const auto& r : results) {
                    const std::string name = target.id + "_" + std::to_string(r.meta.output_index) + ".png";
                    write_png(cfg.out_dir / "images" / name, r.image);
                    write_mask_png(cfg.out_dir / "masks" / name, r.mask);
                    metas[i].push_back(r.meta);
                }
                tr.results = results.size();
                tr.ok = true;
            } catch (const std::exception& e) {
                tr.ok = false;
                tr.error = e.what();
                metas[i].clear();
            }
            tr.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
        }
    };

    const int n_threads = std::min<int>(cfg.workers, static_cast<int>(images.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::ofstream meta_out(cfg.out_dir / "meta.jsonl", std::ios::binary | std::ios::trunc);
    if (!meta_out) throw Error("cannot write " + (cfg.out_dir / "meta.jsonl").string());
    double busy = 0.0;
    for (std::size_t i = 0; i < images.size(); ++i) {
        for (const auto& m : metas[i]) meta_out << to_json(m).dump() << '\n';
        report.total_syntheses += report.targets[i].results;
        report.failed_targets += report.targets[i].ok ? 0 : 1;
        if (report.targets[i].ok) busy += report.targets[i].wall_time_s;
    }
    meta_out.close();
    report.mean_time_per_synthesis_s = report.total_syntheses ? busy / report.total_syntheses : 0.0;
    report.wall_time_s = std::chrono::duration<double>(Clock::now() - run_start).count();

    std::ofstream report_out(cfg.out_dir / "report.json", std::ios::binary | std::ios::trunc);
    if (!report_out) throw Error("cannot write " + (cfg.out_dir / "report.json").string());
    report_out << to_json(report).dump(2) << '\n';
    return report;
}

}  // namespace crossinject
