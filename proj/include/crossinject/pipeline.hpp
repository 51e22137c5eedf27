#pragma once

#include "crossinject/dataset.hpp"
#include "crossinject/error.hpp"
#include "crossinject/maskgen.hpp"
#include "crossinject/matting.hpp"
#include "crossinject/poisson.hpp"
#include "crossinject/scalematch.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace crossinject {

enum class MattingKind { AllOnes, Border, External };

struct MattingConfig {
    MattingKind kind = MattingKind::AllOnes;
    /// For External: path with "{id}" replaced by the target id (file stem).
    std::string external_template;
    BorderHeuristicMatting border;
};

struct PipelineConfig {
    std::filesystem::path normal_dir;
    std::filesystem::path manifest_path;
    std::filesystem::path out_dir;
    std::uint64_t seed = 0;
    ScaleCounts counts{4, 3, 3};
    PEMode mode = PEMode::Normal;
    std::optional<std::set<AnomalyClass>> class_filter;
    int target_height = 256;
    int target_width = 256;
    MaskGenParams mask;
    MattingConfig matting;
    std::set<std::string> excluded_sources;
    int max_attempts = 500;
    int workers = 1;
    SolveOptions solver;

    /// Throws Error describing the first invalid field.
    void validate() const;
};

struct SynthesisMeta {
    std::string target_id;
    std::size_t output_index = 0;
    std::string source_anomaly_id;
    AnomalyClass anomaly_class = AnomalyClass::Pits;
    double str = 0.0;
    double synthesis_str = 0.0;
    ScaleClass scale = ScaleClass::Small;
    Location center;
    PEMode mode = PEMode::Normal;
    int attempt_index = 0;
    /// (master seed, target index, attempt index) of the attempt's stream.
    std::uint64_t seed = 0;
    std::uint64_t target_index = 0;
};

nlohmann::json to_json(const SynthesisMeta& meta);
SynthesisMeta meta_from_json(const nlohmann::json& j);

struct SynthesisResult {
    Image image;
    BinaryMask mask;
    SynthesisMeta meta;
    /// Omega ∩ foreground the synthesis was allowed to touch.
    BinaryMask region;
};

/// A normal image resized to the working size, with its foreground mask.
struct PreparedTarget {
    std::string id;
    Image image;
    BinaryMask foreground;
};

PreparedTarget prepare_target(const std::filesystem::path& image_path, const PipelineConfig& cfg);

struct QuotaLoopStats {
    ScaleCounts filled;
    int attempts = 0;
    std::map<std::string, int> rejects;
    bool complete = false;
};

/// Runs attempts 0, 1, ... until the quota is met or max_attempts is spent.
/// `attempt` receives a copy of the quota; if it returns normally the copy
/// is committed, if it throws Rejected the copy is discarded and the reason
/// is counted.
QuotaLoopStats fill_quota(ScaleCounts counts, int max_attempts,
                          const std::function<void(int attempt, Quota& trial)>& attempt);

struct TargetReport {
    std::string id;
    std::uint64_t index = 0;
    bool ok = false;
    std::string error;
    std::size_t results = 0;
    QuotaLoopStats loop;
    double wall_time_s = 0.0;
};

/// All N_l + N_m + N_s syntheses for one target, in emission order. Throws
/// Error with the loop diagnostics if the attempt cap is hit.
std::vector<SynthesisResult> synthesize_for_target(const PreparedTarget& target, std::uint64_t target_index,
                                                   const ManifestIndex& index, const PipelineConfig& cfg,
                                                   QuotaLoopStats* stats = nullptr);

/// Re-runs the single synthesis described by meta.
SynthesisResult replay_synthesis(const SynthesisMeta& meta, const PreparedTarget& target,
                                 const ManifestIndex& index, const PipelineConfig& cfg);

struct RunReport {
    std::vector<TargetReport> targets;
    std::size_t total_syntheses = 0;
    std::size_t failed_targets = 0;
    double wall_time_s = 0.0;
    double mean_time_per_synthesis_s = 0.0;

    int exit_code() const { return failed_targets ? 1 : 0; }
};

nlohmann::json to_json(const RunReport& report);

/// Normal images of a directory (PNG/JPEG by extension), sorted by name.
std::vector<std::filesystem::path> list_normal_images(const std::filesystem::path& dir);

/// Processes every image in cfg.normal_dir and writes images/, masks/,
/// meta.jsonl and report.json under cfg.out_dir. Per-target failures are
/// recorded in the report; config and I/O setup problems throw Error.
RunReport run_batch(const PipelineConfig& cfg);

}  // namespace crossinject
