#pragma once

#include "crossinject/rng.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace crossinject {

/// The eight industrial anomaly classes a manifest may use.
enum class AnomalyClass { Pits, Crack, Hole, Stain, Scratch, Orifice, Impurity, Abrasion };

inline constexpr std::array<AnomalyClass, 8> kAllAnomalyClasses = {
    AnomalyClass::Pits,  AnomalyClass::Crack,   AnomalyClass::Hole,     AnomalyClass::Stain,
    AnomalyClass::Scratch, AnomalyClass::Orifice, AnomalyClass::Impurity, AnomalyClass::Abrasion,
};

std::string_view to_string(AnomalyClass cls);
/// Case-insensitive match against the eight class names; anything else is
/// std::nullopt.
std::optional<AnomalyClass> parse_anomaly_class(std::string_view name);

struct AnomalyRecord {
    std::string id;
    std::filesystem::path image_path;  // resolved against the manifest directory
    std::filesystem::path mask_path;
    AnomalyClass anomaly_class = AnomalyClass::Pits;
    std::string source_tag;
};

struct SkippedRecord {
    std::size_t line = 0;  // 1-based
    std::string reason;
};

/// Immutable index over the usable records of one manifest.
class ManifestIndex {
public:
    ManifestIndex(std::vector<AnomalyRecord> records, std::set<std::string> excluded_sources,
                  std::vector<SkippedRecord> skipped = {});

    const std::vector<AnomalyRecord>& records() const { return records_; }
    const std::map<AnomalyClass, std::vector<std::size_t>>& by_class() const { return by_class_; }
    const std::set<std::string>& excluded_sources() const { return excluded_; }
    const std::vector<SkippedRecord>& skipped() const { return skipped_; }

    const AnomalyRecord* find(std::string_view id) const;

private:
    std::vector<AnomalyRecord> records_;
    std::map<AnomalyClass, std::vector<std::size_t>> by_class_;
    std::set<std::string> excluded_;
    std::vector<SkippedRecord> skipped_;
};

/// Reads a JSON-lines manifest. Records with an excluded source tag are left
/// out; malformed or invalid records are skipped and listed in skipped().
/// Throws Error when the file is unreadable or no record survives.
ManifestIndex load_manifest(const std::filesystem::path& path,
                            const std::set<std::string>& excluded_sources);

/// Uniform draw over the records whose class is in class_filter (all records
/// when the filter is absent). Throws Error for an infeasible filter.
const AnomalyRecord& sample_record(const ManifestIndex& index,
                                   const std::optional<std::set<AnomalyClass>>& class_filter,
                                   Rng& rng);

}  // namespace crossinject
