#include "crossinject/dataset.hpp"

#include "crossinject/error.hpp"
#include "crossinject/image_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>

namespace crossinject {

namespace {

constexpr std::array<std::string_view, 8> kClassNames = {
    "Pits", "Crack", "Hole", "Stain", "Scratch", "Orifice", "Impurity", "Abrasion",
};

bool iequals(std::string_view a, std::string_view b)
{
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

std::string required_string(const nlohmann::json& obj, const char* key)
{
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string() || it->get<std::string>().empty())
        throw Error(std::string("missing or non-string key '") + key + "'");
    return it->get<std::string>();
}

AnomalyRecord parse_record(const std::string& line, const std::filesystem::path& base)
{
    nlohmann::json obj;
    try {
        obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw Error("record is not a JSON object");

    AnomalyRecord rec;
    rec.id = required_string(obj, "id");
    rec.image_path = base / required_string(obj, "image");
    rec.mask_path = base / required_string(obj, "mask");
    rec.source_tag = required_string(obj, "source");
    const std::string cls = required_string(obj, "class");
    const auto parsed = parse_anomaly_class(cls);
    if (!parsed) throw Error("unknown anomaly class '" + cls + "'");
    rec.anomaly_class = *parsed;
    return rec;
}

void validate_files(const AnomalyRecord& rec)
{
    if (!std::filesystem::is_regular_file(rec.image_path))
        throw Error("image not found: " + rec.image_path.string());
    if (!std::filesystem::is_regular_file(rec.mask_path))
        throw Error("mask not found: " + rec.mask_path.string());
    const ImageDims img = read_dimensions(rec.image_path);
    // Masks are small single-channel files; decoding them fully here is what
    // lets all-zero masks be rejected at load time.
    const BinaryMask mask = read_mask(rec.mask_path);
    if (img.height != mask.height() || img.width != mask.width())
        throw Error("image and mask dimensions differ");
    if (!mask.any()) throw Error("mask has no nonzero pixel");
}

}  // namespace

std::string_view to_string(AnomalyClass cls)
{
    return kClassNames[static_cast<std::size_t>(cls)];
}

std::optional<AnomalyClass> parse_anomaly_class(std::string_view name)
{
    for (std::size_t i = 0; i < kClassNames.size(); ++i)
        if (iequals(name, kClassNames[i])) return kAllAnomalyClasses[i];
    return std::nullopt;
}

ManifestIndex::ManifestIndex(std::vector<AnomalyRecord> records, std::set<std::string> excluded_sources,
                             std::vector<SkippedRecord> skipped)
    : excluded_(std::move(excluded_sources)), skipped_(std::move(skipped))
{
    for (auto& rec : records) {
        if (excluded_.count(rec.source_tag)) continue;
        by_class_[rec.anomaly_class].push_back(records_.size());
        records_.push_back(std::move(rec));
    }
}

const AnomalyRecord* ManifestIndex::find(std::string_view id) const
{
    for (const auto& rec : records_)
        if (rec.id == id) return &rec;
    return nullptr;
}

ManifestIndex load_manifest(const std::filesystem::path& path, const std::set<std::string>& excluded_sources)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot read manifest " + path.string());
    const std::filesystem::path base = path.parent_path();

    std::vector<AnomalyRecord> records;
    std::vector<SkippedRecord> skipped;
    std::set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (std::all_of(line.begin(), line.end(), [](unsigned char ch) { return std::isspace(ch); })) continue;
        try {
            AnomalyRecord rec = parse_record(line, base);
            if (excluded_sources.count(rec.source_tag)) continue;
            if (!seen_ids.insert(rec.id).second) throw Error("duplicate id '" + rec.id + "'");
            validate_files(rec);
            records.push_back(std::move(rec));
        } catch (const Error& e) {
            skipped.push_back({line_no, e.what()});
        }
    }
    if (records.empty())
        throw Error("manifest " + path.string() + " has no usable records (" + std::to_string(skipped.size()) +
                    " skipped)");
    return ManifestIndex(std::move(records), excluded_sources, std::move(skipped));
}

const AnomalyRecord& sample_record(const ManifestIndex& index,
                                   const std::optional<std::set<AnomalyClass>>& class_filter, Rng& rng)
{
    if (!class_filter) {
        if (index.records().empty()) throw Error("sample_record: empty index");
        return index.records()[rng.uniform_index(index.records().size())];
    }
    // Eligible ids in record order, so the draw does not depend on map layout.
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < index.records().size(); ++i)
        if (class_filter->count(index.records()[i].anomaly_class)) eligible.push_back(i);
    if (eligible.empty()) throw Error("sample_record: class filter matches no record");
    return index.records()[eligible[rng.uniform_index(eligible.size())]];
}

}  // namespace crossinject
