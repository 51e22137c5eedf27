#pragma once

#include "crossinject/imagecore.hpp"
#include "crossinject/rng.hpp"

#include <optional>
#include <string_view>

namespace crossinject {

/// Scale type of a source-target ratio R:
/// Trivial R < 0.1, Small [0.1, 0.3), Medium [0.3, 0.7), Large R >= 0.7.
enum class ScaleClass { Trivial, Small, Medium, Large };

std::string_view to_string(ScaleClass cls);
std::optional<ScaleClass> parse_scale_class(std::string_view name);

inline constexpr double kSmallLower = 0.1;
inline constexpr double kMediumLower = 0.3;
inline constexpr double kLargeLower = 0.7;
inline constexpr double kLargeUpper = 1.0;

/// Smallest side, in pixels, a resized pattern's bounding box may have.
inline constexpr int kMinPatternSide = 4;

struct ScaleCounts {
    int large = 0;
    int medium = 0;
    int small = 0;

    int total() const { return large + medium + small; }
    int& operator[](ScaleClass cls);
    int operator[](ScaleClass cls) const;

    friend bool operator==(const ScaleCounts&, const ScaleCounts&) = default;
};

/// Per-target synthesis quota: targets (N_l, N_m, N_s) and filled counters
/// (C_l, C_m, C_s) with 0 <= C <= N.
class Quota {
public:
    explicit Quota(ScaleCounts targets);

    const ScaleCounts& targets() const { return targets_; }
    const ScaleCounts& filled() const { return filled_; }

    bool has_room(ScaleClass cls) const;
    bool satisfied() const;
    /// Throws Error if cls is Trivial or already full.
    void increment(ScaleClass cls);

private:
    ScaleCounts targets_;
    ScaleCounts filled_;
};

struct ScalePlan {
    double str = 0.0;            // R of the source pattern
    double synthesis_str = 0.0;  // R'
    double ratio = 0.0;          // R' / R
    ScaleClass scale = ScaleClass::Small;
};

/// R = max side of minbb(anomaly_mask) / max side of minbb(fg_mask).
double compute_str(const BinaryMask& anomaly_mask, const BinaryMask& fg_mask);

ScaleClass classify_scale(double str);

/// Largest scale class the quota still has room for, never above the source
/// class. std::nullopt for Trivial sources or when nothing assignable is left.
std::optional<ScaleClass> assign_scale(ScaleClass source, const Quota& quota);

/// R' drawn uniformly from the class interval (Small, Medium or Large).
double draw_synthesis_str(ScaleClass cls, Rng& rng);

/// Multi-scale schedule step: picks the scale, draws R' and bumps the
/// matching counter. std::nullopt means the pattern is skipped.
std::optional<ScalePlan> select_synthesis_str(double str, Quota& quota, Rng& rng);

struct ResizedPattern {
    Image image;
    BinaryMask mask;
    BBox box;  // minbb of mask
};

/// Resizes the source pair by plan.ratio. Throws Rejected when the pattern
/// vanishes or its bounding box has a side below kMinPatternSide.
ResizedPattern resize_for_injection(const Image& image, const BinaryMask& mask, const ScalePlan& plan);

}  // namespace crossinject
