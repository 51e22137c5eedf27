#include "crossinject/scalematch.hpp"

#include "crossinject/error.hpp"

#include <string>

namespace crossinject {

std::string_view to_string(ScaleClass cls)
{
    switch (cls) {
    case ScaleClass::Trivial: return "trivial";
    case ScaleClass::Small: return "small";
    case ScaleClass::Medium: return "medium";
    case ScaleClass::Large: return "large";
    }
    return "unknown";
}

std::optional<ScaleClass> parse_scale_class(std::string_view name)
{
    for (ScaleClass cls : {ScaleClass::Trivial, ScaleClass::Small, ScaleClass::Medium, ScaleClass::Large})
        if (to_string(cls) == name) return cls;
    return std::nullopt;
}

int& ScaleCounts::operator[](ScaleClass cls)
{
    switch (cls) {
    case ScaleClass::Large: return large;
    case ScaleClass::Medium: return medium;
    case ScaleClass::Small: return small;
    default: throw Error("ScaleCounts: trivial scale has no counter");
    }
}

int ScaleCounts::operator[](ScaleClass cls) const
{
    return const_cast<ScaleCounts&>(*this)[cls];
}

Quota::Quota(ScaleCounts targets) : targets_(targets)
{
    if (targets.large < 0 || targets.medium < 0 || targets.small < 0)
        throw Error("Quota: negative target count");
}

bool Quota::has_room(ScaleClass cls) const
{
    return cls != ScaleClass::Trivial && filled_[cls] < targets_[cls];
}

bool Quota::satisfied() const
{
    return filled_ == targets_;
}

void Quota::increment(ScaleClass cls)
{
    if (!has_room(cls)) throw Error(std::string("Quota: no room for ") + std::string(to_string(cls)));
    ++filled_[cls];
}

double compute_str(const BinaryMask& anomaly_mask, const BinaryMask& fg_mask)
{
    const int s_a = minbb(anomaly_mask).max_side();
    const int s_f = minbb(fg_mask).max_side();
    return static_cast<double>(s_a) / s_f;
}

ScaleClass classify_scale(double str)
{
    if (str < kSmallLower) return ScaleClass::Trivial;
    if (str < kMediumLower) return ScaleClass::Small;
    if (str < kLargeLower) return ScaleClass::Medium;
    return ScaleClass::Large;
}

std::optional<ScaleClass> assign_scale(ScaleClass source, const Quota& quota)
{
    // Large-first, downward only: a pattern never grows past its own class.
    switch (source) {
    case ScaleClass::Large:
        if (quota.has_room(ScaleClass::Large)) return ScaleClass::Large;
        [[fallthrough]];
    case ScaleClass::Medium:
        if (quota.has_room(ScaleClass::Medium)) return ScaleClass::Medium;
        [[fallthrough]];
    case ScaleClass::Small:
        if (quota.has_room(ScaleClass::Small)) return ScaleClass::Small;
        return std::nullopt;
    case ScaleClass::Trivial:
        return std::nullopt;
    }
    return std::nullopt;
}

double draw_synthesis_str(ScaleClass cls, Rng& rng)
{
    switch (cls) {
    case ScaleClass::Large: return rng.uniform_real(kLargeLower, kLargeUpper);
    case ScaleClass::Medium: return rng.uniform_real(kMediumLower, kLargeLower);
    case ScaleClass::Small: return rng.uniform_real(kSmallLower, kMediumLower);
    case ScaleClass::Trivial: break;
    }
    throw Error("draw_synthesis_str: trivial scale cannot be synthesized");
}

std::optional<ScalePlan> select_synthesis_str(double str, Quota& quota, Rng& rng)
{
    if (!(str > 0.0)) throw Error("select_synthesis_str: ratio must be positive");
    const auto scale = assign_scale(classify_scale(str), quota);
    if (!scale) return std::nullopt;
    ScalePlan plan;
    plan.str = str;
    plan.scale = *scale;
    plan.synthesis_str = draw_synthesis_str(*scale, rng);
    plan.ratio = plan.synthesis_str / str;
    quota.increment(*scale);
    return plan;
}

ResizedPattern resize_for_injection(const Image& image, const BinaryMask& mask, const ScalePlan& plan)
{
    if (!(plan.ratio > 0.0)) throw Error("resize_for_injection: ratio must be positive");
    if (image.height() != mask.height() || image.width() != mask.width())
        throw Error("resize_for_injection: image and mask dimensions differ");
    ResizedPattern out;
    out.mask = resize_mask(mask, plan.ratio);
    out.image = resize_image(image, plan.ratio);
    out.box = minbb(out.mask);
    if (out.box.height < kMinPatternSide || out.box.width < kMinPatternSide) {
        throw Rejected(RejectReason::PatternTooSmall,
                       "resized pattern is " + std::to_string(out.box.height) + "x" +
                           std::to_string(out.box.width) + " px, below the visibility floor");
    }
    return out;
}

}  // namespace crossinject
