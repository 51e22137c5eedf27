#include "crossinject/maskgen.hpp"

#include "crossinject/error.hpp"

#include <cmath>

namespace crossinject {

Image difference_map(const Image& synth, const Image& target)
{
    if (synth.height() != target.height() || synth.width() != target.width())
        throw Error("difference_map: dimension mismatch");
    Image diff(synth.height(), synth.width());
    for (std::size_t i = 0; i < diff.data().size(); ++i)
        diff.data()[i] = std::abs(synth.data()[i] - target.data()[i]);
    return diff;
}

BinaryMask derive_mask(const Image& synth, const Image& target, const BinaryMask& omega_fg,
                       const MaskGenParams& params)
{
    if (!(params.threshold > 0.0 && params.threshold < 1.0))
        throw Error("derive_mask: threshold must lie in (0, 1)");
    if (omega_fg.height() != target.height() || omega_fg.width() != target.width())
        throw Error("derive_mask: region mask does not match the target");
    BinaryMask mask = binarize(difference_map(synth, target), params.threshold);
    mask = mask_and(mask, omega_fg);
    mask = remove_small_components(mask, params.min_component_area);
    if (!mask.any()) throw Rejected(RejectReason::EmptyMask, "derive_mask: synthesis left no visible anomaly");
    return mask;
}

}  // namespace crossinject
