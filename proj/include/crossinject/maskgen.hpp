#pragma once

#include "crossinject/imagecore.hpp"

namespace crossinject {

struct MaskGenParams {
    double threshold = 25.0 / 255.0;
    std::size_t min_component_area = 5;
};

/// Per-pixel, per-channel |synth - target|.
Image difference_map(const Image& synth, const Image& target);

/// Ground-truth mask of a synthesized image: the difference map binarized at
/// params.threshold, restricted to omega_fg, with 4-connected specks below
/// min_component_area removed. Throws Rejected(EmptyMask) if nothing is left.
BinaryMask derive_mask(const Image& synth, const Image& target, const BinaryMask& omega_fg,
                       const MaskGenParams& params = {});

}  // namespace crossinject
