#pragma once

#include "crossinject/imagecore.hpp"

#include <filesystem>
#include <variant>

namespace crossinject {

/// Whole image is foreground (textures).
struct AllOnesMatting {};

/// Foreground mask provided as a file: single-channel PNG, nonzero = foreground.
struct ExternalMaskMatting {
    std::filesystem::path path;
};

/// Background is everything reachable from the image border through pixels
/// whose color is within `tolerance` (L-inf, RGB) of the median border color.
struct BorderHeuristicMatting {
    double tolerance = 0.08;
    std::size_t min_area = 64;
};

using ForegroundStrategy = std::variant<AllOnesMatting, ExternalMaskMatting, BorderHeuristicMatting>;

/// Target-image foreground mask. Throws Error on a dimension mismatch
/// (external mask) or an empty foreground.
BinaryMask foreground_mask(const Image& img, const ForegroundStrategy& strategy);

}  // namespace crossinject
