#pragma once

#include "crossinject/imagecore.hpp"

#include <filesystem>

namespace crossinject {

struct ImageDims {
    int height = 0;
    int width = 0;

    friend bool operator==(const ImageDims&, const ImageDims&) = default;
};

/// Reads only the header of a PNG or JPEG file.
ImageDims read_dimensions(const std::filesystem::path& path);

/// Decodes a PNG or JPEG into RGB in [0, 1]. Gray is replicated, alpha dropped.
Image read_image(const std::filesystem::path& path);

/// Decodes a mask file; any nonzero sample marks the pixel.
BinaryMask read_mask(const std::filesystem::path& path);

/// 8-bit RGB PNG, value = round(v * 255).
void write_png(const std::filesystem::path& path, const Image& img);

/// 8-bit gray PNG, 255 for mask pixels and 0 elsewhere.
void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask);

}  // namespace crossinject
