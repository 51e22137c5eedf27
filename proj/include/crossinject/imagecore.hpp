#pragma once

#include <cstdint>
#include <vector>

namespace crossinject {

/// Integer raster coordinate.
struct Location {
    int row = 0;
    int col = 0;

    friend bool operator==(const Location&, const Location&) = default;
};

/// H x W x 3 image with real intensities in [0, 1], row-major, channels
/// interleaved.
class Image {
public:
    static constexpr int kChannels = 3;

    Image() = default;
    Image(int height, int width, double fill = 0.0);

    int height() const { return height_; }
    int width() const { return width_; }
    bool empty() const { return data_.empty(); }

    double& at(int row, int col, int ch)
    {
        return data_[(static_cast<std::size_t>(row) * width_ + col) * kChannels + ch];
    }
    double at(int row, int col, int ch) const
    {
        return data_[(static_cast<std::size_t>(row) * width_ + col) * kChannels + ch];
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    friend bool operator==(const Image&, const Image&) = default;

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<double> data_;
};

/// H x W mask with values in {0, 1}.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int height, int width, std::uint8_t fill = 0);

    int height() const { return height_; }
    int width() const { return width_; }

    std::uint8_t& at(int row, int col) { return data_[static_cast<std::size_t>(row) * width_ + col]; }
    std::uint8_t at(int row, int col) const { return data_[static_cast<std::size_t>(row) * width_ + col]; }

    std::vector<std::uint8_t>& data() { return data_; }
    const std::vector<std::uint8_t>& data() const { return data_; }

    std::size_t count() const;
    bool any() const;

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<std::uint8_t> data_;
};

struct BBox {
    int top = 0;
    int left = 0;
    int height = 0;
    int width = 0;

    int bottom() const { return top + height - 1; }
    int right() const { return left + width - 1; }
    int max_side() const { return height > width ? height : width; }

    friend bool operator==(const BBox&, const BBox&) = default;
};

/// Smallest axis-aligned box enclosing every nonzero pixel. Throws on an
/// all-zero mask.
BBox minbb(const BinaryMask& mask);

/// Bilinear resize by a uniform ratio; output sides are round(side * ratio).
Image resize_image(const Image& img, double ratio);
/// Bilinear resize to explicit dimensions.
Image resize_image_to(const Image& img, int height, int width);

/// Bilinear resize of the mask as a real field, re-binarized at 0.5.
/// Throws Rejected(PatternVanished) when a non-empty mask comes out empty.
BinaryMask resize_mask(const BinaryMask& mask, double ratio);
BinaryMask resize_mask_to(const BinaryMask& mask, int height, int width);

/// out(p) = 1 iff max over channels of img(p) > threshold.
BinaryMask binarize(const Image& img_diff, double threshold);

/// Copy of the sub-raster covered by box (which must lie inside img).
Image crop(const Image& img, const BBox& box);

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b);

/// Drops 4-connected foreground components with fewer than min_area pixels.
BinaryMask remove_small_components(const BinaryMask& mask, std::size_t min_area);

}  // namespace crossinject
