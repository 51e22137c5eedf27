#include "crossinject/imagecore.hpp"

#include "crossinject/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace crossinject {

Image::Image(int height, int width, double fill)
    : height_(height), width_(width)
{
    if (height <= 0 || width <= 0) throw Error("Image: dimensions must be positive");
    data_.assign(static_cast<std::size_t>(height) * width * kChannels, fill);
}

BinaryMask::BinaryMask(int height, int width, std::uint8_t fill)
    : height_(height), width_(width)
{
    if (height <= 0 || width <= 0) throw Error("BinaryMask: dimensions must be positive");
    data_.assign(static_cast<std::size_t>(height) * width, fill ? 1 : 0);
}

std::size_t BinaryMask::count() const
{
    return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

bool BinaryMask::any() const
{
    return std::find(data_.begin(), data_.end(), std::uint8_t{1}) != data_.end();
}

BBox minbb(const BinaryMask& mask)
{
    int top = mask.height(), bottom = -1, left = mask.width(), right = -1;
    for (int r = 0; r < mask.height(); ++r) {
        for (int c = 0; c < mask.width(); ++c) {
            if (!mask.at(r, c)) continue;
            top = std::min(top, r);
            bottom = std::max(bottom, r);
            left = std::min(left, c);
            right = std::max(right, c);
        }
    }
    if (bottom < 0) throw Error("minbb: mask has no nonzero pixel");
    return {top, left, bottom - top + 1, right - left + 1};
}

namespace {

// Source-coordinate taps for one axis: out index d samples
// (d + 0.5) * step - 0.5 in the input, clamped to the raster.
struct Taps {
    std::vector<int> lo, hi;
    std::vector<double> frac;
};

Taps make_taps(int in_size, int out_size, double step)
{
    Taps t;
    t.lo.resize(out_size);
    t.hi.resize(out_size);
    t.frac.resize(out_size);
    for (int d = 0; d < out_size; ++d) {
        double x = (d + 0.5) * step - 0.5;
        x = std::clamp(x, 0.0, static_cast<double>(in_size - 1));
        const int x0 = static_cast<int>(std::floor(x));
        t.lo[d] = x0;
        t.hi[d] = std::min(x0 + 1, in_size - 1);
        t.frac[d] = x - x0;
    }
    return t;
}

int scaled_side(int side, double ratio)
{
    if (!(ratio > 0.0)) throw Error("resize: ratio must be positive");
    const long out = std::lround(side * ratio);
    if (out < 1) {
        throw Rejected(RejectReason::PatternVanished,
                       "resize: ratio " + std::to_string(ratio) + " shrinks a side of " +
                           std::to_string(side) + " px to zero");
    }
    return static_cast<int>(out);
}

Image resample(const Image& img, int out_h, int out_w, double step_y, double step_x)
{
    const Taps ty = make_taps(img.height(), out_h, step_y);
    const Taps tx = make_taps(img.width(), out_w, step_x);
    Image out(out_h, out_w);
    for (int r = 0; r < out_h; ++r) {
        const double fy = ty.frac[r];
        for (int c = 0; c < out_w; ++c) {
            const double fx = tx.frac[c];
            for (int ch = 0; ch < Image::kChannels; ++ch) {
                const double top = img.at(ty.lo[r], tx.lo[c], ch) * (1.0 - fx) + img.at(ty.lo[r], tx.hi[c], ch) * fx;
                const double bot = img.at(ty.hi[r], tx.lo[c], ch) * (1.0 - fx) + img.at(ty.hi[r], tx.hi[c], ch) * fx;
                out.at(r, c, ch) = std::clamp(top * (1.0 - fy) + bot * fy, 0.0, 1.0);
            }
        }
    }
    return out;
}

BinaryMask resample(const BinaryMask& mask, int out_h, int out_w, double step_y, double step_x)
{
    const Taps ty = make_taps(mask.height(), out_h, step_y);
    const Taps tx = make_taps(mask.width(), out_w, step_x);
    BinaryMask out(out_h, out_w);
    for (int r = 0; r < out_h; ++r) {
        const double fy = ty.frac[r];
        for (int c = 0; c < out_w; ++c) {
            const double fx = tx.frac[c];
            const double top = mask.at(ty.lo[r], tx.lo[c]) * (1.0 - fx) + mask.at(ty.lo[r], tx.hi[c]) * fx;
            const double bot = mask.at(ty.hi[r], tx.lo[c]) * (1.0 - fx) + mask.at(ty.hi[r], tx.hi[c]) * fx;
            out.at(r, c) = (top * (1.0 - fy) + bot * fy) >= 0.5 ? 1 : 0;
        }
    }
    if (mask.any() && !out.any()) {
        throw Rejected(RejectReason::PatternVanished, "resize_mask: mask vanished after resize");
    }
    return out;
}

}  // namespace

Image resize_image(const Image& img, double ratio)
{
    const int h = scaled_side(img.height(), ratio);
    const int w = scaled_side(img.width(), ratio);
    return resample(img, h, w, 1.0 / ratio, 1.0 / ratio);
}

Image resize_image_to(const Image& img, int height, int width)
{
    if (height <= 0 || width <= 0) throw Error("resize_image_to: dimensions must be positive");
    if (height == img.height() && width == img.width()) return img;
    return resample(img, height, width, static_cast<double>(img.height()) / height,
                    static_cast<double>(img.width()) / width);
}

BinaryMask resize_mask(const BinaryMask& mask, double ratio)
{
    const int h = scaled_side(mask.height(), ratio);
    const int w = scaled_side(mask.width(), ratio);
    return resample(mask, h, w, 1.0 / ratio, 1.0 / ratio);
}

BinaryMask resize_mask_to(const BinaryMask& mask, int height, int width)
{
    if (height <= 0 || width <= 0) throw Error("resize_mask_to: dimensions must be positive");
    if (height == mask.height() && width == mask.width()) return mask;
    return resample(mask, height, width, static_cast<double>(mask.height()) / height,
                    static_cast<double>(mask.width()) / width);
}

BinaryMask binarize(const Image& img_diff, double threshold)
{
    BinaryMask out(img_diff.height(), img_diff.width());
    for (int r = 0; r < img_diff.height(); ++r) {
        for (int c = 0; c < img_diff.width(); ++c) {
            double m = img_diff.at(r, c, 0);
            for (int ch = 1; ch < Image::kChannels; ++ch) m = std::max(m, img_diff.at(r, c, ch));
            out.at(r, c) = m > threshold ? 1 : 0;
        }
    }
    return out;
}

Image crop(const Image& img, const BBox& box)
{
    if (box.top < 0 || box.left < 0 || box.height <= 0 || box.width <= 0 ||
        box.bottom() >= img.height() || box.right() >= img.width()) {
        throw Error("crop: box outside image");
    }
    Image out(box.height, box.width);
    for (int r = 0; r < box.height; ++r)
        for (int c = 0; c < box.width; ++c)
            for (int ch = 0; ch < Image::kChannels; ++ch)
                out.at(r, c, ch) = img.at(box.top + r, box.left + c, ch);
    return out;
}

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b)
{
    if (a.height() != b.height() || a.width() != b.width()) throw Error("mask_and: dimension mismatch");
    BinaryMask out = a;
    for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] &= b.data()[i];
    return out;
}

BinaryMask remove_small_components(const BinaryMask& mask, std::size_t min_area)
{
    BinaryMask out = mask;
    if (min_area <= 1) return out;
    const int h = mask.height(), w = mask.width();
    std::vector<std::uint8_t> seen(mask.data().size(), 0);
    std::vector<int> component;
    std::vector<int> stack;
    for (int start = 0; start < h * w; ++start) {
        if (!mask.data()[start] || seen[start]) continue;
        component.clear();
        stack.assign(1, start);
        seen[start] = 1;
        while (!stack.empty()) {
            const int p = stack.back();
            stack.pop_back();
            component.push_back(p);
            const int r = p / w, c = p % w;
            const int nbrs[4][2] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
            for (const auto& n : nbrs) {
                if (n[0] < 0 || n[0] >= h || n[1] < 0 || n[1] >= w) continue;
                const int q = n[0] * w + n[1];
                if (mask.data()[q] && !seen[q]) {
                    seen[q] = 1;
                    stack.push_back(q);
                }
            }
        }
        if (component.size() < min_area)
            for (int p : component) out.data()[p] = 0;
    }
    return out;
}

}  // namespace crossinject
