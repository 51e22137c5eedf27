#include "crossinject/matting.hpp"

#include "crossinject/error.hpp"
#include "crossinject/image_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace crossinject {

namespace {

std::array<double, 3> median_border_color(const Image& img)
{
    const int h = img.height(), w = img.width();
    std::array<double, 3> median{};
    std::vector<double> values;
    for (int ch = 0; ch < Image::kChannels; ++ch) {
        values.clear();
        for (int c = 0; c < w; ++c) {
            values.push_back(img.at(0, c, ch));
            if (h > 1) values.push_back(img.at(h - 1, c, ch));
        }
        for (int r = 1; r + 1 < h; ++r) {
            values.push_back(img.at(r, 0, ch));
            if (w > 1) values.push_back(img.at(r, w - 1, ch));
        }
        const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
        std::nth_element(values.begin(), mid, values.end());
        median[ch] = *mid;
    }
    return median;
}

BinaryMask border_heuristic(const Image& img, const BorderHeuristicMatting& params)
{
    const int h = img.height(), w = img.width();
    const auto bg = median_border_color(img);
    auto matches = [&](int r, int c) {
        for (int ch = 0; ch < Image::kChannels; ++ch)
            if (std::abs(img.at(r, c, ch) - bg[ch]) > params.tolerance) return false;
        return true;
    };

    BinaryMask background(h, w);
    std::vector<Location> stack;
    auto seed = [&](int r, int c) {
        if (!background.at(r, c) && matches(r, c)) {
            background.at(r, c) = 1;
            stack.push_back({r, c});
        }
    };
    for (int c = 0; c < w; ++c) {
        seed(0, c);
        seed(h - 1, c);
    }
    for (int r = 0; r < h; ++r) {
        seed(r, 0);
        seed(r, w - 1);
    }
    while (!stack.empty()) {
        const Location p = stack.back();
        stack.pop_back();
        if (p.row > 0) seed(p.row - 1, p.col);
        if (p.row + 1 < h) seed(p.row + 1, p.col);
        if (p.col > 0) seed(p.row, p.col - 1);
        if (p.col + 1 < w) seed(p.row, p.col + 1);
    }

    BinaryMask fg(h, w);
    for (std::size_t i = 0; i < fg.data().size(); ++i) fg.data()[i] = background.data()[i] ? 0 : 1;
    fg = remove_small_components(fg, params.min_area);
    if (!fg.any())
        throw Error("border heuristic found no foreground; use all-ones or an external mask for this category");
    return fg;
}

}  // namespace

BinaryMask foreground_mask(const Image& img, const ForegroundStrategy& strategy)
{
    if (std::holds_alternative<AllOnesMatting>(strategy)) return BinaryMask(img.height(), img.width(), 1);

    if (const auto* ext = std::get_if<ExternalMaskMatting>(&strategy)) {
        BinaryMask mask = read_mask(ext->path);
        if (mask.height() != img.height() || mask.width() != img.width())
            throw Error("foreground mask " + ext->path.string() + " does not match the image dimensions");
        if (!mask.any()) throw Error("foreground mask " + ext->path.string() + " is empty");
        return mask;
    }
    return border_heuristic(img, std::get<BorderHeuristicMatting>(strategy));
}

}  // namespace crossinject
