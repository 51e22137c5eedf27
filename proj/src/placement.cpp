#include "crossinject/placement.hpp"

#include "crossinject/error.hpp"

#include <algorithm>
#include <string>

namespace crossinject {

Location box_origin(Location center, int box_height, int box_width)
{
    return {center.row - box_height / 2, center.col - box_width / 2};
}

std::vector<Location> candidate_locations(const BinaryMask& fg_mask, int box_height, int box_width)
{
    if (box_height <= 0 || box_width <= 0) throw Error("candidate_locations: empty pattern box");
    const int h = fg_mask.height(), w = fg_mask.width();
    // Containment is separable: the valid centers form one rectangle,
    // [1 + bh/2, h - 1 - bh + bh/2] x [1 + bw/2, w - 1 - bw + bw/2].
    const int row_lo = 1 + box_height / 2;
    const int row_hi = h - 1 - box_height + box_height / 2;
    const int col_lo = 1 + box_width / 2;
    const int col_hi = w - 1 - box_width + box_width / 2;

    std::vector<Location> out;
    for (int r = row_lo; r <= row_hi; ++r)
        for (int c = col_lo; c <= col_hi; ++c)
            if (fg_mask.at(r, c)) out.push_back({r, c});
    if (out.empty()) {
        throw Rejected(RejectReason::NoPlacement,
                       "no foreground location fits a " + std::to_string(box_height) + "x" +
                           std::to_string(box_width) + " pattern");
    }
    return out;
}

std::vector<Location> candidate_locations(const BinaryMask& fg_mask, const BinaryMask& pattern_mask)
{
    const BBox box = minbb(pattern_mask);
    return candidate_locations(fg_mask, box.height, box.width);
}

Location sample_location(const std::vector<Location>& candidates, Rng& rng)
{
    if (candidates.empty()) throw Rejected(RejectReason::NoPlacement, "sample_location: no candidates");
    return candidates[rng.uniform_index(candidates.size())];
}

Placement materialize_placement(const BinaryMask& pattern_mask, Location center, int target_height, int target_width)
{
    const BBox src = minbb(pattern_mask);
    const Location origin = box_origin(center, src.height, src.width);
    Placement p;
    p.center = center;
    p.box = {origin.row, origin.col, src.height, src.width};
    if (p.box.top < 1 || p.box.left < 1 || p.box.bottom() > target_height - 2 || p.box.right() > target_width - 2)
        throw Error("materialize_placement: pattern box leaves the one-pixel raster margin");

    p.omega = BinaryMask(target_height, target_width);
    for (int r = 0; r < src.height; ++r)
        for (int c = 0; c < src.width; ++c)
            if (pattern_mask.at(src.top + r, src.left + c)) p.omega.at(p.box.top + r, p.box.left + c) = 1;
    return p;
}

}  // namespace crossinject
