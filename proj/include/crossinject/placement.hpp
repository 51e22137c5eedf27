#pragma once

#include "crossinject/imagecore.hpp"
#include "crossinject/rng.hpp"

#include <vector>

namespace crossinject {

struct Placement {
    Location center;
    BBox box;          // pattern bounding box translated onto the target
    BinaryMask omega;  // translated pattern support, target-sized
};

/// Top-left of a box of the given size centered at `center`
/// (top-left = center - floor(size / 2)).
Location box_origin(Location center, int box_height, int box_width);

/// Injection centers l with fg_mask(l) = 1 whose centered pattern box stays
/// inside the raster with at least a one-pixel margin. Row-major order.
/// Throws Rejected(NoPlacement) when there is none.
std::vector<Location> candidate_locations(const BinaryMask& fg_mask, const BinaryMask& pattern_mask);

/// Same contract as candidate_locations, for a pattern box of known size.
std::vector<Location> candidate_locations(const BinaryMask& fg_mask, int box_height, int box_width);

Location sample_location(const std::vector<Location>& candidates, Rng& rng);

/// Translates the pattern support so that its bounding box is centered at
/// `center` on a target of the given size.
Placement materialize_placement(const BinaryMask& pattern_mask, Location center, int target_height, int target_width);

}  // namespace crossinject
