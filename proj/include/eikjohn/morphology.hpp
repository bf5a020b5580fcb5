#pragma once
#include <cstdint>
#include <utility>
#include <vector>

#include "eikjohn/grid.hpp"

namespace eikjohn {

/// Exact squared Euclidean cell-center distances to the region, in units of h^2
/// (values are exact integers). Separable lower-envelope passes, rows in parallel.
std::vector<std::int64_t> distance_transform_sq(const RegionMask& region);

/// Exact Euclidean distance from every cell center to the nearest region cell center.
/// Zero on the region. Throws DomainError if the region is empty.
GridField distance_transform(const RegionMask& region);

/// Signed distance to the region boundary: positive outside, negative inside
/// (distance to the nearest cell center of the opposite side).
GridField signed_distance_transform(const RegionMask& region);

/// Cells within Euclidean distance r of the region (inclusive; r = 0 is the identity).
RegionMask dilate_by_ball(const RegionMask& region, double r);

/// Region cells with at least one face neighbor outside the region (grid border counts
/// as outside). This is the inner boundary layer.
RegionMask boundary_cells(const RegionMask& region);

/// Lebesgue measure of the region: cell count * h^dim.
double measure(const RegionMask& region);

/// Hausdorff distance between two nonempty regions (cell-center point sets).
double hausdorff_distance(const RegionMask& a, const RegionMask& b);
/// One-sided: sup over cells of `from` of the distance to `to`.
double directed_hausdorff(const RegionMask& from, const RegionMask& to);

/// Face-connected component labelling. Returns (component count, label per cell;
/// -1 outside the region). Deterministic: components numbered by first cell index.
std::pair<int, std::vector<std::int32_t>> connected_components(const RegionMask& region);

} // namespace eikjohn
