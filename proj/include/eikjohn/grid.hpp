#pragma once
#include <array>
#include <cstdint>
#include <vector>

#include "eikjohn/errors.hpp"
#include "eikjohn/vec.hpp"

namespace eikjohn {

using cell_t = std::int64_t;

// Hard cap on total cells per grid (keeps memory bounded; configurable at compile time).
inline constexpr cell_t kMaxCells = cell_t(1) << 27;

/// Uniform cell-centered grid over an axis-aligned box in 2 or 3 dimensions.
/// `origin` is the center of cell (0,0[,0]); cell (i,j[,k]) sits at origin + h*(i,j[,k]).
/// Linear indices are row-major with the last axis fastest.
struct GridSpec {
    int dim = 2;
    std::array<cell_t, 3> shape{1, 1, 1}; // shape[2] == 1 when dim == 2
    double h = 1.0;
    Vec origin{0, 0, 0};

    void validate() const;

    cell_t cell_count() const { return shape[0] * shape[1] * shape[2]; }

    bool in_bounds(cell_t i, cell_t j, cell_t k = 0) const {
        return i >= 0 && i < shape[0] && j >= 0 && j < shape[1] && k >= 0 && k < shape[2];
    }
    cell_t index(cell_t i, cell_t j, cell_t k = 0) const { return (i * shape[1] + j) * shape[2] + k; }
    std::array<cell_t, 3> coords(cell_t idx) const {
        cell_t k = idx % shape[2];
        cell_t j = (idx / shape[2]) % shape[1];
        cell_t i = idx / (shape[1] * shape[2]);
        return {i, j, k};
    }

    Vec center(cell_t i, cell_t j, cell_t k = 0) const {
        return {origin[0] + h * double(i), origin[1] + h * double(j), origin[2] + h * double(k)};
    }
    Vec center(cell_t idx) const {
        auto c = coords(idx);
        return center(c[0], c[1], c[2]);
    }

    /// Cell whose center is nearest to p, clamped to the grid.
    cell_t nearest_cell(const Vec& p) const;
    /// True if p lies inside the box covered by the cells (within half a cell of the centers).
    bool covers(const Vec& p) const;

    bool same_as(const GridSpec& o) const;

    /// 2D grid of cells whose centers tile [x0,x1] x [y0,y1] with spacing h.
    static GridSpec box2d(double x0, double x1, double y0, double y1, double h);
    static GridSpec box3d(double x0, double x1, double y0, double y1, double z0, double z1, double h);
};

/// Scalar field sampled at cell centers. +inf marks unreached/invalid cells.
struct GridField {
    GridSpec spec;
    std::vector<double> v;

    GridField() = default;
    explicit GridField(const GridSpec& s, double fill = 0.0);

    double& at(cell_t idx) { return v[std::size_t(idx)]; }
    double at(cell_t idx) const { return v[std::size_t(idx)]; }

    /// Multilinear interpolation at point p (clamped to the grid box).
    /// Non-finite corner values fall back to the nearest finite corner; all-inf patches give +inf.
    double interp(const Vec& p) const;

    /// Interpolated gradient via symmetric differences of `interp` with stencil `delta`
    /// (default h/2). Components are clamped-sampled near the border.
    Vec gradient(const Vec& p, double delta = 0.0) const;
};

/// Boolean region on a grid (1 byte per cell).
struct RegionMask {
    GridSpec spec;
    std::vector<std::uint8_t> m;

    RegionMask() = default;
    explicit RegionMask(const GridSpec& s, bool fill = false);

    bool at(cell_t idx) const { return m[std::size_t(idx)] != 0; }
    void set(cell_t idx, bool val) { m[std::size_t(idx)] = val ? 1 : 0; }

    cell_t count() const;
    bool empty() const { return count() == 0; }

    /// True if any mask cell lies on the outermost cell layer of the grid.
    bool touches_border() const;
    /// Throws ValidationError if the region is empty or touches the grid border.
    void validate_compact(const char* what) const;

    /// Sorted linear indices of all mask cells.
    std::vector<cell_t> cells() const;
};

/// Polyline curve with cached cumulative arc length.
struct Curve {
    std::vector<Vec> pts;
    std::vector<double> cum; // cum[i] = length of pts[0..i]

    Curve() = default;
    explicit Curve(std::vector<Vec> points);

    double length() const { return cum.empty() ? 0.0 : cum.back(); }
    std::size_t size() const { return pts.size(); }

    /// Point at arc length s from the start (clamped to [0, length]).
    Vec at(double s) const;

    /// Concatenation; drops the duplicated joint vertex if the endpoints coincide.
    Curve joined(const Curve& tail) const;
};

} // namespace eikjohn
