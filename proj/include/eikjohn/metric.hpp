#pragma once
#include <optional>
#include <vector>

#include "eikjohn/grid.hpp"

namespace eikjohn {

/// Two-sided speed envelope 0 < alpha_lo <= alpha_hi for the propagation speed.
/// Travel-cost rates are bracketed by |v|/alpha_hi <= sigma(x,v) <= |v|/alpha_lo.
struct MetricBounds {
    double alpha_lo = 1.0;
    double alpha_hi = 1.0;
    void validate() const;
};

enum class CostKind {
    IsotropicEikonal, ///< sigma(x,v) = |v| / alpha(x)
    FinslerSampled    ///< direction-dependent speed table on a fixed fan
};

/// The cost side of the Hamiltonian: a positively 1-homogeneous cost density
/// sigma(x,v) (cost per unit length of travel at x in direction v) plus the
/// speed envelope. Isotropic models carry a per-cell speed field alpha; Finsler
/// models carry a per-direction speed table (uniform across cells or per cell).
/// An optional domain mask marks passable cells; everything outside it is
/// impassable (infinite cost), and the envelope is taken over passable cells.
struct CostModel {
    CostKind kind = CostKind::IsotropicEikonal;
    GridField alpha;                 ///< isotropic speed per cell (empty for Finsler)
    std::vector<Vec> fan;            ///< unit directions (Finsler only; 2D fans sorted by angle)
    std::vector<double> fan_speeds;  ///< size M (uniform) or cells*M (per cell)
    MetricBounds bounds;
    std::optional<RegionMask> domain; ///< passable cells; nullopt = all passable

    const GridSpec& grid() const;
    bool passable(cell_t c) const { return !domain || domain->at(c); }

    /// Isotropic speed at a cell. Throws UnsupportedModelError for Finsler models.
    double speed(cell_t c) const;
    /// Speed of travel from cell c in direction dir (any nonzero vector).
    double speed_in_dir(cell_t c, const Vec& dir) const;
    /// Cost rate sigma at a cell: |v| / speed. Exactly positively 1-homogeneous.
    /// +inf on impassable cells. Zero vector gives 0.
    double sigma_at_cell(cell_t c, const Vec& v) const;

    /// Build an isotropic model; the envelope is scanned from the field
    /// (restricted to `domain` when given).
    static CostModel isotropic(GridField alpha);
    static CostModel isotropic(GridField alpha, RegionMask domain);

    /// Like `isotropic`, but trusts the caller's envelope instead of scanning
    /// the field. The declared envelope is NOT checked against the data; checks
    /// downstream will fault a model whose field escapes its declaration, which
    /// is exactly what this constructor exists to exercise.
    static CostModel isotropic_with_declared_bounds(GridField alpha, MetricBounds declared,
                                                    std::optional<RegionMask> domain = {});

    /// Build a Finsler model from a direction fan and a speed table
    /// (`speeds.size()` is either fan.size() for a spatially uniform profile or
    /// cell_count*fan.size() for per-cell profiles, direction index fastest).
    /// Validates the declared envelope against the table and checks convexity
    /// of the sampled speed ball on the fan. 2D fans are re-sorted by angle.
    static CostModel finsler(const GridSpec& grid, std::vector<Vec> fan,
                             std::vector<double> speeds, MetricBounds declared,
                             std::optional<RegionMask> domain = {});

    /// Default evaluation fans: 32 uniformly spaced directions in 2D; the 98
    /// primitive lattice directions with entries in [-2,2] in 3D.
    static std::vector<Vec> default_fan(int dim);
};

/// Cost rate sigma(x, v) at a world point (nearest-cell speed sampling, so the
/// density is piecewise constant across cells, matching what the solvers see).
double sigma(const CostModel& model, const Vec& x, const Vec& v);

/// The model's speed envelope.
MetricBounds bounds_of(const CostModel& model);

} // namespace eikjohn
