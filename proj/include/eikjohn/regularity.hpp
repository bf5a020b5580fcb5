#pragma once
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "eikjohn/grid.hpp"
#include "eikjohn/levelset.hpp"
#include "eikjohn/solver.hpp"

namespace eikjohn {

/// Center-point structure of a source region: a designated interior center,
/// a rule producing in-source curves to that center, and the guarantees those
/// curves carry. kappa0 is the carpenter constant of the provided curves
/// (clearance at least kappa0 * arc-length inside the source); kappa0 = 0
/// declares no guarantee (degenerate sources such as segments), which skips
/// the envelope-derived bound checks downstream. inner_radius is the largest
/// r such that the r-ball around the center stays inside the source.
struct JohnSeed {
  Vec center{};
  double kappa0 = 0.0;
  double inner_radius = 0.0;
  std::function<Curve(const Vec&)> curve_provider;
};

/// Checks a seed against the source region it claims to describe:
/// kappa0 in [0,1], center covered by the source, declared inner ball inside
/// the source on the grid (with one cell of slack). Throws ValidationError.
void validate_seed(const JohnSeed& seed, const RegionMask& source);

/// Numerical twisted-cone certificate for one point: the curve from x to the
/// center and the worst observed clearance-to-arclength ratio along it.
struct JohnCertificate {
  Vec x{};
  Vec center{};
  Curve curve;             ///< from x to the center
  double kappa_hat = 0.0;  ///< min over arc samples of clearance(s)/s, clamped to 1
  double worst_s = 0.0;    ///< arc length where the minimum is attained
};

/// Builds the certificate curve for x inside the sublevel set: the descent
/// curve from x to the source followed by the seed's in-source curve to the
/// center. Clearance is measured against the complement of the sublevel mask,
/// sampled at every curve vertex and every half cell of arc length.
/// x equal to the center is the degenerate single-point curve with
/// kappa_hat = 1 by convention.
JohnCertificate john_certificate(const SolveResult& result, const Sublevel& sub,
                                 const JohnSeed& seed, const Vec& x);

/// Distance from each cell to the complement of the sublevel mask: the
/// clearance field used by certificates. Throws DomainError if the mask
/// fills the whole grid.
GridField boundary_clearance(const Sublevel& sub);

/// How john_sweep picks its sample points on the sublevel boundary.
struct SweepStrategy {
  enum class Kind { AllBoundary, RandomSubset };
  Kind kind = Kind::RandomSubset;
  int count = 500;           ///< sample size for RandomSubset
  std::uint64_t seed = 42;   ///< RNG stream for RandomSubset
};

struct JohnPointRecord {
  Vec x{};
  double kappa_hat = 0.0;
  double worst_s = 0.0;
};

/// Aggregated sweep outcome with the envelope-derived targets.
struct RegularityReport {
  double t = 0.0;
  double kappa_inf = std::numeric_limits<double>::quiet_NaN();
  /// alpha_lo * kappa0 / (2 alpha_hi + alpha_lo); NaN when the seed declares
  /// no kappa0 guarantee.
  double kappa_bound = std::numeric_limits<double>::quiet_NaN();
  /// alpha_lo / (2 alpha_hi + alpha_lo): the seed-independent target that
  /// takes over for large t.
  double large_t_bound = std::numeric_limits<double>::quiet_NaN();
  /// True when t > 2 * inner_radius / (alpha_lo * kappa0), i.e. the front has
  /// cleared the source's own geometry and the stronger bound applies.
  bool large_t_applies = false;
  /// True when the grid is too coarse (h above 1/256 of the domain extent)
  /// for the standard 0.05 comparison tolerance to be trustworthy.
  bool coarse_grid_warning = false;
  std::vector<JohnPointRecord> john_points;  ///< sorted by sample cell index
};

/// Certifies the sublevel set pointwise from boundary samples: runs
/// john_certificate per sample (shared clearance field, parallel over points)
/// and aggregates the worst ratio. Deterministic for a fixed strategy.
RegularityReport john_sweep(const SolveResult& result, const Sublevel& sub,
                            const JohnSeed& seed, const SweepStrategy& strategy = {});

/// Per-boundary-cell radius of the largest inscribed ball touching that cell,
/// and the worst radius over the whole boundary.
struct InteriorBallProfile {
  std::vector<cell_t> boundary;  ///< sorted boundary cell indices
  std::vector<double> radius;    ///< parallel to boundary
  double global_inf = 0.0;
};

/// For each boundary cell x: the largest clearance d(y, complement) among
/// interior cells y whose ball reaches x (|x - y| <= clearance(y) + h).
/// Exact for round shapes within two cells.
InteriorBallProfile interior_ball_radius(const Sublevel& sub);

/// Outcome of searching for an interior cone at a boundary point.
struct ConeTestResult {
  bool found = false;
  Vec axis{};                       ///< witness axis when found
  double opening = 0.0;             ///< half-angle between axis and cone surface
  double depth = 0.0;
  int axes_tried = 0;
  std::int64_t samples_tested = 0;  ///< zero means nothing was testable
};

/// Searches sampled axis directions for a solid cone with apex x, the given
/// half-opening, and the given depth that stays inside the mask. Sample
/// directions are shrunk by the quantization angle asin(h sqrt(n) / (2 r)) at
/// radius r, so verdicts are robust to half-cell jitter. axis_samples <= 0
/// picks 64 axes in 2D and 162 in 3D; depth <= 0 picks a fifth of the domain
/// extent. A test with no testable samples reports failure.
ConeTestResult cone_test(const Sublevel& sub, const Vec& x, double opening,
                         int axis_samples = 0, double depth = 0.0);

/// Least-squares box-counting fit over the given scales.
struct DimensionFit {
  double slope = 0.0;      ///< estimated dimension
  double intercept = 0.0;  ///< of log N against log(1/eps)
  double residual = 0.0;   ///< max absolute log deviation
  std::vector<double> scales;
  std::vector<std::int64_t> counts;  ///< occupied boxes per scale
};

/// Counts occupied boxes of each scale on a fixed lattice anchored at the
/// grid corner and fits log N vs log(1/eps). Needs at least four scales, all
/// at least 2h; a boundary of fewer than two cells is degenerate.
DimensionFit box_counting_dimension(const RegionMask& boundary,
                                    const std::vector<double>& scales);

/// Dyadic scale ladder 2h, 4h, 8h, ... up to an eighth of the domain extent.
std::vector<double> dyadic_scales(const GridSpec& g);

/// "x,y[,z],kappa_hat,worst_s,ball_radius" joined on the boundary cell;
/// ball_radius is nan for points without a profile entry.
std::string regularity_points_csv(const GridSpec& g,
                                  const std::vector<JohnPointRecord>& john,
                                  const InteriorBallProfile& ball);

} // namespace eikjohn
