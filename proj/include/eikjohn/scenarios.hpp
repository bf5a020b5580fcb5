#pragma once
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eikjohn/grid.hpp"
#include "eikjohn/metric.hpp"
#include "eikjohn/regularity.hpp"

namespace eikjohn {

/// A fully built problem instance: speed field, source set, default time
/// grids, an optional John seed, and the list of claim ids the instance is
/// designed to exercise. Construction is pure and deterministic.
struct ScenarioSpec {
    std::string name;
    std::map<std::string, double> params; ///< every numeric choice, for fingerprinting
    GridSpec grid;
    CostModel model;
    RegionMask source;                 ///< the set K (u = 0 there)
    std::optional<JohnSeed> seed;      ///< present only for connected K with a usable center
    std::vector<std::string> claims;   ///< claim ids this scenario supports
    std::vector<double> times;         ///< default sublevel thresholds
    std::vector<double> john_times;    ///< thresholds for John sweeps (empty: no sweep)
    std::vector<double> holder_times;  ///< thresholds for the power-law fit (empty: skip)
    std::vector<std::string> notes;    ///< recorded modelling choices and measured field facts

    /// Canonical JSON {"name","params","grid"} used for fingerprints and files.
    std::string to_json() const;
    /// FNV-1a hash of to_json().
    std::uint64_t fingerprint() const;
};

/// Shapes for the constant-speed baseline family.
enum class BaselineShape { Disk, Square, AnnulusSegment };

/// Kinds for the degenerate-source family.
enum class SharpKind { Segment, Slab, TwoBalls };

/// Constant speed 1 on [-4,4]^2 (or larger if needed) with an analytic source:
/// disk (radius r, John constant 1), square (half-side r, John constant
/// 1/sqrt(2)), or a 270-degree annular segment (radii [r, 2r], bent seed
/// curves, no claimed John constant).
ScenarioSpec scenario_eikonal_baseline(BaselineShape shape, double radius, double h);

/// Degenerate/disconnected sources at constant speed 1:
///  - Segment: K is a segment of half-length 1; the John constant of the
///    stadium-shaped sublevel degenerates like t/(1+t) as t -> 0.
///  - Slab: a wide rectangle standing in for an infinite slab of half-height 1
///    (the grid cannot hold an unbounded set; the measured constants match the
///    slab's near the center).
///  - TwoBalls: two balls of radius 0.5 with gap 2 between them; sublevels
///    stay disconnected until the fronts meet at t = gap/2.
ScenarioSpec scenario_sharp_k(SharpKind kind, double h);

/// Fast vertical column of width delta blended over (delta, (1+eps)*delta)
/// into a slow exterior. The probe point x0 = (2*delta, alpha_hi*t - 2*delta)
/// sits on the ball of radius 2*delta touching the front's apex from inside
/// and is certified unreachable before t, so no interior ball of radius
/// 2*delta fits at the apex.
/// Throws ConfigError when alpha_hi <= sqrt(5)*alpha_lo ("eq:condition") or on
/// resolution shortfall; a violated probe inequality ("eq:deltat",
/// (alpha_hi-alpha_lo)*t <= 2*delta) is recorded in params, not thrown, so the
/// dependent claim can report not-applicable.
ScenarioSpec scenario_ex1(double delta, double eps, double alpha_lo, double alpha_hi,
                          double t_probe, double h);

/// Resolution presets (delta, eps, t_probe) for the column scenario.
struct Ex1Preset {
    double delta;
    double eps;
    double t_probe;
};
Ex1Preset ex1_preset(double h);

/// The column speed field of scenario_ex1 paired with a disk source of radius
/// 0.5 and John constant 1; exercises the certified bound
/// alpha_lo/(2*alpha_hi + alpha_lo) in a genuinely variable medium.
ScenarioSpec scenario_ex1_john(double h);

/// Ratio-cone field on the strip {y < alpha_hi*T}: fast inside the cone of
/// opening beta about the upward axis through the apex (0, alpha_hi*T), slow
/// outside opening (1+eps)*beta, linear blend between. Cells at or above the
/// apex height are impassable. The front reaches the apex exactly at T and the
/// sublevel is locally contained in the cone of opening eta.
/// Away from the cone, a mirrored pair of binary trees of tapered fast tubes
/// ("grove") grows out of the source top: level-k branches have length
/// alpha_hi*(1-lambda)*T*lambda^k, so the front finishes traversing the tree
/// exactly at T and the boundary keeps gaining wet branch collars all the way
/// to the final time. This makes |U_T \ U_r|/(T-r) grow as r -> T and gives
/// the late boundary a covering-count slope well above one inside the grove
/// window. grove_levels: -1 = resolution preset (deepest level whose tube
/// still spans ~2.4 cells), 0 = no grove, otherwise the deepest level index.
/// Throws ConfigError on angle violations (including "eq:beta",
/// sin(eta-beta)/cos(beta) >= alpha_lo/alpha_hi) or resolution shortfall.
ScenarioSpec scenario_ex3(double beta, double eta, double eps, double T, double alpha_lo,
                          double alpha_hi, double h, int grove_levels = -1);

/// Resolution preset for the blend width parameter eps.
double ex3_eps_preset(double h);

/// Deepest grove level whose tube half-width rho0*lambda^k still spans at
/// least 1.2 cells, clamped to [3, 9].
int ex3_grove_preset(double rho0, double lambda, double h);

/// Chained-cone fractal: a fast channel made of scaled copies of a two-lobe
/// set Q (a cone-sphere hull plus a half-scale rotated copy), each copy a
/// quarter the size of the last, accumulating at x* = (2/3, 4/3). Outside the
/// channel the medium is slow; the blend uses the distance-quotient
/// (alpha_hi*d_slow + alpha_lo*d_fast)/(d_slow + d_fast). The arrival time T*
/// at x* is measured from the solve, not assumed.
/// depth is the index of the deepest copy (copies 0..depth); ConfigError when
/// depth is outside [2,6], angles are invalid, or the second-deepest copy is
/// under-resolved (gate: 4^(1-depth)*(1+3*tan(beta)) >= 4h), naming the
/// required h.
ScenarioSpec scenario_ex4(double beta, double eta, double eps, int depth, double alpha_lo,
                          double alpha_hi, double h);

/// Largest depth in [2,6] passing the resolution gate at this h (ConfigError
/// if even depth 2 fails).
int ex4_depth_preset(double beta, double h);

/// Adversarial instances for mutation-sensitivity tests. Both declare the
/// envelope (1,1) while the field violates it; well-behaved checks must fail.
///  - "fast": the field is uniformly 1.25, so fronts outrun every declared bound.
///  - "fjord": a slow wedge (speed 0.15) cut into a unit medium carves a deep
///    notch into the sublevels and collapses the measured John constant.
ScenarioSpec scenario_adversarial(const std::string& kind, double h);

/// Build any scenario by registry name, applying per-resolution presets and
/// then the explicit parameter overrides. Unknown names or parameters throw
/// ConfigError. Known names: baseline_disk, baseline_square,
/// baseline_annulus_segment, sharp_segment, sharp_slab, sharp_two_balls, ex1,
/// ex1_john, ex3, ex4, adversarial_fast, adversarial_fjord.
ScenarioSpec scenario_by_name(const std::string& name, double h,
                              const std::map<std::string, double>& overrides = {});

/// All registry names in build order.
std::vector<std::string> scenario_names();

/// Load {"name","params","grid":{"h":...}} produced by ScenarioSpec::to_json.
ScenarioSpec scenario_from_json(const std::string& json_text);

/// Membership test for the hull of two balls (used by the fractal builder and
/// its tests): true when p lies in conv(B_r0(c0) u B_r1(c1)).
bool cone_sphere_contains(const Vec& p, const Vec& c0, double r0, const Vec& c1, double r1);

/// Membership in the chained-cone union with the given opening, truncated at
/// the given depth (copies 0..depth).
bool chained_cones_contain(const Vec& p, double opening, int depth);

} // namespace eikjohn
