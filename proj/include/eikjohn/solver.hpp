#pragma once
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "eikjohn/grid.hpp"
#include "eikjohn/metric.hpp"

namespace eikjohn {

/// Sentinel rank for cells never accepted by a solve.
inline constexpr std::uint32_t kNotAccepted = 0xFFFFFFFFu;

/// Value function produced by a solver, with its acceptance sequence and the
/// inputs needed to audit it. `model` is a non-owning pointer to the cost
/// model the solve ran against; it is null after loading from disk.
struct SolveResult {
    GridField u;                               ///< travel time; +inf where unreached
    std::vector<std::uint32_t> accepted_order; ///< acceptance rank per cell, kNotAccepted if none
    RegionMask source;                         ///< the seed set K (u = 0 there)
    MetricBounds bounds;                       ///< speed envelope of the model
    std::string solver;                        ///< "fmm" or "dijkstra"
    const CostModel* model = nullptr;
};

struct BacktrackOptions {
    double step = 0.0;               ///< descent step; 0 means h/2
    double max_length_factor = 1.05; ///< curve length cap: factor * alpha_hi * u(x)
};

/// First-order upwind fast marching (isotropic models only): solves the
/// discrete eikonal system |grad_h u| = 1/alpha(x) outward from the source,
/// cells accepted in nondecreasing value order, heap ties broken by cell
/// index. Cells with value above `stop_above` are left unreached (+inf),
/// which truncates the solve cheaply when only a sublevel set is needed.
SolveResult fast_march(const CostModel& model, const RegionMask& source,
                       double stop_above = std::numeric_limits<double>::infinity());

/// Independent cross-check: exact shortest-path distance on the cell graph
/// whose edges connect each cell to its stencil neighbors (order 1/2/3 =
/// increasing angular resolution; 4/8/16 neighbors in 2D), with edge cost
/// sigma averaged trapezoidally between the endpoint cells. Handles both
/// isotropic and sampled-profile models. Over-approximates the continuum
/// value by at most the stencil's angular-resolution factor.
SolveResult dijkstra_oracle(const CostModel& model, const RegionMask& source, int neighbor_order,
                            double stop_above = std::numeric_limits<double>::infinity());

/// Inner approximation of the reachable set at time t: integrates `samples`
/// random admissible trajectories (speed alpha(y), direction piecewise
/// constant on 32 random switching intervals, explicit Euler with step
/// h/(2*alpha_hi)) and returns the source plus every cell some trajectory
/// visits strictly before time t. Deterministic given the seed, regardless
/// of thread count.
RegionMask monte_carlo_reachability(const CostModel& model, const RegionMask& source, double t,
                                    std::int64_t samples, std::uint64_t seed);

/// Backtrack one cost-minimizing curve from x to the source by steepest
/// descent on the interpolated value function. The value decreases strictly
/// along the returned polyline, which ends inside the source mask. Throws
/// BacktrackError on descent stagnation or when the length cap
/// (max_length_factor * alpha_hi * u(x)) is exceeded.
Curve optimal_curve(const SolveResult& result, const Vec& x, const BacktrackOptions& opts = {});

/// Travel cost of a polyline under the model: per segment, length times the
/// average of the endpoint cost rates (trapezoidal).
double curve_cost(const CostModel& model, const Curve& curve);

/// Persist a result as <base>.u.json/.u.bin (value field), <base>.source.json/
/// .source.bin (seed mask), and a sidecar <base>.meta.json holding
/// {"alpha_lo","alpha_hi","source_file","solver","h"}. `base` may include a
/// directory prefix. Returns the sidecar path.
std::string save_solve_result(const SolveResult& result, const std::string& base);
/// Load a result saved by save_solve_result (pass the sidecar path or the base).
SolveResult load_solve_result(const std::string& meta_path);

} // namespace eikjohn
