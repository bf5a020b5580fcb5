#pragma once
#include <string>
#include <vector>

#include "eikjohn/grid.hpp"
#include "eikjohn/solver.hpp"

namespace eikjohn {

/// Open sublevel set {u < t} of a solved value function together with its
/// inner boundary layer. Masks are nested monotonically in t and always
/// contain the source cells (where u = 0).
struct Sublevel {
  double t = 0.0;
  RegionMask mask;      ///< cells with u < t (strict)
  RegionMask boundary;  ///< inner boundary layer of mask
};

/// Threshold the value function at t > 0. Strict inequality on cell-center
/// samples keeps the extracted set inside {u < t} exactly.
/// Throws DomainError for t <= 0.
Sublevel sublevel(const SolveResult& result, double t);

/// Smallest gap between the two fronts: inf over boundary cells of {u < t}
/// of the distance to the boundary of {u < r}. Requires 0 < r <= t; throws
/// DomainError otherwise or when either boundary is empty.
double inner_separation(const SolveResult& result, double r, double t);

/// Largest overshoot of the later set past the earlier one: sup over cells
/// of {u < t} of the distance to {u < r}. Requires 0 < r <= t.
double outer_excess(const SolveResult& result, double r, double t);

/// One pairwise comparison of sublevel sets at times r < t.
struct EvolutionRow {
  double r = 0.0;
  double t = 0.0;
  double d_hausdorff = 0.0;  ///< Hausdorff distance between the two sets
  double bound = 0.0;        ///< alpha_hi * (t - r)
  double margin = 0.0;       ///< bound - d_hausdorff
};

/// Hausdorff distance between the sublevel sets of every time pair, against
/// the speed-envelope bound alpha_hi * (t - r). Times must be positive and
/// strictly increasing; fewer than two times yield an empty table. Rows are
/// ordered by (earlier index, later index).
std::vector<EvolutionRow> hausdorff_evolution(const SolveResult& result,
                                              const std::vector<double>& times);

/// "r,t,d_hausdorff,bound,margin" with round-trip precision.
std::string evolution_table_csv(const std::vector<EvolutionRow>& rows);

/// |{u < t}| - |{u < r}| in world measure; equals the measure of the set
/// difference because sublevels are nested. Requires 0 < r <= t.
double measure_diff(const SolveResult& result, double r, double t);

/// One measured set-growth pair.
struct MeasureDiffRow {
  double r = 0.0;
  double t = 0.0;
  double diff = 0.0;  ///< measure of {u < t} minus measure of {u < r}
};

/// Set-growth table over every time pair, same ordering and validation as
/// hausdorff_evolution.
std::vector<MeasureDiffRow> measure_diff_table(const SolveResult& result,
                                               const std::vector<double>& times);

/// "r,t,diff_measure" with round-trip precision.
std::string measure_table_csv(const std::vector<MeasureDiffRow>& rows);

/// Power-law fit of set growth: |{u < t} \ {u < r}| ~ c * (t - r)^mu.
struct HolderFit {
  double c = 0.0;         ///< fitted coefficient
  double mu = 0.0;        ///< fitted exponent
  double residual = 0.0;  ///< max |log diff - log fit| over the used pairs
  int pairs_used = 0;
};

/// Least-squares fit of log(measure difference) against log(t - r) over the
/// pairs formed from `times`. Pairs whose slowest-case front displacement is
/// under five cells (t - r < 5h/alpha_lo) and pairs with zero measured
/// difference are excluded; fewer than six surviving pairs throws DomainError.
HolderFit holder_fit(const SolveResult& result, const std::vector<double>& times);

} // namespace eikjohn
