#pragma once
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eikjohn/scenarios.hpp"
#include "eikjohn/solver.hpp"

namespace eikjohn {

/// Outcome of one executable check. not-applicable is first class: checks
/// whose preconditions fail (probe gap too small, disconnected source, ...)
/// report it instead of masquerading as passes.
enum class ClaimStatus { Pass, Fail, NotApplicable };

std::string to_string(ClaimStatus s);

/// One row of evidence for a registered claim. The sign convention is fixed:
/// margin is oriented so that larger is more comfortable and
/// status == Pass  <=>  margin >= -tolerance  (unless NotApplicable).
struct ClaimReport {
    std::string claim_id;
    ClaimStatus status = ClaimStatus::NotApplicable;
    double measured = 0.0;   ///< numeric evidence (worst case over clauses)
    double bound = 0.0;      ///< numeric target the evidence is held against
    double margin = 0.0;     ///< comfort: positive means inside the bound
    double tolerance = 0.0;  ///< slack granted on top of the bound
    double h = 0.0;          ///< grid spacing of the run
    double runtime_s = 0.0;  ///< wall time of the producing check
    std::string scenario;
    std::uint64_t fingerprint = 0;  ///< ScenarioSpec JSON hash
    std::string detail;             ///< which clause / where the worst case sat
};

/// Central slack policy. Distance-type slack scales with h, dimensionless
/// ratio slack is absolute, fits carry their own windows. Overridable per run.
struct Tolerances {
    double value_factor = 3.0;       ///< value sandwich slack: factor * h / alpha_lo
    double shell_factor = 1.0;       ///< inclusion shells, in cell diagonals
    double evolution_factor = 3.0;   ///< separation/excess slack, in cells
    double hausdorff_factor = 2.0;   ///< pairwise Hausdorff slack, in cells
    double kappa_abs = 0.05;         ///< absolute slack on kappa comparisons
    double dual_rel = 0.05;          ///< solver cross-check: relative part
    double dual_h_factor = 5.0;      ///< solver cross-check floor, in cells
    double box_slope_margin = 0.05;  ///< boundary dimension must sit below n by this
    double circle_slope_tol = 0.10;  ///< smooth-reference slope window around 1
    double holder_mu_max = 1.1;      ///< set-growth exponent ceiling
    double holder_residual = 0.2;    ///< max log deviation of the growth fit
};

/// Parse a (possibly partial) JSON object {"value_factor": ..., ...}; fields
/// not present keep their defaults. Unknown keys or malformed JSON throw
/// ConfigError.
Tolerances tolerances_from_json(const std::string& text);

/// The built-in claim registry, in report order. Each id names one checkable
/// statement; bundles are assembled in this order.
const std::vector<std::string>& claim_registry();

/// One-line behavioral description of a registered claim id; throws
/// ConfigError for unknown ids.
std::string claim_description(const std::string& id);

// --- Individual checks -----------------------------------------------------
// Each check stamps scenario name, fingerprint, and h; callers own timing.
// Checks may emit several rows under one claim id (one per clause) and
// aggregate each row's worst case over the tested times.

/// Cellwise sandwich of the value function between the distance to the source
/// scaled by the speed envelope. Rows: "eq:be".
std::vector<ClaimReport> check_value_bounds(const ScenarioSpec& scenario,
                                            const SolveResult& result,
                                            const Tolerances& tol = {});

/// Sublevel sets contain the source dilated by the slow radius and sit inside
/// the source dilated by the fast radius, up to a one-cell shell. Rows:
/// "eq:nelcaso" (violating-cell count beyond the shell, worst time).
std::vector<ClaimReport> check_inclusions(const ScenarioSpec& scenario, const SolveResult& result,
                                          const std::vector<double>& times,
                                          const Tolerances& tol = {});

/// Front speed control between every time pair: inner separation at least
/// alpha_lo*(t-r), outer excess and Hausdorff distance at most alpha_hi*(t-r),
/// within their grid allowances. Rows: "eq:lipschitz" (worst clause, as a
/// ratio of violation to allowance).
std::vector<ClaimReport> check_levelset_evolution(const ScenarioSpec& scenario,
                                                  const SolveResult& result,
                                                  const std::vector<double>& times,
                                                  const Tolerances& tol = {});

/// Twisted-cone certification sweeps at the scenario's john_times. Rows:
/// "eq:CJohn" against the envelope bound (plus a second row for the
/// seed-independent large-t bound when some tested t qualifies), and/or
/// "sec3.1-kappa-growth" (kappa_inf grows with t and clears t/(1+t)).
/// Disconnected or seedless sources yield not-applicable.
std::vector<ClaimReport> check_john(const ScenarioSpec& scenario, const SolveResult& result,
                                    const Tolerances& tol = {});

/// Which refutation family a scenario demonstrates.
enum class CounterexampleKind {
    BallRadius,  ///< fast-column: the 2delta interior ball fails at the apex
    NoBall,      ///< ratio-cone: no interior ball at the apex at any radius
    NoCone       ///< chained cones: no interior cone at the accumulation point
};

/// Options for the trajectory-sampling clause of the BallRadius check.
struct McOptions {
    std::int64_t samples = 100000;
    std::uint64_t seed = 42;
};

/// Negative-space demonstrations. BallRadius emits "sec3.2-ball" rows
/// (probe value, apex ball radius, trajectory avoidance); NoBall emits
/// "sec3.3-cone" rows (ring values, cone absence above the opening, apex ball
/// collapse); NoCone emits "sec3.4-cone" rows (cone absence at the
/// accumulation point, strictly positive certificate there). A scenario that
/// does not match the kind throws ConfigError.
std::vector<ClaimReport> check_counterexample(CounterexampleKind kind,
                                              const ScenarioSpec& scenario,
                                              const SolveResult& result,
                                              const Tolerances& tol = {},
                                              const McOptions& mc = {});

/// Boundary box-counting dimension and set-growth exponent. Rows:
/// "eq:koskela" (slope below n minus the margin for guaranteed seeds; a
/// smooth-reference window row for the disk baseline; a fractal-excess row
/// for the chained-cone scenario against circle_ref), "eq:hoelder" (exponent
/// in (0, mu_max], fit residual within window), "sec3.3-ratio" (set growth
/// rate increases toward the final time). circle_ref is the measured smooth
/// reference slope when available, 1.0 otherwise.
std::vector<ClaimReport> check_dimension_and_holder(const ScenarioSpec& scenario,
                                                    const SolveResult& result,
                                                    const Tolerances& tol = {},
                                                    double circle_ref = 1.0);

/// Independent-solver agreement: cellwise |fmm - dijkstra(order)| within
/// max(dual_rel * value, dual_h_factor * h / alpha_lo). Rows:
/// "oracle:agreement" (worst cell as a ratio of allowance, bound 1).
std::vector<ClaimReport> check_oracle_agreement(const ScenarioSpec& scenario,
                                                const SolveResult& result, int neighbor_order = 3,
                                                const Tolerances& tol = {});

/// Sublevel connectivity transitions for multi-component sources. Rows:
/// "sec3.1-disconnect" (component counts at the recorded early/late times).
std::vector<ClaimReport> check_disconnection(const ScenarioSpec& scenario,
                                             const SolveResult& result,
                                             const Tolerances& tol = {});

// --- Suite orchestration ----------------------------------------------------

struct SuiteOptions {
    Tolerances tol;
    std::optional<std::string> only_claim;  ///< run just this claim id (must be registered)
    McOptions mc;
    int oracle_order = 3;
    bool deterministic_output = false;  ///< zero runtimes in serialized output
};

/// All claim rows for one scenario at one resolution.
struct ScenarioRunReport {
    std::string scenario;
    double h = 0.0;
    std::uint64_t fingerprint = 0;
    std::vector<ClaimReport> claims;  ///< assembled in registry order
};

struct SuiteBundle {
    std::vector<ScenarioRunReport> runs;
    /// 0 all pass or not-applicable, 1 any fail. (Configuration problems
    /// throw ConfigError before a bundle exists; callers map that to 2.)
    int exit_code() const;
};

/// Build each named scenario at each resolution, solve it, and execute every
/// check its claim list registers, in registry order. Individual check
/// failures are recorded, not thrown; configuration problems (unknown
/// scenario or claim id) throw ConfigError.
SuiteBundle run_suite(const std::vector<std::string>& scenario_names,
                      const std::vector<double>& resolutions, const SuiteOptions& opts = {});

/// Machine summary: {"runs":[{"scenario","h","fingerprint","claims":[{"id",
/// "status","measured","bound","margin","tolerance","runtime_s","detail"}]}]}.
/// Deterministic output zeroes runtime_s. Non-finite numbers are clamped to
/// +-1e300 so the document stays strict JSON.
std::string bundle_to_json(const SuiteBundle& bundle, bool deterministic_output = false);

/// Human summary: one aligned text row per claim row.
std::string bundle_to_table(const SuiteBundle& bundle);

} // namespace eikjohn
