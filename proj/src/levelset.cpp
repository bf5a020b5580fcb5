#include "eikjohn/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "eikjohn/errors.hpp"
#include "eikjohn/morphology.hpp"

namespace eikjohn {

namespace {

void check_times(const std::vector<double>& times, const char* who) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0) || !std::isfinite(times[i]))
      throw DomainError(std::string(who) + ": times must be positive and finite");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw DomainError(std::string(who) + ": times must be strictly increasing");
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Sublevel sublevel(const SolveResult& result, double t) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw DomainError("sublevel: threshold time must be positive and finite");
  const GridSpec& g = result.u.spec;
  Sublevel s;
  s.t = t;
  s.mask = RegionMask(g);
  for (cell_t c = 0; c < g.cell_count(); ++c)
    if (result.u.at(c) < t) s.mask.set(c, true);
  s.boundary = boundary_cells(s.mask);
  return s;
}

double inner_separation(const SolveResult& result, double r, double t) {
  if (!(r > 0.0) || !(t >= r))
    throw DomainError("inner_separation: need 0 < r <= t");
  const Sublevel sr = sublevel(result, r);
  const Sublevel st = sublevel(result, t);
  if (sr.boundary.empty() || st.boundary.empty())
    throw DomainError("inner_separation: a sublevel boundary is empty");
  const GridField d = distance_transform(sr.boundary);
  double best = std::numeric_limits<double>::infinity();
  for (cell_t c : st.boundary.cells()) best = std::min(best, d.at(c));
  return best;
}

double outer_excess(const SolveResult& result, double r, double t) {
  if (!(r > 0.0) || !(t >= r))
    throw DomainError("outer_excess: need 0 < r <= t");
  const Sublevel sr = sublevel(result, r);
  const Sublevel st = sublevel(result, t);
  if (sr.mask.empty() || st.mask.empty())
    throw DomainError("outer_excess: a sublevel set is empty");
  const GridField d = distance_transform(sr.mask);
  const GridSpec& g = result.u.spec;
  double worst = 0.0;
  for (cell_t c = 0; c < g.cell_count(); ++c)
    if (st.mask.at(c)) worst = std::max(worst, d.at(c));
  return worst;
}

std::vector<EvolutionRow> hausdorff_evolution(const SolveResult& result,
                                              const std::vector<double>& times) {
  check_times(times, "hausdorff_evolution");
  std::vector<EvolutionRow> rows;
  if (times.size() < 2) return rows;

  // The sets are nested (same field, growing threshold), so the Hausdorff
  // distance reduces to the one direction "later set back to earlier set";
  // one distance transform per time instead of one per pair.
  std::vector<Sublevel> subs;
  subs.reserve(times.size());
  for (double t : times) subs.push_back(sublevel(result, t));
  std::vector<GridField> dts;
  dts.reserve(times.size());
  for (const Sublevel& s : subs) {
    if (s.mask.empty())
      throw DomainError("hausdorff_evolution: an empty sublevel set");
    dts.push_back(distance_transform(s.mask));
  }

  const GridSpec& g = result.u.spec;
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (std::size_t j = i + 1; j < times.size(); ++j) {
      double dh = 0.0;
      for (cell_t c = 0; c < g.cell_count(); ++c)
        if (subs[j].mask.at(c)) dh = std::max(dh, dts[i].at(c));
      EvolutionRow row;
      row.r = times[i];
      row.t = times[j];
      row.d_hausdorff = dh;
      row.bound = result.bounds.alpha_hi * (times[j] - times[i]);
      row.margin = row.bound - dh;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string evolution_table_csv(const std::vector<EvolutionRow>& rows) {
  std::string out = "r,t,d_hausdorff,bound,margin\n";
  for (const EvolutionRow& row : rows) {
    out += fmt(row.r) + "," + fmt(row.t) + "," + fmt(row.d_hausdorff) + "," +
           fmt(row.bound) + "," + fmt(row.margin) + "\n";
  }
  return out;
}

double measure_diff(const SolveResult& result, double r, double t) {
  if (!(r > 0.0) || !(t >= r))
    throw DomainError("measure_diff: need 0 < r <= t");
  return measure(sublevel(result, t).mask) - measure(sublevel(result, r).mask);
}

std::vector<MeasureDiffRow> measure_diff_table(const SolveResult& result,
                                               const std::vector<double>& times) {
  check_times(times, "measure_diff_table");
  std::vector<double> measures;
  measures.reserve(times.size());
  for (double t : times) measures.push_back(measure(sublevel(result, t).mask));
  std::vector<MeasureDiffRow> rows;
  for (std::size_t i = 0; i < times.size(); ++i)
    for (std::size_t j = i + 1; j < times.size(); ++j)
      rows.push_back({times[i], times[j], measures[j] - measures[i]});
  return rows;
}

std::string measure_table_csv(const std::vector<MeasureDiffRow>& rows) {
  std::string out = "r,t,diff_measure\n";
  for (const MeasureDiffRow& row : rows)
    out += fmt(row.r) + "," + fmt(row.t) + "," + fmt(row.diff) + "\n";
  return out;
}

HolderFit holder_fit(const SolveResult& result, const std::vector<double>& times) {
  check_times(times, "holder_fit");
  const double min_dt = 5.0 * result.u.spec.h / result.bounds.alpha_lo;

  std::vector<double> measures;
  measures.reserve(times.size());
  for (double t : times) measures.push_back(measure(sublevel(result, t).mask));

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (std::size_t j = i + 1; j < times.size(); ++j) {
      const double dt = times[j] - times[i];
      if (dt < min_dt) continue;  // front moved under five cells: noise-dominated
      const double diff = measures[j] - measures[i];
      if (diff <= 0.0) continue;
      xs.push_back(std::log(dt));
      ys.push_back(std::log(diff));
    }
  }
  if (xs.size() < 6)
    throw DomainError("holder_fit: fewer than six usable time pairs after exclusions");

  const std::size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0.0)
    throw DomainError("holder_fit: degenerate fit, all time gaps equal");

  HolderFit fit;
  fit.mu = sxy / sxx;
  const double logc = my - fit.mu * mx;
  fit.c = std::exp(logc);
  fit.pairs_used = int(n);
  for (std::size_t i = 0; i < n; ++i)
    fit.residual = std::max(fit.residual, std::abs(ys[i] - (logc + fit.mu * xs[i])));
  return fit;
}

}  // namespace eikjohn
