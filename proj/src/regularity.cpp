#include "eikjohn/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <utility>

#include "eikjohn/errors.hpp"
#include "eikjohn/morphology.hpp"
#include "eikjohn/rng.hpp"

namespace eikjohn {

namespace {

constexpr double kPi = 3.14159265358979323846;

double domain_extent(const GridSpec& g) {
  double e = 0.0;
  for (int d = 0; d < g.dim; ++d) e = std::max(e, double(g.shape[d]) * g.h);
  return e;
}

RegionMask complement_of(const RegionMask& mask) {
  RegionMask comp(mask.spec);
  for (cell_t c = 0; c < mask.spec.cell_count(); ++c) comp.set(c, !mask.at(c));
  return comp;
}

/// Certificate against a precomputed clearance field (shared across a sweep).
JohnCertificate certify(const SolveResult& result, const Sublevel& sub,
                        const JohnSeed& seed, const Vec& x,
                        const GridField& clearance) {
  const GridSpec& g = result.u.spec;
  if (!g.covers(x))
    throw DomainError("john_certificate: point lies outside the grid");
  if (!sub.mask.at(g.nearest_cell(x)))
    throw DomainError("john_certificate: point lies outside the sublevel set");

  JohnCertificate cert;
  cert.x = x;
  cert.center = seed.center;

  if (dist(x, seed.center) <= 1e-12) {
    cert.curve = Curve({x});
    cert.kappa_hat = 1.0;
    cert.worst_s = 0.0;
    return cert;
  }

  Curve descent;
  Vec landing = x;
  if (!result.source.at(g.nearest_cell(x))) {
    descent = optimal_curve(result, x);
    landing = descent.pts.back();
    if (!result.source.at(g.nearest_cell(landing)))
      throw Error("john_certificate: descent curve did not land in the source");
  }
  Curve tail = seed.curve_provider(landing);
  if (tail.pts.empty() || dist(tail.pts.back(), seed.center) > g.h)
    throw Error("john_certificate: seed curve does not reach the center");
  cert.curve = descent.pts.empty() ? std::move(tail) : descent.joined(tail);

  const double total = cert.curve.length();
  if (total <= 0.0) {
    cert.kappa_hat = 1.0;
    cert.worst_s = 0.0;
    return cert;
  }

  // Sample every vertex plus every half cell of arc length.
  std::vector<double> samples = cert.curve.cum;
  const double step = g.h / 2.0;
  for (double s = step; s < total; s += step) samples.push_back(s);
  samples.push_back(total);
  std::sort(samples.begin(), samples.end());

  double kappa = std::numeric_limits<double>::infinity();
  double worst = 0.0;
  double prev = -1.0;
  for (double s : samples) {
    if (s <= 1e-12 || s == prev) continue;
    prev = s;
    const double ratio = clearance.interp(cert.curve.at(s)) / s;
    if (ratio < kappa) {
      kappa = ratio;
      worst = s;
    }
  }
  cert.kappa_hat = std::min(1.0, kappa);
  cert.worst_s = worst;
  return cert;
}

/// Evenly spread unit directions over the sphere (golden-angle lattice).
std::vector<Vec> sphere_axes(int n) {
  std::vector<Vec> axes;
  axes.reserve(std::size_t(n));
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (double(i) + 0.5) / double(n);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * double(i);
    axes.push_back({rho * std::cos(phi), rho * std::sin(phi), z});
  }
  return axes;
}

/// Orthonormal pair completing `a` to a right-handed frame.
std::pair<Vec, Vec> frame_of(const Vec& a) {
  Vec up = std::abs(a[2]) < 0.9 ? Vec{0, 0, 1} : Vec{1, 0, 0};
  Vec e1 = normalized(Vec{a[1] * up[2] - a[2] * up[1], a[2] * up[0] - a[0] * up[2],
                          a[0] * up[1] - a[1] * up[0]});
  Vec e2{a[1] * e1[2] - a[2] * e1[1], a[2] * e1[0] - a[0] * e1[2],
         a[0] * e1[1] - a[1] * e1[0]};
  return {e1, e2};
}

}  // namespace

void validate_seed(const JohnSeed& seed, const RegionMask& source) {
  if (!(seed.kappa0 >= 0.0) || !(seed.kappa0 <= 1.0))
    throw ValidationError("seed: kappa0 must lie in [0, 1]");
  if (!(seed.inner_radius >= 0.0) || !std::isfinite(seed.inner_radius))
    throw ValidationError("seed: inner_radius must be a finite nonnegative length");
  if (!seed.curve_provider)
    throw ValidationError("seed: missing curve provider");
  const GridSpec& g = source.spec;
  if (!g.covers(seed.center) || !source.at(g.nearest_cell(seed.center)))
    throw ValidationError("seed: center must lie inside the source region");
  if (seed.inner_radius > 0.0) {
    const double r = seed.inner_radius - g.h;  // one cell of slack
    for (cell_t c = 0; c < g.cell_count(); ++c) {
      if (!source.at(c) && dist(g.center(c), seed.center) <= r)
        throw ValidationError("seed: declared inner ball sticks out of the source");
    }
  }
}

GridField boundary_clearance(const Sublevel& sub) {
  const RegionMask comp = complement_of(sub.mask);
  if (comp.empty())
    throw DomainError("boundary_clearance: the sublevel set covers the whole grid");
  return distance_transform(comp);
}

JohnCertificate john_certificate(const SolveResult& result, const Sublevel& sub,
                                 const JohnSeed& seed, const Vec& x) {
  validate_seed(seed, result.source);
  const GridField clearance = boundary_clearance(sub);
  return certify(result, sub, seed, x, clearance);
}

RegularityReport john_sweep(const SolveResult& result, const Sublevel& sub,
                            const JohnSeed& seed, const SweepStrategy& strategy) {
  validate_seed(seed, result.source);
  std::vector<cell_t> pts = sub.boundary.cells();
  if (pts.empty()) throw DomainError("john_sweep: the sublevel boundary is empty");

  if (strategy.kind == SweepStrategy::Kind::RandomSubset &&
      cell_t(pts.size()) > cell_t(strategy.count)) {
    if (strategy.count <= 0) throw DomainError("john_sweep: sample count must be positive");
    SplitMix64 rng(strategy.seed);
    for (std::size_t i = 0; i < std::size_t(strategy.count); ++i) {
      const std::size_t j = i + std::size_t(rng.next_below(pts.size() - i));
      std::swap(pts[i], pts[j]);
    }
    pts.resize(std::size_t(strategy.count));
    std::sort(pts.begin(), pts.end());
  }

  const GridSpec& g = result.u.spec;
  const GridField clearance = boundary_clearance(sub);

  std::vector<JohnPointRecord> records(pts.size());
  std::string first_error;
  bool failed = false;
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < std::int64_t(pts.size()); ++i) {
    try {
      const JohnCertificate cert =
          certify(result, sub, seed, g.center(pts[std::size_t(i)]), clearance);
      records[std::size_t(i)] = {cert.x, cert.kappa_hat, cert.worst_s};
    } catch (const std::exception& e) {
#pragma omp critical
      if (!failed) {
        failed = true;
        first_error = e.what();
      }
    }
  }
  if (failed)
    throw Error("john_sweep: a certificate failed: " + first_error);

  RegularityReport report;
  report.t = sub.t;
  report.john_points = std::move(records);
  report.kappa_inf = std::numeric_limits<double>::infinity();
  for (const JohnPointRecord& rec : report.john_points)
    report.kappa_inf = std::min(report.kappa_inf, rec.kappa_hat);

  const MetricBounds& b = result.bounds;
  report.large_t_bound = b.alpha_lo / (2.0 * b.alpha_hi + b.alpha_lo);
  if (seed.kappa0 > 0.0) {
    report.kappa_bound = b.alpha_lo * seed.kappa0 / (2.0 * b.alpha_hi + b.alpha_lo);
    if (seed.inner_radius > 0.0)
      report.large_t_applies =
          sub.t > 2.0 * seed.inner_radius / (b.alpha_lo * seed.kappa0);
  }
  report.coarse_grid_warning = g.h > domain_extent(g) / 256.0;
  return report;
}

InteriorBallProfile interior_ball_radius(const Sublevel& sub) {
  if (sub.boundary.empty())
    throw DomainError("interior_ball_radius: the sublevel boundary is empty");
  const GridSpec& g = sub.mask.spec;
  const RegionMask comp = complement_of(sub.mask);
  if (comp.empty())
    throw DomainError("interior_ball_radius: the mask covers the whole grid");
  const GridField depth = distance_transform(comp);
  const double h = g.h;

  // Keep only cells whose inscribed ball is not swallowed by a face
  // neighbor's (clearance larger by a full step); the swallowing chain
  // preserves both the reach condition and the maximum.
  std::vector<cell_t> skeleton;
  for (cell_t c = 0; c < g.cell_count(); ++c) {
    if (!sub.mask.at(c)) continue;
    const auto ic = g.coords(c);
    const double dc = depth.at(c);
    bool dominated = false;
    for (int ax = 0; ax < g.dim && !dominated; ++ax) {
      for (int sgn = -1; sgn <= 1 && !dominated; sgn += 2) {
        cell_t i = ic[0], j = ic[1], k = ic[2];
        (ax == 0 ? i : ax == 1 ? j : k) += sgn;
        if (!g.in_bounds(i, j, k)) continue;
        if (depth.at(g.index(i, j, k)) >= dc + h * (1.0 - 1e-9)) dominated = true;
      }
    }
    if (!dominated) skeleton.push_back(c);
  }
  std::sort(skeleton.begin(), skeleton.end(), [&](cell_t a, cell_t b) {
    const double da = depth.at(a), db = depth.at(b);
    return da != db ? da > db : a < b;
  });

  InteriorBallProfile profile;
  profile.boundary = sub.boundary.cells();
  profile.radius.assign(profile.boundary.size(), -1.0);

  std::vector<std::size_t> remaining(profile.boundary.size());
  for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;
  std::vector<std::size_t> keep;
  for (cell_t y : skeleton) {
    if (remaining.empty()) break;
    const double ry = depth.at(y);
    const Vec py = g.center(y);
    const double reach = ry + h * (1.0 + 1e-9);
    const double reach_sq = reach * reach;
    keep.clear();
    for (std::size_t idx : remaining) {
      const Vec px = g.center(profile.boundary[idx]);
      double d2 = 0.0;
      for (int dd = 0; dd < 3; ++dd) d2 += (px[dd] - py[dd]) * (px[dd] - py[dd]);
      if (d2 <= reach_sq)
        profile.radius[idx] = ry;
      else
        keep.push_back(idx);
    }
    remaining.swap(keep);
  }
  // Every boundary cell reaches itself, so leftovers can only be numerical;
  // fall back to the cell's own clearance.
  for (std::size_t idx : remaining)
    profile.radius[idx] = depth.at(profile.boundary[idx]);

  profile.global_inf = std::numeric_limits<double>::infinity();
  for (double r : profile.radius)
    profile.global_inf = std::min(profile.global_inf, r);
  return profile;
}

ConeTestResult cone_test(const Sublevel& sub, const Vec& x, double opening,
                         int axis_samples, double depth) {
  const GridSpec& g = sub.mask.spec;
  if (!(opening > 0.0) || !(opening < kPi / 2.0))
    throw DomainError("cone_test: opening must lie in (0, pi/2)");
  if (axis_samples <= 0) axis_samples = g.dim == 2 ? 64 : 162;
  if (depth <= 0.0) depth = 0.2 * domain_extent(g);

  ConeTestResult out;
  out.opening = opening;
  out.depth = depth;
  out.axes_tried = axis_samples;

  const double h = g.h;
  const double half_diag = h * std::sqrt(double(g.dim)) / 2.0;
  const auto quantization = [&](double r) {
    return std::asin(std::min(1.0, half_diag / r));
  };
  const auto inside = [&](const Vec& p) {
    return g.covers(p) && sub.mask.at(g.nearest_cell(p));
  };

  std::vector<Vec> axes;
  if (g.dim == 2) {
    axes.reserve(std::size_t(axis_samples));
    for (int m = 0; m < axis_samples; ++m) {
      const double th = 2.0 * kPi * double(m) / double(axis_samples);
      axes.push_back({std::cos(th), std::sin(th), 0.0});
    }
  } else {
    axes = sphere_axes(axis_samples);
  }

  std::int64_t best_samples = 0;
  for (const Vec& a : axes) {
    bool ok = true;
    std::int64_t tested = 0;
    for (double r = h / 2.0; r <= depth && ok; r += h / 2.0) {
      const double slack = quantization(r);
      if (slack >= opening) continue;  // ring below resolution, untestable
      const double phi_max = opening - slack;
      if (g.dim == 2) {
        const double dphi = std::min(phi_max, h / (2.0 * r));
        const std::int64_t steps = std::int64_t(std::ceil(phi_max / dphi));
        for (std::int64_t k = -steps; k <= steps && ok; ++k) {
          const double phi = std::clamp(double(k) * dphi, -phi_max, phi_max);
          const double th = std::atan2(a[1], a[0]) + phi;
          ++tested;
          if (!inside({x[0] + r * std::cos(th), x[1] + r * std::sin(th), 0.0}))
            ok = false;
        }
      } else {
        const auto [e1, e2] = frame_of(a);
        const double dpsi = std::min(phi_max, h / (2.0 * r));
        const std::int64_t rings = std::int64_t(std::ceil(phi_max / dpsi));
        for (std::int64_t q = 0; q <= rings && ok; ++q) {
          const double psi = std::min(double(q) * dpsi, phi_max);
          const double ring_r = r * std::sin(psi);
          const std::int64_t nphi =
              q == 0 ? 1
                     : std::max<std::int64_t>(
                           1, std::int64_t(std::ceil(2.0 * kPi * ring_r / (h / 2.0))));
          for (std::int64_t m = 0; m < nphi && ok; ++m) {
            const double az = 2.0 * kPi * double(m) / double(nphi);
            Vec dir;
            for (int dd = 0; dd < 3; ++dd)
              dir[dd] = std::cos(psi) * a[dd] +
                        std::sin(psi) * (std::cos(az) * e1[dd] + std::sin(az) * e2[dd]);
            ++tested;
            if (!inside({x[0] + r * dir[0], x[1] + r * dir[1], x[2] + r * dir[2]}))
              ok = false;
          }
        }
      }
    }
    best_samples = std::max(best_samples, tested);
    if (ok && tested > 0) {
      out.found = true;
      out.axis = a;
      out.samples_tested = tested;
      return out;
    }
  }
  out.samples_tested = best_samples;
  return out;
}

DimensionFit box_counting_dimension(const RegionMask& boundary,
                                    const std::vector<double>& scales) {
  if (boundary.count() < 2)
    throw DomainError("box_counting_dimension: boundary has fewer than two cells");
  if (scales.size() < 4)
    throw DomainError("box_counting_dimension: need at least four scales");
  const GridSpec& g = boundary.spec;
  std::vector<double> eps(scales);
  std::sort(eps.begin(), eps.end());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] >= 2.0 * g.h * (1.0 - 1e-12)))
      throw DomainError("box_counting_dimension: scales must be at least 2h");
    if (i > 0 && eps[i] == eps[i - 1])
      throw DomainError("box_counting_dimension: scales must be distinct");
  }

  Vec lo = g.origin;
  for (int d = 0; d < g.dim; ++d) lo[d] -= g.h / 2.0;
  const std::vector<cell_t> cells = boundary.cells();

  DimensionFit fit;
  fit.scales = eps;
  std::vector<std::int64_t> keys(cells.size());
  for (double e : eps) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const Vec p = g.center(cells[i]);
      std::int64_t key = 0;
      for (int d = 0; d < g.dim; ++d) {
        const std::int64_t b = std::int64_t(std::floor((p[d] - lo[d]) / e));
        key = (key << 21) | b;
      }
      keys[i] = key;
    }
    std::sort(keys.begin(), keys.end());
    fit.counts.push_back(
        std::unique(keys.begin(), keys.end()) - keys.begin());
  }

  const std::size_t n = eps.size();
  double mx = 0.0, my = 0.0;
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = std::log(1.0 / eps[i]);
    ys[i] = std::log(double(fit.counts[i]));
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
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < n; ++i)
    fit.residual =
        std::max(fit.residual, std::abs(ys[i] - (fit.intercept + fit.slope * xs[i])));
  return fit;
}

std::vector<double> dyadic_scales(const GridSpec& g) {
  std::vector<double> out;
  const double cap = domain_extent(g) / 8.0;
  for (double e = 2.0 * g.h; e <= cap; e *= 2.0) out.push_back(e);
  return out;
}

std::string regularity_points_csv(const GridSpec& g,
                                  const std::vector<JohnPointRecord>& john,
                                  const InteriorBallProfile& ball) {
  const auto fmt = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::string out = g.dim == 2 ? "x,y,kappa_hat,worst_s,ball_radius\n"
                               : "x,y,z,kappa_hat,worst_s,ball_radius\n";
  for (const JohnPointRecord& rec : john) {
    const cell_t c = g.nearest_cell(rec.x);
    const auto it =
        std::lower_bound(ball.boundary.begin(), ball.boundary.end(), c);
    const double radius = (it != ball.boundary.end() && *it == c)
                              ? ball.radius[std::size_t(it - ball.boundary.begin())]
                              : std::numeric_limits<double>::quiet_NaN();
    out += fmt(rec.x[0]) + "," + fmt(rec.x[1]);
    if (g.dim == 3) out += "," + fmt(rec.x[2]);
    out += "," + fmt(rec.kappa_hat) + "," + fmt(rec.worst_s) + "," + fmt(radius) + "\n";
  }
  return out;
}

}  // namespace eikjohn
