#include "eikjohn/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "eikjohn/errors.hpp"

namespace eikjohn {

static const double kInf = std::numeric_limits<double>::infinity();

void MetricBounds::validate() const {
    if (!(alpha_lo > 0) || !(alpha_hi >= alpha_lo) || !std::isfinite(alpha_hi))
        throw ValidationError("speed envelope must satisfy 0 < alpha_lo <= alpha_hi < inf");
}

const GridSpec& CostModel::grid() const {
    return kind == CostKind::IsotropicEikonal ? alpha.spec
                                              : (domain ? domain->spec : alpha.spec);
}

double CostModel::speed(cell_t c) const {
    if (kind != CostKind::IsotropicEikonal)
        throw UnsupportedModelError("per-cell scalar speed is only defined for isotropic models");
    return alpha.at(c);
}

namespace {

// Distance from the origin to the segment [p, q] (2D), the inradius of one
// polygon edge of the sampled speed ball.
double edge_min_radius(const Vec& p, const Vec& q) {
    const Vec d = q - p;
    const double len2 = dot(d, d);
    if (len2 <= 0) return norm(p);
    const double t = std::clamp(-dot(p, d) / len2, 0.0, 1.0);
    return norm(p + t * d);
}

} // namespace

double CostModel::speed_in_dir(cell_t c, const Vec& dir) const {
    const double n = norm(dir);
    if (!(n > 0)) throw DomainError("speed_in_dir: zero direction");
    if (kind == CostKind::IsotropicEikonal) return alpha.at(c);

    const std::size_t M = fan.size();
    const bool per_cell = fan_speeds.size() != M;
    const std::size_t base = per_cell ? std::size_t(c) * M : 0;

    if (grid().dim == 2) {
        // Piecewise-linear ball: v = a*d_i + b*d_j for the bracketing fan pair,
        // sigma = a*sigma_i + b*sigma_j; equivalently solve for the blend here.
        const double th = std::atan2(dir[1], dir[0]);
        // fan is sorted by angle in [-pi, pi); find the bracketing pair.
        std::size_t hi = 0;
        while (hi < M && std::atan2(fan[hi][1], fan[hi][0]) <= th) ++hi;
        const std::size_t j = hi % M;          // first direction with angle > th (wraps)
        const std::size_t i = (j + M - 1) % M; // its predecessor
        const Vec di = fan[i], dj = fan[j];
        const double det = di[0] * dj[1] - di[1] * dj[0];
        const Vec v{dir[0] / n, dir[1] / n, 0.0};
        double a, b;
        if (std::abs(det) < 1e-14) { // degenerate bracket (e.g. M == 1)
            a = 1.0; b = 0.0;
        } else {
            a = (v[0] * dj[1] - v[1] * dj[0]) / det;
            b = (di[0] * v[1] - di[1] * v[0]) / det;
            a = std::max(a, 0.0);
            b = std::max(b, 0.0);
        }
        const double si = 1.0 / fan_speeds[base + i];
        const double sj = 1.0 / fan_speeds[base + j];
        const double sig = a * si + b * sj; // cost rate of the unit vector v
        if (!(sig > 0)) throw ValidationError("degenerate direction fan");
        return 1.0 / sig;
    }

    // 3D: nearest fan direction (piecewise-conical profile; exactly homogeneous).
    std::size_t best = 0;
    double best_dot = -kInf;
    for (std::size_t m = 0; m < M; ++m) {
        const double d = dot(fan[m], dir) / n;
        if (d > best_dot) { best_dot = d; best = m; }
    }
    return fan_speeds[base + best];
}

double CostModel::sigma_at_cell(cell_t c, const Vec& v) const {
    const double n = norm(v);
    if (n == 0.0) return 0.0;
    if (!passable(c)) return kInf;
    return n / speed_in_dir(c, v);
}

namespace {

void check_domain(const GridSpec& g, const std::optional<RegionMask>& domain) {
    if (!domain) return;
    if (!domain->spec.same_as(g)) throw ValidationError("cost model: domain mask grid mismatch");
    if (domain->empty()) throw ValidationError("cost model: domain mask is empty");
}

MetricBounds scan_bounds(const GridField& alpha, const std::optional<RegionMask>& domain) {
    MetricBounds b{kInf, -kInf};
    bool any = false;
    for (cell_t c = 0; c < alpha.spec.cell_count(); ++c) {
        if (domain && !domain->at(c)) continue;
        const double a = alpha.at(c);
        if (!(a > 0) || !std::isfinite(a))
            throw ValidationError("isotropic speed field must be positive and finite on passable cells");
        b.alpha_lo = std::min(b.alpha_lo, a);
        b.alpha_hi = std::max(b.alpha_hi, a);
        any = true;
    }
    if (!any) throw ValidationError("cost model: no passable cells");
    return b;
}

} // namespace

CostModel CostModel::isotropic(GridField alpha_field) {
    alpha_field.spec.validate();
    CostModel m;
    m.kind = CostKind::IsotropicEikonal;
    m.bounds = scan_bounds(alpha_field, std::nullopt);
    m.alpha = std::move(alpha_field);
    m.bounds.validate();
    return m;
}

CostModel CostModel::isotropic(GridField alpha_field, RegionMask domain_mask) {
    alpha_field.spec.validate();
    std::optional<RegionMask> dom(std::move(domain_mask));
    check_domain(alpha_field.spec, dom);
    CostModel m;
    m.kind = CostKind::IsotropicEikonal;
    m.bounds = scan_bounds(alpha_field, dom);
    m.alpha = std::move(alpha_field);
    m.domain = std::move(dom);
    m.bounds.validate();
    return m;
}

CostModel CostModel::isotropic_with_declared_bounds(GridField alpha_field, MetricBounds declared,
                                                    std::optional<RegionMask> domain_mask) {
    alpha_field.spec.validate();
    declared.validate();
    check_domain(alpha_field.spec, domain_mask);
    for (cell_t c = 0; c < alpha_field.spec.cell_count(); ++c) {
        if (domain_mask && !domain_mask->at(c)) continue;
        const double a = alpha_field.at(c);
        if (!(a > 0) || !std::isfinite(a))
            throw ValidationError("isotropic speed field must be positive and finite on passable cells");
    }
    CostModel m;
    m.kind = CostKind::IsotropicEikonal;
    m.alpha = std::move(alpha_field);
    m.bounds = declared;
    m.domain = std::move(domain_mask);
    return m;
}

CostModel CostModel::finsler(const GridSpec& g, std::vector<Vec> fan_dirs,
                             std::vector<double> speeds, MetricBounds declared,
                             std::optional<RegionMask> domain_mask) {
    g.validate();
    declared.validate();
    check_domain(g, domain_mask);
    const std::size_t M = fan_dirs.size();
    if (M < std::size_t(2 * g.dim))
        throw ValidationError("finsler fan needs at least 2*dim directions");
    const std::size_t cells = std::size_t(g.cell_count());
    const bool per_cell = speeds.size() == cells * M;
    if (!per_cell && speeds.size() != M)
        throw ValidationError("finsler speed table must have M or cells*M entries");

    for (Vec& d : fan_dirs) {
        const double n = norm(d);
        if (!(n > 0)) throw ValidationError("finsler fan contains a zero direction");
        d = (1.0 / n) * d;
        if (g.dim == 2) d[2] = 0.0;
    }

    if (g.dim == 2) {
        // Canonical order: sort directions by angle, permuting the table rows.
        std::vector<std::size_t> order(M);
        std::iota(order.begin(), order.end(), std::size_t(0));
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return std::atan2(fan_dirs[a][1], fan_dirs[a][0]) <
                   std::atan2(fan_dirs[b][1], fan_dirs[b][0]);
        });
        std::vector<Vec> sorted_fan(M);
        for (std::size_t m = 0; m < M; ++m) sorted_fan[m] = fan_dirs[order[m]];
        std::vector<double> sorted_speeds(speeds.size());
        const std::size_t rows = per_cell ? cells : 1;
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t m = 0; m < M; ++m)
                sorted_speeds[r * M + m] = speeds[r * M + order[m]];
        fan_dirs = std::move(sorted_fan);
        speeds = std::move(sorted_speeds);
        for (std::size_t m = 0; m < M; ++m) {
            const std::size_t next = (m + 1) % M;
            const double a0 = std::atan2(fan_dirs[m][1], fan_dirs[m][0]);
            double a1 = std::atan2(fan_dirs[next][1], fan_dirs[next][0]);
            if (next == 0) a1 += 2 * std::acos(-1.0);
            if (a1 - a0 >= std::acos(-1.0) - 1e-9)
                throw ValidationError("finsler fan leaves an angular gap of pi or more");
        }
    }

    const std::size_t rows = per_cell ? cells : 1;
    const double tol = 1e-9;
    for (std::size_t r = 0; r < rows; ++r) {
        if (per_cell && domain_mask && !domain_mask->at(cell_t(r))) continue;
        const double* sp = &speeds[r * M];
        for (std::size_t m = 0; m < M; ++m) {
            if (!(sp[m] > 0) || !std::isfinite(sp[m]))
                throw ValidationError("finsler speeds must be positive and finite");
            if (sp[m] > declared.alpha_hi * (1 + tol))
                throw ValidationError("finsler speed exceeds the declared upper envelope");
        }
        // Ball vertices v_m = speed_m * d_m must be in convex position.
        if (g.dim == 2) {
            // Exact check: vertices are in angular order, so the polygon is
            // convex iff consecutive edge cross products never turn clockwise.
            for (std::size_t m = 0; m < M; ++m) {
                const Vec a = sp[m] * fan_dirs[m];
                const Vec b = sp[(m + 1) % M] * fan_dirs[(m + 1) % M];
                const Vec c = sp[(m + 2) % M] * fan_dirs[(m + 2) % M];
                const double cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
                if (cross < -tol * declared.alpha_hi * declared.alpha_hi)
                    throw ValidationError("finsler speed ball is not convex on the sample fan");
            }
            // The evaluated ball is the polygon through the vertices; its
            // inradius (edge by edge) must still dominate the lower envelope.
            for (std::size_t m = 0; m < M; ++m) {
                const std::size_t next = (m + 1) % M;
                const double rmin = edge_min_radius(sp[m] * fan_dirs[m], sp[next] * fan_dirs[next]);
                if (rmin < declared.alpha_lo * (1 - tol))
                    throw ValidationError("finsler speed ball dips below the declared lower envelope");
            }
        } else {
            // Supporting-direction sweep: each vertex must win (up to a slack
            // that absorbs the fan's ~15 degree angular resolution) along some
            // sampled direction, or it sits inside the hull of the others.
            // Catches dips deeper than ~10% of alpha_hi; shallower deviations
            // are below this fan's resolving power.
            const double slack = 0.1 * declared.alpha_hi;
            for (std::size_t m = 0; m < M; ++m) {
                const Vec vm = sp[m] * fan_dirs[m];
                double best_margin = -kInf;
                for (std::size_t w = 0; w < M; ++w) {
                    double other = -kInf;
                    for (std::size_t l = 0; l < M; ++l) {
                        if (l == m) continue;
                        other = std::max(other, dot(sp[l] * fan_dirs[l], fan_dirs[w]));
                    }
                    best_margin = std::max(best_margin, dot(vm, fan_dirs[w]) - other);
                }
                if (best_margin < -slack)
                    throw ValidationError("finsler speed ball is not convex on the sample fan");
            }
            for (std::size_t m = 0; m < M; ++m)
                if (sp[m] < declared.alpha_lo * (1 - tol))
                    throw ValidationError("finsler speed dips below the declared lower envelope");
        }
    }

    CostModel m;
    m.kind = CostKind::FinslerSampled;
    m.alpha = GridField(g, 0.0); // keeps the grid spec reachable; field unused
    m.fan = std::move(fan_dirs);
    m.fan_speeds = std::move(speeds);
    m.bounds = declared;
    m.domain = std::move(domain_mask);
    return m;
}

std::vector<Vec> CostModel::default_fan(int dim) {
    std::vector<Vec> fan;
    if (dim == 2) {
        const double pi = std::acos(-1.0);
        for (int m = 0; m < 32; ++m) {
            const double th = 2 * pi * m / 32.0;
            fan.push_back({std::cos(th), std::sin(th), 0.0});
        }
    } else if (dim == 3) {
        for (int a = -2; a <= 2; ++a)
            for (int b = -2; b <= 2; ++b)
                for (int c = -2; c <= 2; ++c) {
                    if (a == 0 && b == 0 && c == 0) continue;
                    const int g = std::gcd(std::gcd(std::abs(a), std::abs(b)), std::abs(c));
                    if (g != 1) continue;
                    Vec v{double(a), double(b), double(c)};
                    fan.push_back((1.0 / norm(v)) * v);
                }
    } else {
        throw DomainError("default_fan: dim must be 2 or 3");
    }
    return fan;
}

double sigma(const CostModel& model, const Vec& x, const Vec& v) {
    return model.sigma_at_cell(model.grid().nearest_cell(x), v);
}

MetricBounds bounds_of(const CostModel& model) { return model.bounds; }

} // namespace eikjohn
