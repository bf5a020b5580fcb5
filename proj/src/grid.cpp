#include "eikjohn/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eikjohn {

static const double kInf = std::numeric_limits<double>::infinity();

void GridSpec::validate() const {
    if (dim != 2 && dim != 3) throw ValidationError("grid dim must be 2 or 3");
    if (!(h > 0) || !std::isfinite(h)) throw ValidationError("grid spacing h must be positive and finite");
    for (int a = 0; a < 3; ++a) {
        if (shape[a] < 1) throw ValidationError("grid shape components must be >= 1");
        if (!std::isfinite(origin[a])) throw ValidationError("grid origin must be finite");
    }
    if (dim == 2 && shape[2] != 1) throw ValidationError("2D grid must have shape[2] == 1");
    if (cell_count() > kMaxCells) throw ValidationError("grid exceeds the cell budget (2^27 cells)");
}

cell_t GridSpec::nearest_cell(const Vec& p) const {
    std::array<cell_t, 3> c{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
        cell_t i = cell_t(std::llround((p[a] - origin[a]) / h));
        c[a] = std::clamp(i, cell_t(0), shape[a] - 1);
    }
    return index(c[0], c[1], c[2]);
}

bool GridSpec::covers(const Vec& p) const {
    for (int a = 0; a < dim; ++a) {
        double lo = origin[a] - 0.5 * h;
        double hi = origin[a] + (double(shape[a]) - 0.5) * h;
        if (p[a] < lo || p[a] > hi) return false;
    }
    return true;
}

bool GridSpec::same_as(const GridSpec& o) const {
    return dim == o.dim && shape == o.shape && h == o.h && origin == o.origin;
}

static cell_t span_cells(double lo, double hi, double h) {
    if (!(hi > lo)) throw ValidationError("grid box must have positive extent");
    return cell_t(std::llround((hi - lo) / h));
}

GridSpec GridSpec::box2d(double x0, double x1, double y0, double y1, double h) {
    GridSpec g;
    g.dim = 2;
    g.h = h;
    g.shape = {span_cells(x0, x1, h), span_cells(y0, y1, h), 1};
    g.origin = {x0 + 0.5 * h, y0 + 0.5 * h, 0.0};
    g.validate();
    return g;
}

GridSpec GridSpec::box3d(double x0, double x1, double y0, double y1, double z0, double z1, double h) {
    GridSpec g;
    g.dim = 3;
    g.h = h;
    g.shape = {span_cells(x0, x1, h), span_cells(y0, y1, h), span_cells(z0, z1, h)};
    g.origin = {x0 + 0.5 * h, y0 + 0.5 * h, z0 + 0.5 * h};
    g.validate();
    return g;
}

GridField::GridField(const GridSpec& s, double fill) : spec(s) {
    spec.validate();
    v.assign(std::size_t(spec.cell_count()), fill);
}

double GridField::interp(const Vec& p) const {
    // Base cell of the interpolation patch along each axis, clamped so the
    // patch stays inside the grid; frac in [0,1] within the patch.
    std::array<cell_t, 3> base{0, 0, 0};
    std::array<double, 3> frac{0, 0, 0};
    for (int a = 0; a < spec.dim; ++a) {
        double s = (p[a] - spec.origin[a]) / spec.h;
        double fl = std::floor(s);
        cell_t b = cell_t(fl);
        double f = s - fl;
        if (b < 0) { b = 0; f = 0.0; }
        if (b > spec.shape[a] - 2) {
            b = std::max(cell_t(0), spec.shape[a] - 2);
            f = (spec.shape[a] == 1) ? 0.0 : std::min(1.0, std::max(0.0, s - double(b)));
        }
        base[a] = b;
        frac[a] = f;
    }
    int corners = 1 << spec.dim;
    double acc = 0.0, wsum = 0.0;
    double best_finite = kInf;
    double best_w = -1.0;
    bool any_nonfinite = false;
    for (int c = 0; c < corners; ++c) {
        std::array<cell_t, 3> cc = base;
        double w = 1.0;
        for (int a = 0; a < spec.dim; ++a) {
            int bit = (c >> a) & 1;
            if (bit && spec.shape[a] > 1) cc[a] += 1;
            w *= bit ? frac[a] : 1.0 - frac[a];
        }
        double val = at(spec.index(cc[0], cc[1], cc[2]));
        if (std::isfinite(val)) {
            acc += w * val;
            wsum += w;
            if (w > best_w) { best_w = w; best_finite = val; }
        } else {
            any_nonfinite = true;
        }
    }
    if (!any_nonfinite) return acc;
    if (wsum <= 0.0) return kInf;
    // Mixed patch: renormalize over the finite corners (conservative fallback).
    (void)best_finite;
    return acc / wsum;
}

Vec GridField::gradient(const Vec& p, double delta) const {
    double d = delta > 0 ? delta : 0.5 * spec.h;
    Vec g{0, 0, 0};
    for (int a = 0; a < spec.dim; ++a) {
        Vec lo = p, hi = p;
        lo[a] -= d;
        hi[a] += d;
        double vl = interp(lo), vh = interp(hi);
        if (std::isfinite(vl) && std::isfinite(vh)) {
            g[a] = (vh - vl) / (2 * d);
        } else if (std::isfinite(vl)) {
            g[a] = (interp(p) - vl) / d;
        } else if (std::isfinite(vh)) {
            g[a] = (vh - interp(p)) / d;
        }
    }
    return g;
}

RegionMask::RegionMask(const GridSpec& s, bool fill) : spec(s) {
    spec.validate();
    m.assign(std::size_t(spec.cell_count()), fill ? 1 : 0);
}

cell_t RegionMask::count() const {
    cell_t n = 0;
    for (auto b : m) n += b != 0;
    return n;
}

bool RegionMask::touches_border() const {
    const cell_t ni = spec.shape[0], nj = spec.shape[1], nk = spec.shape[2];
    for (cell_t i = 0; i < ni; ++i)
        for (cell_t j = 0; j < nj; ++j)
            for (cell_t k = 0; k < nk; ++k) {
                bool border = i == 0 || i == ni - 1 || j == 0 || j == nj - 1;
                if (spec.dim == 3) border = border || k == 0 || k == nk - 1;
                if (border && at(spec.index(i, j, k))) return true;
            }
    return false;
}

void RegionMask::validate_compact(const char* what) const {
    if (empty()) throw ValidationError(std::string(what) + ": region is empty");
    if (touches_border()) throw ValidationError(std::string(what) + ": region touches the grid border");
}

std::vector<cell_t> RegionMask::cells() const {
    std::vector<cell_t> out;
    out.reserve(std::size_t(count()));
    for (cell_t i = 0; i < cell_t(m.size()); ++i)
        if (m[std::size_t(i)]) out.push_back(i);
    return out;
}

Curve::Curve(std::vector<Vec> points) : pts(std::move(points)) {
    cum.resize(pts.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i > 0) acc += dist(pts[i], pts[i - 1]);
        cum[i] = acc;
    }
}

Vec Curve::at(double s) const {
    if (pts.empty()) throw DomainError("Curve::at on empty curve");
    if (s <= 0 || pts.size() == 1) return pts.front();
    if (s >= length()) return pts.back();
    auto it = std::lower_bound(cum.begin(), cum.end(), s);
    std::size_t i = std::size_t(it - cum.begin());
    if (i == 0) return pts.front();
    double seg = cum[i] - cum[i - 1];
    double f = seg > 0 ? (s - cum[i - 1]) / seg : 0.0;
    return pts[i - 1] + f * (pts[i] - pts[i - 1]);
}

Curve Curve::joined(const Curve& tail) const {
    std::vector<Vec> all = pts;
    std::size_t start = 0;
    if (!all.empty() && !tail.pts.empty() && dist(all.back(), tail.pts.front()) < 1e-12) start = 1;
    for (std::size_t i = start; i < tail.pts.size(); ++i) all.push_back(tail.pts[i]);
    return Curve(std::move(all));
}

} // namespace eikjohn
