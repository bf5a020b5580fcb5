#include "eikjohn/morphology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "eikjohn/parallel.hpp"

namespace eikjohn {

// Large sentinel for squared distances (in h^2 units); safe against overflow when
// another squared span is added.
static constexpr std::int64_t kFarSq = std::int64_t(1) << 60;

// 1D squared-distance lower envelope (Felzenszwalb-Huttenlocher) over one line.
// f holds input squared distances, d the output, both length n; v/z are scratch.
static void envelope_pass(const std::int64_t* f, std::int64_t* d, int n,
                          std::vector<int>& v, std::vector<double>& z) {
    v.resize(std::size_t(n) + 1);
    z.resize(std::size_t(n) + 1);
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    auto inter = [&](int p, int q) {
        return (double(f[p] - f[q]) + double(std::int64_t(p) * p - std::int64_t(q) * q)) / (2.0 * (p - q));
    };
    for (int q = 1; q < n; ++q) {
        if (f[q] >= kFarSq) continue;
        double s = (f[v[k]] >= kFarSq) ? -std::numeric_limits<double>::infinity() : inter(q, v[k]);
        while (k > 0 && s <= z[k]) {
            --k;
            s = (f[v[k]] >= kFarSq) ? -std::numeric_limits<double>::infinity() : inter(q, v[k]);
        }
        if (f[v[k]] >= kFarSq) {
            v[k] = q;
        } else {
            ++k;
            v[k] = q;
            z[k] = s;
        }
        z[k + 1] = std::numeric_limits<double>::infinity();
    }
    if (f[v[0]] >= kFarSq) {
        for (int q = 0; q < n; ++q) d[q] = kFarSq;
        return;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        std::int64_t dq = q - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

std::vector<std::int64_t> distance_transform_sq(const RegionMask& region) {
    region.spec.validate();
    const GridSpec& g = region.spec;
    const cell_t n = g.cell_count();
    std::vector<std::int64_t> dist(static_cast<std::size_t>(n));
    for (cell_t i = 0; i < n; ++i) dist[std::size_t(i)] = region.at(i) ? 0 : kFarSq;

    apply_thread_cap();
    // One envelope pass per axis; lines of each pass are independent.
    for (int axis = g.dim - 1; axis >= 0; --axis) {
        const cell_t len = g.shape[axis];
        if (len == 1) continue;
        cell_t stride = 1;
        for (int a = axis + 1; a < 3; ++a) stride *= g.shape[a];
        const cell_t lines = n / len;
#pragma omp parallel
        {
            std::vector<std::int64_t> f(static_cast<std::size_t>(len));
            std::vector<std::int64_t> d(static_cast<std::size_t>(len));
            std::vector<int> v;
            std::vector<double> z;
#pragma omp for schedule(static)
            for (cell_t line = 0; line < lines; ++line) {
                // Base index of this line: interleave the non-axis coordinates.
                cell_t block = line / stride;          // index over slower axes
                cell_t within = line % stride;         // index over faster axes
                cell_t base = block * stride * len + within;
                for (cell_t q = 0; q < len; ++q) f[std::size_t(q)] = dist[std::size_t(base + q * stride)];
                envelope_pass(f.data(), d.data(), int(len), v, z);
                for (cell_t q = 0; q < len; ++q) dist[std::size_t(base + q * stride)] = d[std::size_t(q)];
            }
        }
    }
    return dist;
}

GridField distance_transform(const RegionMask& region) {
    if (region.empty()) throw DomainError("distance_transform: region is empty");
    auto sq = distance_transform_sq(region);
    GridField out(region.spec);
    const double h = region.spec.h;
#pragma omp parallel for schedule(static)
    for (cell_t i = 0; i < cell_t(sq.size()); ++i)
        out.at(i) = h * std::sqrt(double(sq[std::size_t(i)]));
    return out;
}

GridField signed_distance_transform(const RegionMask& region) {
    if (region.empty()) throw DomainError("signed_distance_transform: region is empty");
    RegionMask comp(region.spec);
    bool any_out = false;
    for (cell_t i = 0; i < cell_t(region.m.size()); ++i) {
        bool out = !region.at(i);
        comp.set(i, out);
        any_out = any_out || out;
    }
    if (!any_out) throw DomainError("signed_distance_transform: region covers the whole grid");
    auto d_to_region = distance_transform_sq(region);
    auto d_to_comp = distance_transform_sq(comp);
    GridField out(region.spec);
    const double h = region.spec.h;
#pragma omp parallel for schedule(static)
    for (cell_t i = 0; i < cell_t(out.v.size()); ++i) {
        double pos = h * std::sqrt(double(d_to_region[std::size_t(i)]));
        double neg = h * std::sqrt(double(d_to_comp[std::size_t(i)]));
        out.at(i) = region.at(i) ? -neg : pos;
    }
    return out;
}

RegionMask dilate_by_ball(const RegionMask& region, double r) {
    if (r < 0) throw DomainError("dilate_by_ball: negative radius");
    if (region.empty()) throw DomainError("dilate_by_ball: region is empty");
    auto sq = distance_transform_sq(region);
    const double h = region.spec.h;
    // Compare in exact integer h^2 units: cell included iff dist^2 <= (r/h)^2.
    const double rsq = (r / h) * (r / h) * (1.0 + 1e-12);
    RegionMask out(region.spec);
#pragma omp parallel for schedule(static)
    for (cell_t i = 0; i < cell_t(sq.size()); ++i)
        out.m[std::size_t(i)] = double(sq[std::size_t(i)]) <= rsq ? 1 : 0;
    return out;
}

RegionMask boundary_cells(const RegionMask& region) {
    const GridSpec& g = region.spec;
    RegionMask out(g);
    const cell_t ni = g.shape[0], nj = g.shape[1], nk = g.shape[2];
#pragma omp parallel for schedule(static)
    for (cell_t i = 0; i < ni; ++i)
        for (cell_t j = 0; j < nj; ++j)
            for (cell_t k = 0; k < nk; ++k) {
                cell_t idx = g.index(i, j, k);
                if (!region.at(idx)) continue;
                bool bnd = false;
                auto check = [&](cell_t ii, cell_t jj, cell_t kk) {
                    if (!g.in_bounds(ii, jj, kk) || !region.at(g.index(ii, jj, kk))) bnd = true;
                };
                check(i - 1, j, k);
                check(i + 1, j, k);
                check(i, j - 1, k);
                check(i, j + 1, k);
                if (g.dim == 3) {
                    check(i, j, k - 1);
                    check(i, j, k + 1);
                }
                out.m[std::size_t(idx)] = bnd ? 1 : 0;
            }
    return out;
}

double measure(const RegionMask& region) {
    double cellvol = std::pow(region.spec.h, region.spec.dim);
    return double(region.count()) * cellvol;
}

double directed_hausdorff(const RegionMask& from, const RegionMask& to) {
    if (from.empty() || to.empty()) throw DomainError("hausdorff: empty region");
    if (!from.spec.same_as(to.spec)) throw DomainError("hausdorff: mismatched grids");
    auto sq = distance_transform_sq(to);
    std::int64_t worst = 0;
#pragma omp parallel for schedule(static) reduction(max : worst)
    for (cell_t i = 0; i < cell_t(sq.size()); ++i)
        if (from.at(i)) worst = std::max(worst, sq[std::size_t(i)]);
    return from.spec.h * std::sqrt(double(worst));
}

double hausdorff_distance(const RegionMask& a, const RegionMask& b) {
    return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

std::pair<int, std::vector<std::int32_t>> connected_components(const RegionMask& region) {
    const GridSpec& g = region.spec;
    const cell_t n = g.cell_count();
    std::vector<std::int32_t> label(std::size_t(n), -1);
    int comps = 0;
    std::deque<cell_t> queue;
    for (cell_t start = 0; start < n; ++start) {
        if (!region.at(start) || label[std::size_t(start)] >= 0) continue;
        std::int32_t id = comps++;
        label[std::size_t(start)] = id;
        queue.push_back(start);
        while (!queue.empty()) {
            cell_t cur = queue.front();
            queue.pop_front();
            auto c = g.coords(cur);
            auto visit = [&](cell_t i, cell_t j, cell_t k) {
                if (!g.in_bounds(i, j, k)) return;
                cell_t idx = g.index(i, j, k);
                if (region.at(idx) && label[std::size_t(idx)] < 0) {
                    label[std::size_t(idx)] = id;
                    queue.push_back(idx);
                }
            };
            visit(c[0] - 1, c[1], c[2]);
            visit(c[0] + 1, c[1], c[2]);
            visit(c[0], c[1] - 1, c[2]);
            visit(c[0], c[1] + 1, c[2]);
            if (g.dim == 3) {
                visit(c[0], c[1], c[2] - 1);
                visit(c[0], c[1], c[2] + 1);
            }
        }
    }
    return {comps, std::move(label)};
}

} // namespace eikjohn
