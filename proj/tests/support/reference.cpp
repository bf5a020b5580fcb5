#include "reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace eikjohn::reference {

namespace {

std::int64_t sq_cell_dist(const GridSpec& g, cell_t a, cell_t b) {
  const auto ia = g.coords(a);
  const auto ib = g.coords(b);
  std::int64_t s = 0;
  for (int d = 0; d < g.dim; ++d) {
    const std::int64_t diff = ia[std::size_t(d)] - ib[std::size_t(d)];
    s += diff * diff;
  }
  return s;
}

}  // namespace

std::vector<std::int64_t> dt_bruteforce_sq(const RegionMask& region) {
  const GridSpec& g = region.spec;
  const cell_t n = g.cell_count();
  std::vector<cell_t> sites = region.cells();
  std::vector<std::int64_t> out(static_cast<std::size_t>(n), -1);
  if (sites.empty()) return out;
  for (cell_t c = 0; c < n; ++c) {
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (cell_t s : sites) best = std::min(best, sq_cell_dist(g, c, s));
    out[static_cast<std::size_t>(c)] = best;
  }
  return out;
}

std::vector<double> dt_bruteforce(const RegionMask& region) {
  const auto sq = dt_bruteforce_sq(region);
  std::vector<double> out(sq.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    if (sq[i] < 0) throw std::runtime_error("dt_bruteforce: empty region");
    out[i] = region.spec.h * std::sqrt(static_cast<double>(sq[i]));
  }
  return out;
}

RegionMask dilate_bruteforce(const RegionMask& region, double r) {
  const GridSpec& g = region.spec;
  RegionMask out(g);
  const auto sq = dt_bruteforce_sq(region);
  // Inclusive comparison with the same relative slack the fast kernel uses,
  // so exact-radius hits land identically.
  const double rr = (r / g.h) * (r / g.h) * (1.0 + 1e-12);
  for (cell_t c = 0; c < g.cell_count(); ++c) {
    if (sq[static_cast<std::size_t>(c)] >= 0 &&
        static_cast<double>(sq[static_cast<std::size_t>(c)]) <= rr) {
      out.set(c, true);
    }
  }
  return out;
}

RegionMask boundary_bruteforce(const RegionMask& region) {
  const GridSpec& g = region.spec;
  RegionMask out(g);
  for (cell_t c = 0; c < g.cell_count(); ++c) {
    if (!region.at(c)) continue;
    const auto ic = g.coords(c);
    bool on_boundary = false;
    for (int d = 0; d < g.dim && !on_boundary; ++d) {
      for (int step = -1; step <= 1 && !on_boundary; step += 2) {
        std::array<cell_t, 3> jc = ic;
        jc[std::size_t(d)] += step;
        if (!g.in_bounds(jc[0], jc[1], jc[2])) {
          on_boundary = true;
        } else if (!region.at(g.index(jc[0], jc[1], jc[2]))) {
          on_boundary = true;
        }
      }
    }
    if (on_boundary) out.set(c, true);
  }
  return out;
}

double hausdorff_bruteforce(const RegionMask& a, const RegionMask& b) {
  const auto ac = a.cells();
  const auto bc = b.cells();
  if (ac.empty() || bc.empty()) {
    throw std::runtime_error("hausdorff_bruteforce: empty mask");
  }
  const GridSpec& g = a.spec;
  auto directed = [&](const std::vector<cell_t>& from,
                      const std::vector<cell_t>& to) {
    std::int64_t worst = 0;
    for (cell_t c : from) {
      std::int64_t best = std::numeric_limits<std::int64_t>::max();
      for (cell_t s : to) best = std::min(best, sq_cell_dist(g, c, s));
      worst = std::max(worst, best);
    }
    return worst;
  };
  const std::int64_t m = std::max(directed(ac, bc), directed(bc, ac));
  return g.h * std::sqrt(static_cast<double>(m));
}

namespace {

// One-dimensional lower envelope of parabolas, textbook form restricted to
// the finite sites.  Double arithmetic internally but exact integer output
// (inputs and outputs fit far below 2^53).
void line_edt(const std::vector<std::int64_t>& f, std::vector<std::int64_t>& out) {
  const int n = static_cast<int>(f.size());
  constexpr std::int64_t kFar = std::int64_t{1} << 60;
  std::vector<int> sites;
  sites.reserve(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) {
    if (f[static_cast<std::size_t>(q)] < kFar) sites.push_back(q);
  }
  if (sites.empty()) {
    std::fill(out.begin(), out.end(), kFar);
    return;
  }
  std::vector<int> v(sites.size());
  std::vector<double> z(sites.size() + 1);
  int k = 0;
  v[0] = sites[0];
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (std::size_t idx = 1; idx < sites.size(); ++idx) {
    const int q = sites[idx];
    double s = 0.0;
    while (true) {
      const int p = v[static_cast<std::size_t>(k)];
      s = (static_cast<double>(f[static_cast<std::size_t>(q)] -
                               f[static_cast<std::size_t>(p)]) +
           static_cast<double>(q) * q - static_cast<double>(p) * p) /
          (2.0 * (q - p));
      if (s <= z[static_cast<std::size_t>(k)]) {
        --k;  // z[0] is -inf, so k never drops below 0 here
      } else {
        break;
      }
    }
    ++k;
    v[static_cast<std::size_t>(k)] = q;
    z[static_cast<std::size_t>(k)] = s;
    z[static_cast<std::size_t>(k) + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[static_cast<std::size_t>(k) + 1] < static_cast<double>(q)) ++k;
    const int p = v[static_cast<std::size_t>(k)];
    const std::int64_t d = q - p;
    out[static_cast<std::size_t>(q)] = d * d + f[static_cast<std::size_t>(p)];
  }
}

}  // namespace

std::vector<std::int64_t> edt_serial_sq(const RegionMask& region) {
  const GridSpec& g = region.spec;
  const cell_t n = g.cell_count();
  constexpr std::int64_t kFar = std::int64_t{1} << 60;
  std::vector<std::int64_t> dist(static_cast<std::size_t>(n));
  for (cell_t c = 0; c < n; ++c) {
    dist[static_cast<std::size_t>(c)] = region.at(c) ? 0 : kFar;
  }
  std::vector<std::int64_t> line, lout;
  for (int axis = g.dim - 1; axis >= 0; --axis) {
    const int len = static_cast<int>(g.shape[std::size_t(axis)]);
    cell_t stride = 1;
    for (int d = axis + 1; d < g.dim; ++d) stride *= g.shape[std::size_t(d)];
    const cell_t lines = n / len;
    line.assign(static_cast<std::size_t>(len), 0);
    lout.assign(static_cast<std::size_t>(len), 0);
    for (cell_t l = 0; l < lines; ++l) {
      const cell_t base = (l / stride) * stride * len + (l % stride);
      for (int q = 0; q < len; ++q) {
        line[static_cast<std::size_t>(q)] =
            dist[static_cast<std::size_t>(base + q * stride)];
      }
      bool any = false;
      for (int q = 0; q < len; ++q) {
        if (line[static_cast<std::size_t>(q)] < kFar) {
          any = true;
          break;
        }
      }
      if (!any) continue;
      line_edt(line, lout);
      for (int q = 0; q < len; ++q) {
        dist[static_cast<std::size_t>(base + q * stride)] =
            lout[static_cast<std::size_t>(q)];
      }
    }
  }
  return dist;
}

std::vector<double> graph_distance_bruteforce(const RegionMask& seeds,
                                              const std::vector<double>& alpha) {
  const GridSpec& g = seeds.spec;
  const cell_t n = g.cell_count();
  if (alpha.size() != static_cast<std::size_t>(n)) {
    throw std::runtime_error("graph_distance_bruteforce: alpha size mismatch");
  }
  std::vector<double> dist(static_cast<std::size_t>(n),
                           std::numeric_limits<double>::infinity());
  using Item = std::pair<double, cell_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (cell_t c : seeds.cells()) {
    dist[static_cast<std::size_t>(c)] = 0.0;
    pq.emplace(0.0, c);
  }
  while (!pq.empty()) {
    const auto [du, u] = pq.top();
    pq.pop();
    if (du > dist[static_cast<std::size_t>(u)]) continue;
    const auto iu = g.coords(u);
    const int kspan = g.dim == 3 ? 1 : 0;
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        for (int dk = -kspan; dk <= kspan; ++dk) {
          if (di == 0 && dj == 0 && dk == 0) continue;
          const cell_t vi = iu[0] + di, vj = iu[1] + dj, vk = iu[2] + dk;
          if (!g.in_bounds(vi, vj, vk)) continue;
          const cell_t v = g.index(vi, vj, vk);
          const double step =
              g.h * std::sqrt(static_cast<double>(di * di + dj * dj + dk * dk));
          const double sig = 0.5 * (1.0 / alpha[static_cast<std::size_t>(u)] +
                                    1.0 / alpha[static_cast<std::size_t>(v)]);
          const double cand = du + step * sig;
          if (cand < dist[static_cast<std::size_t>(v)] - 1e-15) {
            dist[static_cast<std::size_t>(v)] = cand;
            pq.emplace(cand, v);
          }
        }
      }
    }
  }
  return dist;
}

}  // namespace eikjohn::reference
