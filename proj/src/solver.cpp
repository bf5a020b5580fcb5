#include "eikjohn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>
#include <utility>

#include <json.hpp>

#include "eikjohn/errors.hpp"
#include "eikjohn/io.hpp"
#include "eikjohn/morphology.hpp"
#include "eikjohn/parallel.hpp"
#include "eikjohn/rng.hpp"

namespace eikjohn {

static const double kInf = std::numeric_limits<double>::infinity();

namespace {

// Binary min-heap over cell indices keyed by an external value array,
// ties broken by cell index so acceptance order is reproducible.
class CellHeap {
public:
    CellHeap(const std::vector<double>& key, cell_t n) : key_(key), pos_(std::size_t(n), 0) {}

    bool empty() const { return heap_.empty(); }

    void push_or_raise_priority(cell_t c) {
        std::int32_t p = pos_[std::size_t(c)];
        if (p == 0) {
            heap_.push_back(c);
            p = std::int32_t(heap_.size());
            pos_[std::size_t(c)] = p;
        }
        sift_up(std::size_t(p - 1));
    }

    cell_t pop_min() {
        const cell_t top = heap_.front();
        pos_[std::size_t(top)] = 0;
        const cell_t last = heap_.back();
        heap_.pop_back();
        if (!heap_.empty()) {
            heap_.front() = last;
            pos_[std::size_t(last)] = 1;
            sift_down(0);
        }
        return top;
    }

private:
    bool less(cell_t a, cell_t b) const {
        const double ka = key_[std::size_t(a)], kb = key_[std::size_t(b)];
        return ka < kb || (ka == kb && a < b);
    }
    void sift_up(std::size_t i) {
        while (i > 0) {
            const std::size_t parent = (i - 1) / 2;
            if (!less(heap_[i], heap_[parent])) break;
            swap_at(i, parent);
            i = parent;
        }
    }
    void sift_down(std::size_t i) {
        const std::size_t n = heap_.size();
        while (true) {
            std::size_t best = i;
            const std::size_t l = 2 * i + 1, r = 2 * i + 2;
            if (l < n && less(heap_[l], heap_[best])) best = l;
            if (r < n && less(heap_[r], heap_[best])) best = r;
            if (best == i) break;
            swap_at(i, best);
            i = best;
        }
    }
    void swap_at(std::size_t i, std::size_t j) {
        std::swap(heap_[i], heap_[j]);
        pos_[std::size_t(heap_[i])] = std::int32_t(i + 1);
        pos_[std::size_t(heap_[j])] = std::int32_t(j + 1);
    }

    const std::vector<double>& key_;
    std::vector<cell_t> heap_;
    std::vector<std::int32_t> pos_; // 1-based position, 0 = not in heap
};

void check_solve_inputs(const CostModel& model, const RegionMask& source, const char* who) {
    const GridSpec& g = model.grid();
    if (!source.spec.same_as(g)) throw DomainError(std::string(who) + ": source grid mismatch");
    if (source.empty()) throw DomainError(std::string(who) + ": source is empty");
    source.validate_compact(who);
    model.bounds.validate();
    for (cell_t c : source.cells())
        if (!model.passable(c))
            throw ValidationError(std::string(who) + ": source overlaps impassable cells");
}

// Upwind quadratic update at `cell`: solve sum_a ((U - m_a)+)^2 = C^2 over the
// axis minima m_a of the accepted face neighbors, C = h / alpha(cell).
double upwind_update(const GridSpec& g, const std::vector<double>& u,
                     const std::vector<std::uint8_t>& accepted, cell_t cell, double C) {
    const auto ic = g.coords(cell);
    double m[3];
    int cnt = 0;
    for (int a = 0; a < g.dim; ++a) {
        double best = kInf;
        for (int step = -1; step <= 1; step += 2) {
            std::array<cell_t, 3> jc = ic;
            jc[std::size_t(a)] += step;
            if (!g.in_bounds(jc[0], jc[1], jc[2])) continue;
            const cell_t nb = g.index(jc[0], jc[1], jc[2]);
            if (accepted[std::size_t(nb)]) best = std::min(best, u[std::size_t(nb)]);
        }
        if (std::isfinite(best)) m[cnt++] = best;
    }
    if (cnt == 0) return kInf;
    std::sort(m, m + cnt);
    double S1 = 0.0, S2 = 0.0, prev = kInf;
    for (int k = 1; k <= cnt; ++k) {
        S1 += m[k - 1];
        S2 += m[k - 1] * m[k - 1];
        const double disc = S1 * S1 - double(k) * (S2 - C * C);
        if (disc < 0.0) break; // keep the previous (valid) root
        const double U = (S1 + std::sqrt(disc)) / double(k);
        prev = U;
        if (k < cnt && U <= m[k]) break; // further axes would not be upwind
    }
    return std::isfinite(prev) ? prev : m[0] + C;
}

} // namespace

SolveResult fast_march(const CostModel& model, const RegionMask& source, double stop_above) {
    if (model.kind != CostKind::IsotropicEikonal)
        throw UnsupportedModelError("fast_march supports isotropic models only; "
                                    "use dijkstra_oracle for sampled profiles");
    check_solve_inputs(model, source, "fast_march");
    const GridSpec& g = model.grid();
    const cell_t n = g.cell_count();

    SolveResult res;
    res.u = GridField(g, kInf);
    res.accepted_order.assign(std::size_t(n), kNotAccepted);
    res.source = source;
    res.bounds = model.bounds;
    res.solver = "fmm";
    res.model = &model;

    std::vector<std::uint8_t> accepted(std::size_t(n), 0);
    CellHeap heap(res.u.v, n);
    for (cell_t c : source.cells()) {
        res.u.at(c) = 0.0;
        heap.push_or_raise_priority(c);
    }

    std::uint32_t rank = 0;
    while (!heap.empty()) {
        const cell_t c = heap.pop_min();
        if (res.u.at(c) > stop_above) break; // everything still queued is larger
        accepted[std::size_t(c)] = 1;
        res.accepted_order[std::size_t(c)] = rank++;

        const auto ic = g.coords(c);
        for (int a = 0; a < g.dim; ++a) {
            for (int step = -1; step <= 1; step += 2) {
                std::array<cell_t, 3> jc = ic;
                jc[std::size_t(a)] += step;
                if (!g.in_bounds(jc[0], jc[1], jc[2])) continue;
                const cell_t nb = g.index(jc[0], jc[1], jc[2]);
                if (accepted[std::size_t(nb)] || !model.passable(nb)) continue;
                const double C = g.h / model.speed(nb);
                const double U = upwind_update(g, res.u.v, accepted, nb, C);
                if (U < res.u.at(nb)) {
                    res.u.at(nb) = U;
                    heap.push_or_raise_priority(nb);
                }
            }
        }
    }
    // Cells cut off by stop_above keep u = +inf and no acceptance rank.
    for (cell_t c = 0; c < n; ++c)
        if (!accepted[std::size_t(c)]) res.u.at(c) = kInf;
    return res;
}

namespace {

std::vector<std::array<int, 3>> stencil_offsets(int dim, int order) {
    if (order < 1 || order > 3) throw DomainError("neighbor_order must be 1, 2, or 3");
    std::vector<std::array<int, 3>> out;
    const int span = order >= 3 ? 2 : 1;
    const int kspan = dim == 3 ? span : 0;
    for (int a = -span; a <= span; ++a)
        for (int b = -span; b <= span; ++b)
            for (int c = -kspan; c <= kspan; ++c) {
                if (a == 0 && b == 0 && c == 0) continue;
                const int linf = std::max({std::abs(a), std::abs(b), std::abs(c)});
                const int l1 = std::abs(a) + std::abs(b) + std::abs(c);
                if (order == 1 && l1 != 1) continue;         // faces only
                if (order == 2 && linf > 1) continue;        // faces + diagonals
                if (order == 3) {                            // primitive vectors, |o| <= 2
                    const int g0 = std::gcd(std::gcd(std::abs(a), std::abs(b)), std::abs(c));
                    if (g0 != 1) continue;
                }
                out.push_back({a, b, c});
            }
    return out;
}

} // namespace

SolveResult dijkstra_oracle(const CostModel& model, const RegionMask& source, int neighbor_order,
                            double stop_above) {
    check_solve_inputs(model, source, "dijkstra_oracle");
    const GridSpec& g = model.grid();
    const cell_t n = g.cell_count();
    const auto offsets = stencil_offsets(g.dim, neighbor_order);

    // World-space edge vectors and, for isotropic models, their lengths.
    std::vector<Vec> edges(offsets.size());
    for (std::size_t i = 0; i < offsets.size(); ++i)
        edges[i] = {g.h * offsets[i][0], g.h * offsets[i][1], g.h * offsets[i][2]};

    SolveResult res;
    res.u = GridField(g, kInf);
    res.accepted_order.assign(std::size_t(n), kNotAccepted);
    res.source = source;
    res.bounds = model.bounds;
    res.solver = "dijkstra";
    res.model = &model;

    std::vector<std::uint8_t> done(std::size_t(n), 0);
    CellHeap heap(res.u.v, n);
    for (cell_t c : source.cells()) {
        res.u.at(c) = 0.0;
        heap.push_or_raise_priority(c);
    }

    std::uint32_t rank = 0;
    while (!heap.empty()) {
        const cell_t c = heap.pop_min();
        if (res.u.at(c) > stop_above) break;
        done[std::size_t(c)] = 1;
        res.accepted_order[std::size_t(c)] = rank++;
        const double base = res.u.at(c);
        const auto ic = g.coords(c);
        for (std::size_t e = 0; e < offsets.size(); ++e) {
            const cell_t i = ic[0] + offsets[e][0];
            const cell_t j = ic[1] + offsets[e][1];
            const cell_t k = ic[2] + offsets[e][2];
            if (!g.in_bounds(i, j, k)) continue;
            const cell_t nb = g.index(i, j, k);
            if (done[std::size_t(nb)] || !model.passable(nb)) continue;
            const double cost =
                0.5 * (model.sigma_at_cell(c, edges[e]) + model.sigma_at_cell(nb, edges[e]));
            if (!std::isfinite(cost)) continue;
            const double cand = base + cost;
            if (cand < res.u.at(nb)) {
                res.u.at(nb) = cand;
                heap.push_or_raise_priority(nb);
            }
        }
    }
    for (cell_t c = 0; c < n; ++c)
        if (!done[std::size_t(c)]) res.u.at(c) = kInf;
    return res;
}

RegionMask monte_carlo_reachability(const CostModel& model, const RegionMask& source, double t,
                                    std::int64_t samples, std::uint64_t seed) {
    if (model.kind != CostKind::IsotropicEikonal)
        throw UnsupportedModelError("monte_carlo_reachability needs the isotropic control form");
    if (samples < 1) throw DomainError("monte_carlo_reachability: samples must be >= 1");
    if (t < 0) throw DomainError("monte_carlo_reachability: negative time");
    check_solve_inputs(model, source, "monte_carlo_reachability");

    const GridSpec& g = model.grid();
    RegionMask reached = source; // time-0 trajectories
    if (t == 0.0) return reached;

    const std::vector<cell_t> starts = boundary_cells(source).cells();
    const std::vector<cell_t>& launch = starts.empty() ? source.cells() : starts;
    const double dt_base = 0.5 * g.h / model.bounds.alpha_hi;
    constexpr int kSwitches = 32;

    apply_thread_cap();
#pragma omp parallel
    {
        std::vector<std::uint8_t> local(reached.m.size(), 0);
#pragma omp for schedule(static)
        for (std::int64_t s = 0; s < samples; ++s) {
            SplitMix64 rng(seed, std::uint64_t(s));
            Vec y = g.center(launch[rng.next_below(launch.size())]);

            // Piecewise-constant control: 32 random intervals covering [0, t].
            double cuts[kSwitches + 1];
            cuts[0] = 0.0;
            cuts[kSwitches] = t;
            for (int i = 1; i < kSwitches; ++i) cuts[i] = t * rng.next_double();
            std::sort(cuts + 1, cuts + kSwitches);

            double tau = 0.0;
            bool alive = true;
            for (int seg = 0; seg < kSwitches && alive; ++seg) {
                Vec v;
                if (g.dim == 2) {
                    const double th = 2.0 * std::acos(-1.0) * rng.next_double();
                    v = {std::cos(th), std::sin(th), 0.0};
                } else {
                    const double z = 2.0 * rng.next_double() - 1.0;
                    const double phi = 2.0 * std::acos(-1.0) * rng.next_double();
                    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
                    v = {r * std::cos(phi), r * std::sin(phi), z};
                }
                double remain = cuts[seg + 1] - cuts[seg];
                while (remain > 0 && alive) {
                    const double dt = std::min(dt_base, remain);
                    const cell_t here = g.nearest_cell(y);
                    y = y + (dt * model.alpha.at(here)) * v;
                    tau += dt;
                    remain -= dt;
                    if (!g.covers(y)) { alive = false; break; }
                    const cell_t c = g.nearest_cell(y);
                    if (!model.passable(c)) { alive = false; break; }
                    if (tau < t) local[std::size_t(c)] = 1;
                }
            }
        }
#pragma omp critical
        {
            for (std::size_t i = 0; i < local.size(); ++i)
                if (local[i]) reached.m[i] = 1;
        }
    }
    return reached;
}

Curve optimal_curve(const SolveResult& result, const Vec& x, const BacktrackOptions& opts) {
    const GridSpec& g = result.u.spec;
    if (!g.covers(x)) throw DomainError("optimal_curve: point outside the grid");
    const double ux = result.u.interp(x);
    if (!std::isfinite(ux)) throw DomainError("optimal_curve: value not finite at start point");
    if (result.source.at(g.nearest_cell(x)))
        throw DomainError("optimal_curve: start point already inside the source");
    const double step = opts.step > 0 ? opts.step : 0.5 * g.h;
    if (step > g.h) throw DomainError("optimal_curve: step must be in (0, h]");
    if (opts.max_length_factor < 1.0)
        throw DomainError("optimal_curve: length cap factor must be >= 1");
    // Absolute slack of one cell covers the final snap into the source.
    const double cap = opts.max_length_factor * result.bounds.alpha_hi * ux + g.h;

    std::vector<Vec> pts{x};
    Vec cur = x;
    double ucur = ux, len = 0.0;
    const std::size_t max_iter = std::size_t(cap / step) + 1024;

    for (std::size_t iter = 0;; ++iter) {
        const cell_t cell = g.nearest_cell(cur);
        if (result.source.at(cell)) break; // reached the source
        if (iter > max_iter)
            throw BacktrackError("optimal_curve: descent did not terminate");

        Vec next{};
        double unext = 0.0;
        bool moved = false;
        const Vec grad = result.u.gradient(cur);
        const double gn = norm(grad);
        if (gn > 0 && std::isfinite(gn)) {
            const Vec cand = cur - (step / gn) * grad;
            if (g.covers(cand)) {
                const double ucand = result.u.interp(cand);
                if (std::isfinite(ucand) && ucand < ucur - 1e-12) {
                    next = cand;
                    unext = ucand;
                    moved = true;
                }
            }
        }
        if (!moved) {
            // Cut-locus fallback: hop to the smallest-value face neighbor.
            const auto ic = g.coords(cell);
            double best = result.u.at(cell);
            cell_t best_nb = -1;
            for (int a = 0; a < g.dim; ++a)
                for (int sgn = -1; sgn <= 1; sgn += 2) {
                    std::array<cell_t, 3> jc = ic;
                    jc[std::size_t(a)] += sgn;
                    if (!g.in_bounds(jc[0], jc[1], jc[2])) continue;
                    const cell_t nb = g.index(jc[0], jc[1], jc[2]);
                    if (result.u.at(nb) < best) {
                        best = result.u.at(nb);
                        best_nb = nb;
                    }
                }
            if (best_nb < 0)
                throw BacktrackError("optimal_curve: descent stagnated at (" +
                                     std::to_string(cur[0]) + ", " + std::to_string(cur[1]) +
                                     (g.dim == 3 ? ", " + std::to_string(cur[2]) : "") + ")");
            next = g.center(best_nb);
            unext = result.u.at(best_nb);
        }
        len += dist(next, cur);
        if (len > cap) throw BacktrackError("optimal_curve: exceeded the length cap");
        pts.push_back(next);
        cur = next;
        ucur = unext;
    }
    return Curve(std::move(pts));
}

double curve_cost(const CostModel& model, const Curve& curve) {
    double total = 0.0;
    for (std::size_t i = 1; i < curve.pts.size(); ++i) {
        const Vec d = curve.pts[i] - curve.pts[i - 1];
        total += 0.5 * (sigma(model, curve.pts[i - 1], d) + sigma(model, curve.pts[i], d));
    }
    return total;
}

std::string save_solve_result(const SolveResult& result, const std::string& base) {
    save_field(result.u, base + ".u.json");
    save_mask(result.source, base + ".source.json");
    nlohmann::json meta;
    meta["alpha_lo"] = result.bounds.alpha_lo;
    meta["alpha_hi"] = result.bounds.alpha_hi;
    meta["source_file"] = std::filesystem::path(base).filename().string() + ".source.json";
    meta["solver"] = result.solver;
    meta["h"] = result.u.spec.h;
    const std::string meta_path = base + ".meta.json";
    write_text_file(meta_path, meta.dump(2) + "\n");
    return meta_path;
}

SolveResult load_solve_result(const std::string& meta_path) {
    std::string base = meta_path;
    const std::string suffix = ".meta.json";
    if (base.size() > suffix.size() && base.substr(base.size() - suffix.size()) == suffix)
        base = base.substr(0, base.size() - suffix.size());
    const nlohmann::json meta = nlohmann::json::parse(read_text_file(base + suffix));

    SolveResult res;
    res.u = load_field(base + ".u.json");
    const auto dir = std::filesystem::path(base + suffix).parent_path();
    res.source = load_mask((dir / meta.at("source_file").get<std::string>()).string());
    res.bounds = {meta.at("alpha_lo").get<double>(), meta.at("alpha_hi").get<double>()};
    res.solver = meta.at("solver").get<std::string>();
    res.bounds.validate();
    if (std::abs(meta.at("h").get<double>() - res.u.spec.h) > 1e-15)
        throw ValidationError("solve result sidecar disagrees with the field's grid spacing");
    if (!res.source.spec.same_as(res.u.spec))
        throw ValidationError("solve result source mask grid mismatch");
    res.accepted_order.clear(); // acceptance ranks are not persisted
    return res;
}

} // namespace eikjohn
