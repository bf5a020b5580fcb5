#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <eikjohn/grid.hpp>
#include <eikjohn/morphology.hpp>

#include "support/reference.hpp"

using namespace eikjohn;

namespace {

RegionMask random_mask(const GridSpec& g, double fill, unsigned seed) {
  RegionMask m(g);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (cell_t c = 0; c < g.cell_count(); ++c) m.set(c, u(rng) < fill);
  return m;
}

}  // namespace

TEST_CASE("box2d tiles the requested box with cell centers") {
  const GridSpec g = GridSpec::box2d(-4.0, 4.0, -4.0, 4.0, 0.5);
  CHECK(g.dim == 2);
  CHECK(g.shape[0] == 16);
  CHECK(g.shape[1] == 16);
  CHECK(g.shape[2] == 1);
  CHECK(g.h == doctest::Approx(0.5));
  // First center is half a cell inside the box; last is half a cell from the top.
  CHECK(g.origin[0] == doctest::Approx(-3.75));
  CHECK(g.origin[1] == doctest::Approx(-3.75));
  const Vec last = g.center(15, 15);
  CHECK(last[0] == doctest::Approx(3.75));
  CHECK(last[1] == doctest::Approx(3.75));
  CHECK(g.cell_count() == 256);
  g.validate();
}

TEST_CASE("index and coords are inverse, row-major with last axis fastest") {
  GridSpec g;
  g.dim = 3;
  g.shape = {4, 5, 6};
  g.h = 0.25;
  g.validate();
  cell_t running = 0;
  for (cell_t i = 0; i < 4; ++i)
    for (cell_t j = 0; j < 5; ++j)
      for (cell_t k = 0; k < 6; ++k) {
        const cell_t idx = g.index(i, j, k);
        CHECK(idx == running);
        ++running;
        const auto c = g.coords(idx);
        CHECK(c[0] == i);
        CHECK(c[1] == j);
        CHECK(c[2] == k);
      }
}

TEST_CASE("nearest_cell clamps and covers detects the cell box") {
  const GridSpec g = GridSpec::box2d(0.0, 1.0, 0.0, 1.0, 0.25);
  CHECK(g.shape[0] == 4);
  CHECK(g.nearest_cell({0.125, 0.125, 0.0}) == g.index(0, 0));
  CHECK(g.nearest_cell({0.9, 0.9, 0.0}) == g.index(3, 3));
  CHECK(g.nearest_cell({-5.0, 0.5, 0.0}) == g.nearest_cell({0.0, 0.5, 0.0}));
  CHECK(g.covers({0.5, 0.5, 0.0}));
  CHECK(g.covers({0.001, 0.001, 0.0}));
  CHECK_FALSE(g.covers({1.2, 0.5, 0.0}));
}

TEST_CASE("validate rejects malformed specs") {
  GridSpec g = GridSpec::box2d(0.0, 1.0, 0.0, 1.0, 0.25);
  GridSpec bad = g;
  bad.h = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = g;
  bad.shape[0] = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = g;
  bad.dim = 4;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = g;
  bad.shape[2] = 2;  // 2D grid must have a flat third axis
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = g;
  bad.shape = {1 << 14, 1 << 14, 1};  // over the cell cap
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("interp reproduces affine fields exactly and clamps outside") {
  const GridSpec g = GridSpec::box2d(-1.0, 1.0, -1.0, 1.0, 0.125);
  GridField f(g);
  for (cell_t c = 0; c < g.cell_count(); ++c) {
    const Vec p = g.center(c);
    f.at(c) = 2.0 * p[0] - 3.0 * p[1] + 0.5;
  }
  CHECK(f.interp({0.3, -0.4, 0.0}) == doctest::Approx(2.0 * 0.3 + 3.0 * 0.4 + 0.5));
  CHECK(f.interp({0.0, 0.0, 0.0}) == doctest::Approx(0.5));
  // Clamped beyond the border: equals the value at the clamp point.
  const double edge = f.interp({5.0, 0.0, 0.0});
  const double at_edge = f.interp({g.origin[0] + g.h * double(g.shape[0] - 1), 0.0, 0.0});
  CHECK(edge == doctest::Approx(at_edge));

  const Vec grad = f.gradient({0.25, 0.25, 0.0});
  CHECK(grad[0] == doctest::Approx(2.0));
  CHECK(grad[1] == doctest::Approx(-3.0));
}

TEST_CASE("interp falls back to finite corners when a corner is unreached") {
  const GridSpec g = GridSpec::box2d(0.0, 1.0, 0.0, 1.0, 0.5);
  GridField f(g, 1.0);
  f.at(g.index(0, 0)) = std::numeric_limits<double>::infinity();
  // Query inside the patch whose corners are (0,0),(0,1),(1,0),(1,1).
  const double val = f.interp({0.4, 0.4, 0.0});
  CHECK(std::isfinite(val));
  CHECK(val == doctest::Approx(1.0));

  GridField all_inf(g, std::numeric_limits<double>::infinity());
  CHECK(std::isinf(all_inf.interp({0.4, 0.4, 0.0})));
}

TEST_CASE("mask count, border contact, and compactness validation") {
  const GridSpec g = GridSpec::box2d(0.0, 1.0, 0.0, 1.0, 0.125);
  RegionMask m(g);
  CHECK(m.empty());
  CHECK_THROWS_AS(m.validate_compact("test"), ValidationError);
  m.set(g.index(3, 4), true);
  m.set(g.index(3, 5), true);
  CHECK(m.count() == 2);
  CHECK_FALSE(m.touches_border());
  m.validate_compact("test");
  m.set(g.index(0, 2), true);
  CHECK(m.touches_border());
  CHECK_THROWS_AS(m.validate_compact("test"), ValidationError);
  const auto cells = m.cells();
  CHECK(cells.size() == 3);
  CHECK(std::is_sorted(cells.begin(), cells.end()));
}

TEST_CASE("curve length, arc-length sampling, and joining") {
  Curve c({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}});
  CHECK(c.length() == doctest::Approx(2.0));
  const Vec mid = c.at(0.5);
  CHECK(mid[0] == doctest::Approx(0.5));
  CHECK(mid[1] == doctest::Approx(0.0));
  const Vec turn = c.at(1.5);
  CHECK(turn[0] == doctest::Approx(1.0));
  CHECK(turn[1] == doctest::Approx(0.5));
  // Clamped beyond both ends.
  CHECK(c.at(-1.0)[0] == doctest::Approx(0.0));
  CHECK(c.at(9.0)[1] == doctest::Approx(1.0));

  Curve tail({{1, 1, 0}, {2, 1, 0}});
  const Curve full = c.joined(tail);
  CHECK(full.size() == 4);  // duplicated joint vertex dropped
  CHECK(full.length() == doctest::Approx(3.0));
}

TEST_CASE("squared distance transform: frozen hand-checked values") {
  // Single row, sites at j=2 and j=7.
  GridSpec g;
  g.dim = 2;
  g.shape = {1, 10, 1};
  g.h = 1.0;
  g.origin = {0, 0, 0};
  RegionMask m(g);
  m.set(g.index(0, 2), true);
  m.set(g.index(0, 7), true);
  const auto d = distance_transform_sq(m);
  const std::vector<std::int64_t> want = {4, 1, 0, 1, 4, 4, 1, 0, 1, 4};
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(d[i] == want[i]);
}

TEST_CASE("squared distance transform matches brute force on random 2D masks") {
  const GridSpec g = GridSpec::box2d(0.0, 2.4, 0.0, 1.7, 0.1);
  for (unsigned seed : {1u, 2u, 3u}) {
    for (double fill : {0.02, 0.15, 0.6}) {
      const RegionMask m = random_mask(g, fill, seed);
      if (m.empty()) continue;
      const auto fast = distance_transform_sq(m);
      const auto slow = reference::dt_bruteforce_sq(m);
      const auto serial = reference::edt_serial_sq(m);
      REQUIRE(fast.size() == slow.size());
      for (std::size_t i = 0; i < fast.size(); ++i) {
        CHECK(fast[i] == slow[i]);
        CHECK(serial[i] == slow[i]);
      }
    }
  }
}

TEST_CASE("squared distance transform matches brute force on a 3D mask") {
  const GridSpec g = GridSpec::box3d(0.0, 0.9, 0.0, 0.8, 0.0, 0.7, 0.1);
  const RegionMask m = random_mask(g, 0.08, 7u);
  REQUIRE_FALSE(m.empty());
  const auto fast = distance_transform_sq(m);
  const auto slow = reference::dt_bruteforce_sq(m);
  for (std::size_t i = 0; i < fast.size(); ++i) CHECK(fast[i] == slow[i]);
}

TEST_CASE("distance transform in world units and signed variant") {
  const GridSpec g = GridSpec::box2d(0.0, 1.0, 0.0, 1.0, 0.1);
  RegionMask m(g);
  // 2x2 block near the middle.
  for (cell_t i = 4; i <= 5; ++i)
    for (cell_t j = 4; j <= 5; ++j) m.set(g.index(i, j), true);
  const GridField d = distance_transform(m);
  CHECK(d.at(g.index(4, 4)) == doctest::Approx(0.0));
  CHECK(d.at(g.index(4, 7)) == doctest::Approx(0.2));
  CHECK(d.at(g.index(2, 2)) == doctest::Approx(0.1 * std::sqrt(8.0)));

  const GridField s = signed_distance_transform(m);
  CHECK(s.at(g.index(4, 7)) == doctest::Approx(0.2));
  CHECK(s.at(g.index(4, 4)) < 0.0);   // interior of the region is negative
  CHECK(s.at(g.index(4, 4)) == doctest::Approx(-0.1));

  RegionMask empty(g);
  CHECK_THROWS_AS(distance_transform(empty), DomainError);
  RegionMask full(g, true);
  CHECK_THROWS_AS(signed_distance_transform(full), DomainError);
}

TEST_CASE("dilation matches brute force, including exact radii") {
  const GridSpec g = GridSpec::box2d(0.0, 2.0, 0.0, 1.5, 0.1);
  const RegionMask m = random_mask(g, 0.05, 11u);
  REQUIRE_FALSE(m.empty());
  const double h = g.h;
  for (double r : {0.0, h, 2.5 * h, std::sqrt(2.0) * h, 5.0 * h}) {
    const RegionMask fast = dilate_by_ball(m, r);
    const RegionMask slow = reference::dilate_bruteforce(m, r);
    REQUIRE(fast.m.size() == slow.m.size());
    for (std::size_t i = 0; i < fast.m.size(); ++i) CHECK(fast.m[i] == slow.m[i]);
  }
  // r = 0 is the identity.
  const RegionMask same = dilate_by_ball(m, 0.0);
  for (std::size_t i = 0; i < m.m.size(); ++i) CHECK(same.m[i] == m.m[i]);
}

TEST_CASE("boundary cells match brute force") {
  const GridSpec g = GridSpec::box2d(0.0, 2.0, 0.0, 1.5, 0.1);
  for (unsigned seed : {3u, 4u}) {
    const RegionMask m = random_mask(g, 0.3, seed);
    const RegionMask fast = boundary_cells(m);
    const RegionMask slow = reference::boundary_bruteforce(m);
    for (std::size_t i = 0; i < fast.m.size(); ++i) CHECK(fast.m[i] == slow.m[i]);
  }
  // A filled rectangle's boundary is its one-cell frame.
  RegionMask rect(g);
  for (cell_t i = 3; i <= 8; ++i)
    for (cell_t j = 2; j <= 9; ++j) rect.set(g.index(i, j), true);
  const RegionMask frame = boundary_cells(rect);
  CHECK(frame.count() == 2 * 6 + 2 * 8 - 4);
}

TEST_CASE("hausdorff distance matches brute force and is asymmetric one-sided") {
  const GridSpec g = GridSpec::box2d(0.0, 2.0, 0.0, 2.0, 0.1);
  const RegionMask a = random_mask(g, 0.08, 21u);
  const RegionMask b = random_mask(g, 0.08, 22u);
  REQUIRE_FALSE(a.empty());
  REQUIRE_FALSE(b.empty());
  CHECK(hausdorff_distance(a, b) == doctest::Approx(reference::hausdorff_bruteforce(a, b)));

  // Subset: directed distance from the subset is 0, the reverse is not.
  RegionMask big(g), small(g);
  for (cell_t i = 5; i <= 14; ++i)
    for (cell_t j = 5; j <= 14; ++j) big.set(g.index(i, j), true);
  small.set(g.index(9, 9), true);
  CHECK(directed_hausdorff(small, big) == doctest::Approx(0.0));
  CHECK(directed_hausdorff(big, small) == doctest::Approx(0.1 * std::sqrt(50.0)));
  CHECK(hausdorff_distance(big, small) == doctest::Approx(0.1 * std::sqrt(50.0)));
}

TEST_CASE("measure is cell count times cell volume") {
  const GridSpec g = GridSpec::box2d(0.0, 1.0, 0.0, 1.0, 0.25);
  RegionMask m(g);
  m.set(0, true);
  m.set(5, true);
  m.set(9, true);
  CHECK(measure(m) == doctest::Approx(3 * 0.25 * 0.25));
}

TEST_CASE("connected components: face adjacency, deterministic labels") {
  const GridSpec g = GridSpec::box2d(0.0, 1.0, 0.0, 1.0, 0.125);
  RegionMask m(g);
  // Blob A: two face-adjacent cells. Blob B: diagonal from A (not connected).
  m.set(g.index(1, 1), true);
  m.set(g.index(1, 2), true);
  m.set(g.index(2, 3), true);  // diagonal to (1,2): separate component
  m.set(g.index(6, 6), true);
  const auto [count, labels] = connected_components(m);
  CHECK(count == 3);
  CHECK(labels[std::size_t(g.index(1, 1))] == 0);
  CHECK(labels[std::size_t(g.index(1, 2))] == 0);
  CHECK(labels[std::size_t(g.index(2, 3))] == 1);
  CHECK(labels[std::size_t(g.index(6, 6))] == 2);
  CHECK(labels[std::size_t(g.index(0, 0))] == -1);

  RegionMask empty(g);
  CHECK(connected_components(empty).first == 0);
}
