#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "eikjohn/errors.hpp"
#include "eikjohn/metric.hpp"
#include "eikjohn/morphology.hpp"
#include "eikjohn/scenarios.hpp"

using namespace eikjohn;

namespace {

// Brute-force membership in conv(B_r0(c0) u B_r1(c1)): scan the interpolated
// balls directly. Also returns a signed margin estimate (negative inside).
double hull_margin_brute(const Vec& p, const Vec& c0, double r0, const Vec& c1, double r1) {
    double best = std::numeric_limits<double>::infinity();
    const int n = 4000;
    for (int k = 0; k <= n; ++k) {
        const double lam = double(k) / n;
        const double cx = (1 - lam) * c0[0] + lam * c1[0];
        const double cy = (1 - lam) * c0[1] + lam * c1[1];
        const double rad = (1 - lam) * r0 + lam * r1;
        best = std::min(best, std::hypot(p[0] - cx, p[1] - cy) - rad);
    }
    return best;
}

double field_mirror_asymmetry(const ScenarioSpec& s) {
    const GridSpec& g = s.grid;
    double worst = 0.0;
    for (cell_t i = 0; i < g.shape[0]; ++i)
        for (cell_t j = 0; j < g.shape[1]; ++j)
            worst = std::max(worst, std::abs(s.model.alpha.at(g.index(i, j)) -
                                             s.model.alpha.at(g.index(g.shape[0] - 1 - i, j))));
    return worst;
}

bool in_annulus_segment(const Vec& p, double r_in, double r_out, double half_angle) {
    const double rr = std::hypot(p[0], p[1]);
    return rr >= r_in && rr <= r_out && std::abs(std::atan2(p[1], p[0])) <= half_angle;
}

} // namespace

TEST_CASE("cone-sphere membership agrees with the brute-force hull scan") {
    const Vec c0{0.2, -0.1, 0}, c1{0.9, 1.1, 0};
    const double r0 = 0.5, r1 = 0.2;
    int checked = 0;
    for (double x = -0.8; x <= 1.9; x += 0.07)
        for (double y = -1.1; y <= 1.9; y += 0.07) {
            const Vec p{x, y, 0};
            const double margin = hull_margin_brute(p, c0, r0, c1, r1);
            if (std::abs(margin) < 2e-3) continue; // skip the ambiguous boundary shell
            CHECK(cone_sphere_contains(p, c0, r0, c1, r1) == (margin < 0));
            ++checked;
        }
    CHECK(checked > 500);

    SUBCASE("degenerate hull: one ball swallows the other") {
        CHECK(cone_sphere_contains({0.05, 0.0, 0}, {0, 0, 0}, 1.0, {0.1, 0, 0}, 0.2));
        CHECK_FALSE(cone_sphere_contains({1.2, 0.0, 0}, {0, 0, 0}, 1.0, {0.1, 0, 0}, 0.2));
    }
}

TEST_CASE("chained cones: junctions are seamless and offsets accumulate to x*") {
    const double beta = 0.1;
    // o_1 = (1/2, 1) is simultaneously the tip ball of copy 0's side lobe and
    // the base ball of copy 1, with equal radii: it is inside even at depth 0.
    CHECK(chained_cones_contain({0.5, 1.0, 0}, beta, 0));
    CHECK(chained_cones_contain({0.5, 1.0, 0}, beta, 4));
    // o_2 = o_1 + (1/8, 1/4)
    CHECK(chained_cones_contain({0.625, 1.25, 0}, beta, 2));
    // the straight gap just above a junction along +y stays inside (base cone)
    CHECK(chained_cones_contain({0.5, 1.05, 0}, beta, 1));

    SUBCASE("offset accumulation: o_i + (4/3) 4^{-i} (1/2,1) = (2/3, 4/3)") {
        double ox = 0, oy = 0, s = 1.0;
        for (int i = 0; i < 3; ++i) {
            ox += 0.5 * s;
            oy += 1.0 * s;
            s *= 0.25;
        }
        // after 3 copies s = 4^{-3} and o_3 = (ox, oy)
        CHECK(ox + (4.0 / 3.0) * s * 0.5 == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
        CHECK(oy + (4.0 / 3.0) * s * 1.0 == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    }

    SUBCASE("the accumulation point itself lies beyond every truncated copy") {
        CHECK_FALSE(chained_cones_contain({2.0 / 3.0, 4.0 / 3.0, 0}, beta, 4));
    }

    SUBCASE("deeper truncations only add detail near the accumulation point") {
        const GridSpec g = GridSpec::box2d(-0.5, 1.5, -0.5, 2.0, 1.0 / 128);
        int diff = 0;
        for (cell_t c = 0; c < g.cell_count(); ++c) {
            const Vec p = g.center(c);
            if (chained_cones_contain(p, beta, 1) != chained_cones_contain(p, beta, 2)) {
                ++diff;
                // the second copy lives within |o_2 - x*| + its own extent of x*
                CHECK(std::hypot(p[0] - 2.0 / 3.0, p[1] - 4.0 / 3.0) < 0.18);
            }
        }
        CHECK(diff > 0);
    }
}

TEST_CASE("baseline disk: exact unit field, symmetric grid, full claim set") {
    const ScenarioSpec s = scenario_eikonal_baseline(BaselineShape::Disk, 1.0, 1.0 / 64);
    CHECK(s.name == "baseline_disk");
    CHECK(bounds_of(s.model).alpha_lo == 1.0);
    CHECK(bounds_of(s.model).alpha_hi == 1.0);
    CHECK(s.seed.has_value());
    CHECK(s.seed->kappa0 == 1.0);
    CHECK(s.params.at("max_adjacent_jump") == 0.0);

    // source mask equals the brute membership test cell by cell
    for (cell_t c = 0; c < s.grid.cell_count(); c += 7) {
        const Vec p = s.grid.center(c);
        CHECK(s.source.at(c) == (std::hypot(p[0], p[1]) <= 1.0));
    }
    // mirrored centers are exact FP negatives (symmetric snapped extents)
    const GridSpec& g = s.grid;
    for (cell_t i = 0; i < g.shape[0]; i += 13)
        CHECK(g.center(i, 0)[0] == -g.center(g.shape[0] - 1 - i, 0)[0]);

    const std::set<std::string> cl(s.claims.begin(), s.claims.end());
    CHECK(cl.count("eq:CJohn") == 1);
    CHECK(cl.count("eq:hoelder") == 1);
    CHECK(s.john_times.back() == 2.5);
}

TEST_CASE("baseline annulus segment: bent provider curves stay inside the source") {
    const ScenarioSpec s = scenario_eikonal_baseline(BaselineShape::AnnulusSegment, 1.0, 1.0 / 64);
    CHECK(s.seed.has_value());
    CHECK(s.seed->kappa0 == 0.0);
    const double half_angle = s.params.at("half_angle");
    for (double th : {-2.0, -1.0, 0.3, 1.7}) {
        for (double rr : {1.1, 1.5, 1.9}) {
            const Vec p{rr * std::cos(th), rr * std::sin(th), 0};
            const Curve c = s.seed->curve_provider(p);
            REQUIRE(c.size() >= 2);
            for (const Vec& q : c.pts) CHECK(in_annulus_segment(q, 1.0, 2.0, half_angle + 1e-9));
            // the curve ends at the seed center
            CHECK(std::hypot(c.pts.back()[0] - 1.5, c.pts.back()[1]) < 1e-12);
        }
    }
}

TEST_CASE("sharp kinds: segment rows, slab constant, two-ball disconnection oracle") {
    SUBCASE("segment is a thin row pair through the origin") {
        const ScenarioSpec s = scenario_sharp_k(SharpKind::Segment, 1.0 / 64);
        CHECK(s.seed->kappa0 == 0.0);
        for (cell_t c : s.source.cells()) {
            const Vec p = s.grid.center(c);
            CHECK(std::abs(p[0]) <= 1.0 + 1e-12);
            CHECK(std::abs(p[1]) <= 0.75 / 64 + 1e-12);
        }
        CHECK(s.source.count() > 0);
    }
    SUBCASE("slab records the rectangle John constant, not the unbounded limit") {
        const ScenarioSpec s = scenario_sharp_k(SharpKind::Slab, 1.0 / 64);
        CHECK(s.params.at("kappa0") == doctest::Approx(1.0 / std::sqrt(7.25)).epsilon(1e-12));
        CHECK(!s.notes.empty());
    }
    SUBCASE("two balls: dilations by the claim radii have 2 then 1 components") {
        const ScenarioSpec s = scenario_sharp_k(SharpKind::TwoBalls, 1.0 / 64);
        CHECK_FALSE(s.seed.has_value());
        CHECK(connected_components(s.source).first == 2);
        // constant speed 1: the sublevel at t equals the dilation by t, so the
        // component claim reduces to dilation geometry
        CHECK(connected_components(dilate_by_ball(s.source, 0.5)).first == 2);
        CHECK(connected_components(dilate_by_ball(s.source, 2.0)).first == 1);
        const std::set<std::string> cl(s.claims.begin(), s.claims.end());
        CHECK(cl.count("sec3.1-disconnect") == 1);
        CHECK(cl.count("eq:CJohn") == 1); // reported not-applicable downstream
    }
}

TEST_CASE("fast-column scenario: validity gates") {
    SUBCASE("speed ratio at most sqrt(5) is rejected by name") {
        CHECK_THROWS_WITH_AS(scenario_ex1(0.4, 0.1, 1.0, 2.0, 0.5, 1.0 / 128),
                             doctest::Contains("eq:condition"), ConfigError);
    }
    SUBCASE("blend width above 0.1 is rejected") {
        CHECK_THROWS_AS(scenario_ex1(0.4, 0.2, 1.0, 3.0, 0.5, 1.0 / 128), ConfigError);
    }
    SUBCASE("unresolved blend band names the required spacing") {
        CHECK_THROWS_WITH_AS(scenario_ex1(0.4, 0.05, 1.0, 3.0, 0.5, 1.0 / 128),
                             doctest::Contains("require h <="), ConfigError);
    }
    SUBCASE("a too-small probe gap is recorded, not thrown") {
        const ScenarioSpec s = scenario_ex1(0.7, 0.1, 1.0, 3.0, 0.69, 1.0 / 128);
        CHECK(s.params.at("probe_gap_ok") == 0.0); // (3-1)*0.69 = 1.38 <= 2*0.7
    }
}

TEST_CASE("fast-column scenario: field structure at the working resolution") {
    const double h = 1.0 / 128;
    const ScenarioSpec s = scenario_ex1(0.7, 0.1, 1.0, 3.0, 0.75, h);
    CHECK(bounds_of(s.model).alpha_lo == 1.0);
    CHECK(bounds_of(s.model).alpha_hi == 3.0);
    CHECK(field_mirror_asymmetry(s) == 0.0);

    const GridSpec& g = s.grid;
    const double delta = 0.7, eps = 0.1;
    double prev = 4.0;
    for (cell_t i = 0; i < g.shape[0]; ++i) {
        const cell_t c = g.index(i, g.shape[1] / 2);
        const double x = g.center(c)[0];
        if (x < 0) continue;
        const double a = s.model.alpha.at(c);
        if (x <= delta) CHECK(a == 3.0);
        if (x >= (1 + eps) * delta) CHECK(a == 1.0);
        CHECK(a <= prev + 1e-15); // non-increasing in |x|
        prev = a;
    }

    SUBCASE("probe geometry: x0 on the 2delta ball through the apex") {
        CHECK(s.params.at("x0_x") == doctest::Approx(1.4));
        CHECK(s.params.at("x0_y") == doctest::Approx(3.0 * 0.75 - 1.4));
        CHECK(s.params.at("apex_y") == doctest::Approx(2.25));
        CHECK(s.params.at("probe_gap_ok") == 1.0);
        const double bx = s.params.at("x0_x") - s.params.at("apex_x");
        const double by = s.params.at("x0_y") - (s.params.at("apex_y") - s.params.at("ball_radius"));
        CHECK(std::hypot(bx, by) == doctest::Approx(s.params.at("ball_radius")).epsilon(1e-12));
    }

    SUBCASE("source has the flat top and the rounded caps") {
        const double R = s.params.at("flat_radius");
        CHECK(s.source.at(g.nearest_cell({0.0, -h, 0})));
        CHECK_FALSE(s.source.at(g.nearest_cell({0.0, h, 0})));
        CHECK(s.source.at(g.nearest_cell({R, -0.3, 0})));
        CHECK(s.source.at(g.nearest_cell({R + 0.25, -0.3, 0})));
        CHECK_FALSE(s.source.at(g.nearest_cell({R + 0.35, -0.3, 0})));
        s.source.validate_compact("ex1 source");
    }
}

TEST_CASE("ratio-cone scenario: validity, regions, and the impassable lid") {
    SUBCASE("eq:beta violation is rejected with the inequality") {
        CHECK_THROWS_WITH_AS(scenario_ex3(0.6, 0.65, 0.05, 0.4, 1.0, 3.0, 1.0 / 128),
                             doctest::Contains("eq:beta"), ConfigError);
    }
    SUBCASE("angle ordering is enforced") {
        CHECK_THROWS_AS(scenario_ex3(0.9, 0.6, 0.05, 0.4, 1.0, 3.0, 1.0 / 128), ConfigError);
        CHECK_THROWS_AS(scenario_ex3(0.6, 0.62, 0.05, 0.4, 1.0, 3.0, 1.0 / 128), ConfigError);
    }

    const double h = 1.0 / 128;
    // grove disabled: these subcases pin the bare cone field
    const ScenarioSpec s = scenario_ex3(0.6, 0.92, 0.2, 0.4, 1.0, 3.0, h, 0);
    const GridSpec& g = s.grid;
    const double apex_y = s.params.at("apex_y");
    CHECK(apex_y == doctest::Approx(1.2));

    SUBCASE("cells at or above the apex height are impassable") {
        REQUIRE(s.model.domain.has_value());
        CHECK_FALSE(s.model.passable(g.nearest_cell({0.0, apex_y + 2 * h, 0})));
        CHECK(s.model.passable(g.nearest_cell({0.0, apex_y - 2 * h, 0})));
        // the source itself is passable
        for (cell_t c : s.source.cells()) CHECK(s.model.passable(c));
    }

    SUBCASE("speed by direction ratio: fast inside, slow outside, monotone blend") {
        CHECK(s.model.alpha.at(g.nearest_cell({0.0, 0.6, 0})) == 3.0);
        CHECK(s.model.alpha.at(g.nearest_cell({2.0, 0.1, 0})) == 1.0);
        const double tan_b = std::tan(0.6), tan_e = std::tan(1.2 * 0.6);
        double prev = 4.0;
        // a row strictly between the source top (y = 0) and the apex
        const cell_t j = g.coords(g.nearest_cell({0.0, 0.5, 0}))[1];
        const double y = g.center(g.index(0, j))[1];
        REQUIRE(y > 0);
        REQUIRE(y < apex_y);
        for (cell_t i = g.shape[0] / 2; i < g.shape[0]; ++i) {
            const double x = g.center(g.index(i, j))[0];
            if (x < 0) continue;
            const double q = x / (apex_y - y);
            const double a = s.model.alpha.at(g.index(i, j));
            if (q <= tan_b) CHECK(a == 3.0);
            if (q >= tan_e) CHECK(a == 1.0);
            CHECK(a <= prev + 1e-15);
            prev = a;
        }
        CHECK(field_mirror_asymmetry(s) == 0.0);
    }

    SUBCASE("exact declared envelope") {
        CHECK(bounds_of(s.model).alpha_lo == 1.0);
        CHECK(bounds_of(s.model).alpha_hi == 3.0);
    }

    SUBCASE("grove: mirrored fast trees on the shoulders, ambient slow") {
        const ScenarioSpec gs = scenario_by_name("ex3", h);
        CHECK(gs.params.at("grove_levels") == 5.0);
        CHECK(gs.params.at("alpha_lo") == 0.2);
        const double rx = gs.params.at("grove_root_x");
        const double len0 = gs.params.at("grove_len0");
        // truncated traversal time sums to exactly T
        CHECK(len0 == doctest::Approx(3.0 * 0.3 * 0.4 / (1.0 - std::pow(0.7, 6))));
        // trunk interior conducts at full speed, on both mirror images
        const double tilt = gs.params.at("grove_tilt");
        const Vec mid{rx + 0.5 * len0 * std::sin(tilt), 0.5 * len0 * std::cos(tilt), 0};
        CHECK(gs.model.alpha.at(gs.grid.nearest_cell(mid)) == 3.0);
        CHECK(gs.model.alpha.at(gs.grid.nearest_cell({-mid[0], mid[1], 0})) == 3.0);
        // ambient cells between cone and grove stay slow
        CHECK(gs.model.alpha.at(gs.grid.nearest_cell({rx, -0.5, 0})) == 0.2);
        CHECK(gs.model.alpha.at(gs.grid.nearest_cell({2.9, 0.8, 0})) == 0.2);
        CHECK(field_mirror_asymmetry(gs) == 0.0);
        // the trees sit on the source top: trunk feet are wet at t = 0
        CHECK(gs.source.at(gs.grid.nearest_cell({rx, -h, 0})));
        // deeper grids resolve more levels
        CHECK(scenario_by_name("ex3", 1.0 / 256).params.at("grove_levels") == 7.0);
    }
}

TEST_CASE("chained-cone scenario: depth gating and blend envelope") {
    SUBCASE("depth presets follow the resolution gate") {
        CHECK(ex4_depth_preset(0.1, 1.0 / 128) == 3);
        CHECK(ex4_depth_preset(0.1, 1.0 / 256) == 4);
        CHECK(ex4_depth_preset(0.1, 1.0 / 512) == 4);
    }
    SUBCASE("under-resolved depth names the required h") {
        CHECK_THROWS_WITH_AS(scenario_ex4(0.1, 0.25, 0.05, 4, 1.0, 10.0, 1.0 / 128),
                             doctest::Contains("require h <="), ConfigError);
    }
    SUBCASE("depth outside [2,6] is rejected") {
        CHECK_THROWS_AS(scenario_ex4(0.1, 0.25, 0.05, 1, 1.0, 10.0, 1.0 / 128), ConfigError);
        CHECK_THROWS_AS(scenario_ex4(0.1, 0.25, 0.05, 7, 1.0, 10.0, 1.0 / 4096), ConfigError);
    }
    SUBCASE("eq:beta gate applies here too") {
        CHECK_THROWS_WITH_AS(scenario_ex4(0.1, 0.15, 0.04, 3, 1.0, 10.0, 1.0 / 128),
                             doctest::Contains("eq:beta"), ConfigError);
    }

    const ScenarioSpec s = scenario_ex4(0.1, 0.25, 0.05, 3, 1.0, 10.0, 1.0 / 128);
    const GridSpec& g = s.grid;
    CHECK(bounds_of(s.model).alpha_lo == 1.0);
    CHECK(bounds_of(s.model).alpha_hi == 10.0);
    CHECK(s.params.at("x_star_x") == doctest::Approx(2.0 / 3.0));

    SUBCASE("fast cells exact, slow cells exact, blend strictly between") {
        // center of copy 0's base ball
        CHECK(s.model.alpha.at(g.nearest_cell({0.0, 0.0, 0})) == 10.0);
        // far away from the chain
        CHECK(s.model.alpha.at(g.nearest_cell({-1.5, 1.0, 0})) == 1.0);
        for (cell_t c = 0; c < g.cell_count(); c += 5) {
            const double a = s.model.alpha.at(c);
            CHECK(a >= 1.0);
            CHECK(a <= 10.0);
        }
    }

    SUBCASE("the blend band hugs the fast chain") {
        int blend_cells = 0;
        for (cell_t c = 0; c < g.cell_count(); ++c) {
            const double a = s.model.alpha.at(c);
            if (a > 1.0 && a < 10.0) {
                ++blend_cells;
                const Vec p = g.center(c);
                CHECK(chained_cones_contain(p, 1.05 * 0.25, 3)); // inside the eta envelope
            }
        }
        CHECK(blend_cells > 0);
    }

    SUBCASE("seed ball sits inside the source") {
        REQUIRE(s.seed.has_value());
        validate_seed(*s.seed, s.source);
        CHECK(s.params.at("max_adjacent_jump") > 0.0);
        // near the deepest copy the blend band drops below one cell, so the
        // full-range jump can appear there; it can never exceed the envelope
        CHECK(s.params.at("max_adjacent_jump") <= 9.0);
    }
}

TEST_CASE("adversarial instances declare envelopes their fields violate") {
    const ScenarioSpec fast = scenario_adversarial("fast", 1.0 / 64);
    CHECK(bounds_of(fast.model).alpha_hi == 1.0);
    CHECK(fast.model.alpha.at(0) == 1.25);

    const ScenarioSpec fjord = scenario_adversarial("fjord", 1.0 / 64);
    CHECK(bounds_of(fjord.model).alpha_lo == 1.0);
    const cell_t wedge = fjord.grid.nearest_cell({1.5, 0.05, 0});
    CHECK(fjord.model.alpha.at(wedge) == 0.15);
    const cell_t outside = fjord.grid.nearest_cell({0.0, 2.0, 0});
    CHECK(fjord.model.alpha.at(outside) == 1.0);

    CHECK_THROWS_AS(scenario_adversarial("nonsense", 1.0 / 64), ConfigError);
}

TEST_CASE("registry: every name builds, fingerprints are stable, JSON round-trips") {
    const double h = 1.0 / 128;
    for (const std::string& name : scenario_names()) {
        CAPTURE(name);
        const ScenarioSpec a = scenario_by_name(name, h);
        const ScenarioSpec b = scenario_by_name(name, h);
        CHECK(a.fingerprint() == b.fingerprint());
        CHECK(a.name == name);
        a.source.validate_compact("scenario source");

        const ScenarioSpec c = scenario_from_json(a.to_json());
        CHECK(c.fingerprint() == a.fingerprint());
    }
}

TEST_CASE("registry rejects unknown names, parameters, and malformed files") {
    CHECK_THROWS_AS(scenario_by_name("no_such_thing", 1.0 / 64), ConfigError);
    CHECK_THROWS_AS(scenario_by_name("baseline_disk", 1.0 / 64, {{"bogus", 1.0}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json("not json at all"), ConfigError);
    CHECK_THROWS_AS(scenario_from_json("{\"name\": \"baseline_disk\"}"), ConfigError);
    // overriding a legitimate input works and changes the fingerprint
    const ScenarioSpec small = scenario_by_name("baseline_disk", 1.0 / 64, {{"radius", 0.5}});
    const ScenarioSpec big = scenario_by_name("baseline_disk", 1.0 / 64);
    CHECK(small.fingerprint() != big.fingerprint());
}
