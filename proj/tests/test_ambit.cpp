// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "ambit_gen.hpp"
#include "sprawl/ambit.hpp"
#include "sprawl/error.hpp"
#include "support.hpp"

using namespace sprawl;

namespace {
std::vector<double> v(std::initializer_list<double> x) { return x; }
}  // namespace

TEST_CASE("membership examples") {
    CHECK(member(ball_form(0.5), v({0.3})));
    AmbitForm shell(1, {-1, 1}, {-0.2, 0.5});
    CHECK_FALSE(member(shell, v({0.1})));
    CHECK(member(shell, v({0.2})));
    AmbitForm vor(3, {1, -1, 0, 1, 0, -1}, {0, 0});
    // Row 2: 1.0 - 0.9 = 0.1 > 0.
    CHECK_FALSE(member(vor, v({1.0, 1.2, 0.9})));
    CHECK(member(vor, v({0.8, 1.2, 0.9})));
    CHECK_THROWS_AS(member(ball_form(1), v({1, 2})), Error);
}

TEST_CASE("ball overlap examples") {
    CHECK_FALSE(ball_overlap(ball_form(0.5), v({1.0}), 0.4));
    CHECK_FALSE(ball_overlap(inverted_ball_form(0.5), v({0.2}), 0.1));
    CHECK(ball_overlap(shell_form(0.7, 0.7), v({0.65}), 0.1));
    CHECK_THROWS_AS(ball_overlap(ball_form(1), v({1}), -0.1), Error);
    CHECK_THROWS_AS(ball_overlap(ball_form(1), v({1, 1}), 0.1), Error);
}

TEST_CASE("shell construction") {
    auto s = shell_from_bounds(4, 0.2, 0.5);
    CHECK(s.foci == std::vector<PointId>{4});
    CHECK(s.form.coeffs() == v({-1, 1}));
    CHECK(s.form.radii() == v({-0.2, 0.5}));
    CHECK(member(s, v({0.3})));
    auto sphere_form = shell_form(0.7, 0.7);
    CHECK(member(sphere_form, v({0.7})));
    CHECK_FALSE(member(sphere_form, v({0.71})));
    CHECK(member(shell_form(0, kUnbounded), v({1e300})));
    CHECK_THROWS_AS(shell_form(0.5, 0.2), Error);
    CHECK_THROWS_AS(shell_form(-0.1, 0.2), Error);
}

TEST_CASE("ambit shape validation") {
    CHECK_THROWS_AS(AmbitForm(2, {0, 0}, {1}), Error);        // zero row
    CHECK_THROWS_AS(AmbitForm(2, {1, 0, 1}, {1}), Error);     // ragged
    CHECK_THROWS_AS(AmbitForm(1, {1}, {}), Error);            // no rows
    CHECK_THROWS_AS(LinearAmbit({1, 2}, ball_form(1)), Error);  // foci vs columns
    CHECK(classify(ball_form(1)) == AmbitShape::Ball);
    CHECK(classify(inverted_ball_form(1)) == AmbitShape::InvertedBall);
    CHECK(classify(shell_form(1, 2)) == AmbitShape::Shell);
    CHECK(classify(hyperplane(0, 1).form) == AmbitShape::Other);
}

TEST_CASE("voronoi cells for three foci") {
    auto cells = voronoi_regions({5, 6, 7});
    REQUIRE(cells.size() == 3);
    for (const auto& c : cells) CHECK(c.form.rows() == 2);
    CHECK(cells[0].form.coeffs() == v({1, -1, 0, 1, 0, -1}));
    CHECK(cells[0].form.radii() == v({0, 0}));
    // The overlap check is the conjunction of z_i - z_j <= 2s.
    ref::Gen g(17);
    for (int t = 0; t < 2000; ++t) {
        auto z = g.vec(3);
        double s = g.uniform(0, 0.3);
        bool expect = z[0] - z[1] <= 2 * s + 1e-9 && z[0] - z[2] <= 2 * s + 1e-9;
        REQUIRE(ball_overlap(cells[0], z, s) == expect);
    }
    // The argmin cell (ties to the lowest index) always accepts the point.
    for (int t = 0; t < 2000; ++t) {
        std::vector<double> x{(double)g.below(3), (double)g.below(3), (double)g.below(3)};
        std::size_t best = 0;
        for (std::size_t i = 1; i < 3; ++i)
            if (x[i] < x[best]) best = i;
        REQUIRE(member(cells[best], x));
    }
    CHECK_THROWS_AS(voronoi_regions({1}), Error);
}

TEST_CASE("general overlap examples") {
    ref::Gen g(5);
    for (int t = 0; t < 1000; ++t) {
        double r = g.uniform(0, 1), s = g.uniform(0, 1), d = g.uniform(0, 2.5);
        CrossDistanceMatrix z(1, 1, {d});
        bool got = general_overlap(ball_form(r), ball_form(s), z);
        REQUIRE(got == (d <= r + s + 1e-9));
        // Bitwise agreement with the ball check.
        REQUIRE(got == ball_overlap(ball_form(r), v({d}), s));
    }
    // Half-space over two foci vs a ball: z1 - z2 <= 2s.
    AmbitForm half(2, {0.5, -0.5}, {0});
    for (int t = 0; t < 1000; ++t) {
        double z1 = g.unit(), z2 = g.unit(), s = g.uniform(0, 0.5);
        CrossDistanceMatrix z(2, 1, {z1, z2});
        REQUIRE(general_overlap(half, ball_form(s), z) == (z1 - z2 <= 2 * s + 1e-9));
        REQUIRE(general_overlap(hyperplane(0, 1).form, ball_form(s), z) == (z1 - z2 <= 2 * s + 1e-9));
    }
    CHECK_THROWS_AS(general_overlap(ball_form(1), ball_form(1), CrossDistanceMatrix(2, 1)), Error);
}

TEST_CASE("property: general overlap never misses a grid witness (50 pairs)") {
    ref::Gen g(2024);
    int witnessed = 0;
    for (int t = 0; t < 50; ++t) {
        auto p = ref::random_planar_pair(g);
        if (ref::has_witness(p, 120)) {
            ++witnessed;
            REQUIRE(general_overlap(p.region, p.query, ref::cross(p)));
        }
    }
    CHECK(witnessed > 5);
}

TEST_CASE("property: ball overlap soundness by brute force") {
    ref::Gen g(77);
    for (int t = 0; t < 300; ++t) {
        ref::PlanarPair p = ref::random_planar_pair(g);
        auto q = g.vec(2);
        double s = g.uniform(0, 0.4);
        std::vector<double> zq = ref::pivots_of(p.region_foci, q);
        bool witness = false;
        for (int i = 0; i < 400 && !witness; ++i) {
            auto u = g.vec(2);
            witness = ref::inside(p.region, ref::pivots_of(p.region_foci, u)) && ref::euclid(q, u) <= s;
        }
        if (witness) REQUIRE(ball_overlap(p.region, zq, s));
    }
}

TEST_CASE("property: shell decomposition is exact") {
    ref::Gen g(8);
    for (int t = 0; t < 10000; ++t) {
        double lo = g.uniform(0, 1), hi = lo + g.uniform(0, 1), x = g.uniform(0, 2.5);
        REQUIRE(member(shell_from_bounds(0, lo, hi), v({x})) == (lo <= x && x <= hi));
    }
}

TEST_CASE("property: M-tree shell equivalence") {
    ref::Gen g(9);
    for (int t = 0; t < 100000; ++t) {
        double x = g.uniform(0, 2), r = g.uniform(0, 1), z = g.uniform(0, 3), s = g.uniform(0, 1);
        bool lhs = std::fabs(z - x) <= r + s + 1e-9;
        REQUIRE(lhs == ball_overlap(shell_form(std::max(x - r, 0.0), x + r), v({z}), s));
    }
}

TEST_CASE("property: single non-negative row matches f(z) <= r + f(s)") {
    ref::Gen g(10);
    for (int t = 0; t < 5000; ++t) {
        const std::size_t m = 1 + g.below(4);
        std::vector<double> a(m), z(m);
        for (double& c : a) c = g.uniform(0, 2);
        a[0] += 0.1;
        for (double& c : z) c = g.uniform(0, 2);
        double r = g.uniform(0, 3), s = g.uniform(0, 1);
        double fz = 0, fs = 0;
        for (std::size_t k = 0; k < m; ++k) {
            fz += a[k] * z[k];
            fs += a[k] * s;
        }
        bool expect = fz <= r + fs + 1e-9;
        bool got = ball_overlap(AmbitForm(m, a, {r}), z, s);
        // Tolerate only disagreements within floating noise of the boundary.
        if (std::fabs(fz - r - fs) > 1e-7) REQUIRE(got == expect);
    }
}

TEST_CASE("lower bound") {
    CHECK(lower_bound(ball_form(0.5), v({0.2})) == 0.0);
    CHECK(lower_bound(ball_form(0.5), v({0.9})) == doctest::Approx(0.4));
    CHECK(lower_bound(shell_form(0.7, 0.7), v({0.5})) == doctest::Approx(0.2));
    // Any s below the bound prunes; any s at or above it does not.
    ref::Gen g(12);
    for (int t = 0; t < 3000; ++t) {
        auto p = ref::random_planar_pair(g);
        auto z = ref::pivots_of(p.region_foci, g.vec(2));
        double lb = lower_bound(p.region, z);
        REQUIRE(ball_overlap(p.region, z, lb));
        if (lb > 1e-6) REQUIRE_FALSE(ball_overlap(p.region, z, lb * 0.99 - 1e-8));
    }
}

TEST_CASE("query ambit constructors") {
    Payload a = v({0, 0}), b = v({1, 0});
    auto h = hyperplane_query(a, b, 0);
    CHECK(h.form.coeffs() == v({1, -1}));
    auto e = ellipse_query(a, b, 2);
    CHECK(e.form.coeffs() == v({1, 1}));
    CHECK(e.form.radii() == v({2}));
    auto q = ball_query(a, 0.3);
    CHECK(q.foci.size() == 1);
    CHECK(q.form == ball_form(0.3));
}
