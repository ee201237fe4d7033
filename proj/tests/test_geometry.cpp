#include "doctest.h"

#include <random>

#include "certificate.hpp"
#include "geometry.hpp"
#include "green.hpp"

using namespace yamabe;
using geom::Domain;

namespace {

Domain unit_cube_polytope() {
    std::vector<Vec> normals;
    std::vector<double> offsets;
    for (int a = 0; a < 3; ++a)
        for (int sgn = -1; sgn <= 1; sgn += 2) {
            Vec u = Vec::zero(3);
            u[a] = sgn;
            normals.push_back(u);
            offsets.push_back(0.5);
        }
    return Domain::polytope(std::move(normals), std::move(offsets));
}

/// Regular tetrahedron with edge length 1, centered at the origin.
Domain regular_tetrahedron() {
    double s = 1.0 / std::sqrt(8.0);
    std::vector<Vec> verts = {Vec{s, s, s}, Vec{s, -s, -s}, Vec{-s, s, -s}, Vec{-s, -s, s}};
    std::vector<Vec> normals;
    std::vector<double> offsets;
    for (int drop = 0; drop < 4; ++drop) {
        Vec c = Vec::zero(3);
        for (int v = 0; v < 4; ++v)
            if (v != drop) c = c + verts[v];
        c = c * (1.0 / 3.0);  // face centroid; outward normal points away from the
        Vec u = (c - verts[drop]).normalized();  // dropped vertex
        normals.push_back(u);
        offsets.push_back(u.dot(c));
    }
    return Domain::polytope(std::move(normals), std::move(offsets));
}

}  // namespace

TEST_CASE("volume closed forms") {
    auto ball = Domain::ball(Vec{0, 0, 0}, 1.0);
    CHECK(ball.volume() == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-14));
    auto box = Domain::box(Vec{0, 0, 0}, Vec{1, 2, 3});
    CHECK(box.volume() == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("polytope volume via Monte-Carlo vs closed forms") {
    auto cube = unit_cube_polytope();
    auto est = cube.volume_estimate(Domain::kDefaultVolumeSeed);
    CHECK(std::abs(est.value - 1.0) <= 0.005);
    CHECK(est.std_error <= 0.005 * est.value);
    CHECK(est.samples >= 1000000);

    // same seed, same estimate
    auto est2 = cube.volume_estimate(Domain::kDefaultVolumeSeed);
    CHECK(est.value == est2.value);

    auto tet = regular_tetrahedron();
    double exact = 1.0 / (6.0 * std::sqrt(2.0));  // edge-1 regular tetrahedron
    auto et = tet.volume_estimate(1234);
    CHECK(std::abs(et.value - exact) <= 3.0 * et.std_error + 1e-6);
}

TEST_CASE("unbounded and degenerate polytopes are rejected") {
    std::vector<Vec> normals = {Vec{1, 0, 0}, Vec{0, 1, 0}, Vec{0, 0, 1}};
    std::vector<double> offsets = {1, 1, 1};  // an octant corner, unbounded
    CHECK_THROWS_AS(Domain::polytope(normals, offsets), InvalidInput);

    std::vector<Vec> bad_norm = {Vec{2, 0, 0}};
    CHECK_THROWS_AS(Domain::polytope(bad_norm, {1.0}), InvalidInput);
}

TEST_CASE("slab diameter") {
    CHECK(Domain::ball(Vec{0, 0, 0}, 0.5).slab_diameter() == doctest::Approx(1.0));
    CHECK(Domain::box(Vec{0, 0, 0}, Vec{0.1, 5, 5}).slab_diameter() == doctest::Approx(0.1));

    auto tet = regular_tetrahedron();
    double w = tet.slab_diameter();
    // the minimal width of a regular tetrahedron joins opposite edge midpoints
    CHECK(w == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-5));
    // brute-force direction-scan oracle
    double oracle = geom::min_width_scan(tet, 1000000);
    CHECK(w <= oracle + 1e-12);
    CHECK(std::abs(w - oracle) <= 2e-3);
}

TEST_CASE("diameter") {
    CHECK(Domain::ball(Vec{0, 0, 0}, 0.5).diameter() == doctest::Approx(1.0));
    CHECK(Domain::box(Vec{0, 0, 0}, Vec{1, 1, 1}).diameter() ==
          doctest::Approx(std::sqrt(3.0)));
    CHECK(unit_cube_polytope().diameter() ==
          doctest::Approx(std::sqrt(3.0)).epsilon(1e-9));
}

TEST_CASE("signed distance and containment") {
    auto ball = Domain::ball(Vec{0, 0, 0}, 1.0);
    CHECK(ball.contains(Vec{0, 0, 0}));
    CHECK(ball.signed_distance(Vec{0, 0, 0}) == doctest::Approx(-1.0));
    CHECK_FALSE(ball.contains(Vec{2, 0, 0}));
    CHECK(ball.signed_distance(Vec{2, 0, 0}) == doctest::Approx(1.0));
    CHECK(unit_cube_polytope().signed_distance(Vec{0, 0, 0}) == doctest::Approx(-0.5));

    auto box = Domain::box(Vec{0, 0, 0}, Vec{1, 1, 1});
    CHECK(box.signed_distance(Vec{0.5, 0.5, 0.5}) == doctest::Approx(-0.5));
    CHECK(box.signed_distance(Vec{2, 2, 2}) == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("scaling covariances") {
    auto ball = Domain::ball(Vec{0, 0, 0}, 1.0).scaled(0.5);
    CHECK(ball.radius() == doctest::Approx(0.5));

    auto cube = unit_cube_polytope().scaled(2.0);
    CHECK(cube.volume_estimate(42).value == doctest::Approx(8.0).epsilon(0.01));

    auto tet = regular_tetrahedron();
    double ratio = tet.scaled(0.1).slab_diameter() / tet.slab_diameter();
    CHECK(ratio == doctest::Approx(0.1).epsilon(1e-6));

    // origin must be interior
    auto shifted = Domain::ball(Vec{5, 0, 0}, 1.0);
    CHECK_THROWS_AS(shifted.scaled(0.5), InvalidInput);
}

TEST_CASE("slab <= diameter on random polytopes") {
    std::mt19937_64 rng(321);
    std::normal_distribution<double> gauss(0, 1);
    std::uniform_real_distribution<double> unif(0, 1);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<Vec> normals;
        std::vector<double> offsets;
        for (int a = 0; a < 3; ++a)
            for (int sgn = -1; sgn <= 1; sgn += 2) {
                Vec u = Vec::zero(3);
                u[a] = sgn;
                normals.push_back(u);
                offsets.push_back(0.3 + 0.7 * unif(rng));
            }
        int extra = 4 + static_cast<int>(unif(rng) * 8);
        for (int i = 0; i < extra; ++i) {
            Vec u{gauss(rng), gauss(rng), gauss(rng)};
            if (u.norm() < 1e-9) continue;
            normals.push_back(u.normalized());
            offsets.push_back(0.25 + 0.75 * unif(rng));
        }
        Domain p = Domain::polytope(normals, offsets);
        CHECK(p.slab_diameter() <= p.diameter() * (1 + 1e-12));
    }
}

TEST_CASE("geometry summary and the inscribed-ball relation for balls") {
    auto g = Domain::ball(Vec{0, 0, 0}, 0.37).summary();
    CHECK(g.A == doctest::Approx(std::cbrt(g.volume)));
    CHECK(g.omega3 == doctest::Approx(4.0 * kPi / 3.0));
    // for a ball the inscribed-ball bound is an equality: slab = 2 (V/omega3)^(1/3)
    CHECK(g.slab_diameter ==
          doctest::Approx(2.0 * std::cbrt(g.volume / g.omega3)).epsilon(1e-12));
    CHECK(g.slab_diameter <= 1.25 * g.A);
}

TEST_CASE("admissibility: tiny ball passes the diameter clause") {
    auto rep = geom::check_admissibility(Domain::ball(Vec{0, 0, 0}, 0.001), 1.0, 1.0,
                                         geom::Theorem::T1);
    CHECK(rep.passed);
    const double C = analysis::convex_green_coefficient();
    // diameter clause: diam = 0.002 <= min{1, 4/(C*3.5), 4/(1.5+sqrt2)}
    bool found = false;
    for (const auto& cl : rep.clauses)
        if (cl.clause == geom::Clause::T1_1b) {
            found = true;
            CHECK(cl.passed);
            REQUIRE(cl.checks.size() == 1);
            double required = std::min({1.0, 4.0 / (C * 3.5), 4.0 / (1.5 + std::sqrt(2.0))});
            CHECK(cl.checks[0].required == doctest::Approx(required).epsilon(1e-14));
            CHECK(cl.checks[0].required == doctest::Approx(0.1120).epsilon(1e-3));
            CHECK(cl.checks[0].actual == doctest::Approx(0.002));
        }
    CHECK(found);
}

TEST_CASE("admissibility: zero coefficients leave only the caps") {
    // 4 Lambda + gamma = 0 makes the volume bound vacuous except the cap 1,
    // and the slab cap is 2/(0.75*0+1) = 2
    auto box = Domain::box(Vec{0, 0, 0}, Vec{0.9, 1.0, 1.1});  // volume 0.99 <= 1
    auto rep = geom::check_admissibility(box, 0.0, 0.0, geom::Theorem::T1);
    CHECK(rep.passed);
    CHECK(rep.clause == geom::Clause::T1_1a);
    for (const auto& cl : rep.clauses)
        if (cl.clause == geom::Clause::T1_1a) {
            CHECK(cl.checks[0].required == doctest::Approx(1.0));  // volume cap
            double a_cbrt = std::cbrt(0.9 * 1.0 * 1.1);
            CHECK(cl.checks[1].required ==
                  doctest::Approx(std::min({1.0, 1.25 * a_cbrt, 2.0})));
        }
}

TEST_CASE("admissibility: failing box names the violated volume bound") {
    auto box = Domain::box(Vec{0, 0, 0}, Vec{3, 3, 0.01});
    auto rep = geom::check_admissibility(box, 1.0, 0.0, geom::Theorem::T1);
    CHECK_FALSE(rep.passed);
    CHECK(rep.tightest_violation == "T1_1a.volume");
    const double C = analysis::convex_green_coefficient();
    for (const auto& cl : rep.clauses)
        if (cl.clause == geom::Clause::T1_1a) {
            CHECK(cl.checks[0].required ==
                  doctest::Approx(std::pow(8.0 / (C * 4.0), 3)).epsilon(1e-14));
            CHECK(cl.checks[0].required == doctest::Approx(7.52e-3).epsilon(1e-3));
            CHECK(cl.checks[0].actual == doctest::Approx(0.09));
            CHECK_FALSE(cl.checks[0].ok);
        }
}

TEST_CASE("admissibility: T2 constants and smoothness flag") {
    auto ball = Domain::ball(Vec{0, 0, 0}, 0.05);
    auto rep = geom::check_admissibility(ball, 123.0, 0.5, geom::Theorem::T2);
    CHECK(rep.lambda_used == doctest::Approx(0.25));  // Lambda argument ignored
    CHECK_FALSE(rep.smoothness_relaxed);
    const double C = analysis::convex_green_coefficient();
    for (const auto& cl : rep.clauses) {
        if (cl.clause == geom::Clause::T2_1a)
            CHECK(cl.checks[0].required ==
                  doctest::Approx(std::pow(8.0 / (C * 1.5), 3)).epsilon(1e-14));
        if (cl.clause == geom::Clause::T2_1b)
            CHECK(cl.checks[0].required ==
                  doctest::Approx(std::min(1.0, 4.0 / (C * 1.125))).epsilon(1e-14));
    }

    auto box = Domain::box(Vec{0, 0, 0}, Vec{0.01, 0.01, 0.01});
    CHECK(geom::check_admissibility(box, 0, 0, geom::Theorem::T1).smoothness_relaxed);
}

TEST_CASE("admissibility: n >= 4 balls only") {
    auto b4 = Domain::ball(Vec::zero(4), 0.05);
    auto rep = geom::check_admissibility(b4, 0.5, 0.0, geom::Theorem::T1);
    CHECK(rep.passed);
    CHECK(rep.clause == geom::Clause::T1_2);

    auto box4 = Domain::box(Vec::zero(4), Vec{1, 1, 1, 1});
    CHECK_THROWS_AS(geom::check_admissibility(box4, 0, 0, geom::Theorem::T1), InvalidInput);
}

TEST_CASE("admissibility is monotone under shrinking") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unif(0, 1);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        double L = 1.5 * unif(rng), g = 1.5 * unif(rng);
        auto dom = trial % 2 == 0
                       ? Domain::ball(Vec{0, 0, 0}, 0.01 + 0.05 * unif(rng))
                       : Domain::box(Vec{-0.03, -0.03, -0.01}, Vec{0.03, 0.03, 0.01});
        auto rep = geom::check_admissibility(dom, L, g, geom::Theorem::T1);
        if (!rep.passed) continue;
        double s = 0.1 + 0.8 * unif(rng);
        CHECK(geom::check_admissibility(dom.scaled(s), L, g, geom::Theorem::T1).passed);
        ++checked;
    }
    CHECK(checked > 50);
}
