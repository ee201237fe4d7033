#include "doctest.h"

#include <fstream>
#include <random>

#include "field.hpp"

using namespace yamabe;
using fd::Boundary;
using fd::ScalarField;
using geom::Domain;

namespace {

std::shared_ptr<const Domain> ball(double r, int n = 3) {
    return std::make_shared<const Domain>(Domain::ball(Vec::zero(n), r));
}

std::shared_ptr<const Domain> unit_box() {
    return std::make_shared<const Domain>(Domain::box(Vec{0, 0, 0}, Vec{1, 1, 1}));
}

std::vector<double> eval_nodes(const fd::Grid& g, const std::function<double(const Vec&)>& f) {
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = f(g.position(i));
    return out;
}

}  // namespace

TEST_CASE("interior node count matches a direct lattice scan") {
    auto grid = fd::build_grid(ball(1.0), 0.25);
    // oracle: lattice points m*h with |m*h| < 1, lattice anchored at
    // multiples of h by construction (origin = -1 - h)
    long count = 0;
    for (int i = -4; i <= 4; ++i)
        for (int j = -4; j <= 4; ++j)
            for (int k = -4; k <= 4; ++k)
                if (0.0625 * (i * i + j * j + k * k) < 1.0) ++count;
    CHECK(count == 251);
    CHECK(grid->size() == static_cast<std::size_t>(count));
}

TEST_CASE("box at half-slab mesh has exactly the center node") {
    auto grid = fd::build_grid(unit_box(), 0.5);
    REQUIRE(grid->size() == 1);
    Vec p = grid->position(0);
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.5));
    CHECK(p[2] == doctest::Approx(0.5));
    // all six legs end on the boundary with full arms
    for (int a = 0; a < 3; ++a)
        for (int s = 0; s < 2; ++s) {
            CHECK(grid->neighbor(0, a, s) == -1);
            CHECK(grid->theta(0, a, s) == doctest::Approx(1.0));
        }
}

TEST_CASE("mesh at the slab diameter is rejected with the required size") {
    try {
        fd::build_grid(unit_box(), 1.0);
        FAIL("expected rejection");
    } catch (const InvalidInput& e) {
        CHECK(std::string(e.what()).find("mesh_size") != std::string::npos);
    }
}

TEST_CASE("boundary arms land on the boundary") {
    auto dom = ball(0.5);
    auto grid = fd::build_grid(dom, 0.09);
    long boundary_legs = 0;
    for (std::size_t i = 0; i < grid->size(); ++i)
        for (int a = 0; a < 3; ++a)
            for (int s = 0; s < 2; ++s)
                if (grid->neighbor(i, a, s) < 0) {
                    ++boundary_legs;
                    Vec q = grid->boundary_point(i, a, s);
                    CHECK(std::abs(q.norm() - 0.5) <= 1e-9);
                    CHECK(grid->theta(i, a, s) > 0);
                    CHECK(grid->theta(i, a, s) <= 1.0);
                }
    CHECK(boundary_legs > 100);
}

TEST_CASE("zero source and boundary give the zero solution") {
    auto grid = fd::build_grid(ball(0.5), 0.1);
    std::vector<double> zero(grid->size(), 0.0);
    ScalarField u = fd::solve_dirichlet(grid, zero, Boundary::constant(0.0));
    CHECK(fd::sup_norm(u) == 0.0);
    CHECK(fd::laplacian_residual(u, zero) == 0.0);
}

TEST_CASE("ball quadratic is solved to second order") {
    auto exact = [](const Vec& p) { return 0.25 - p.norm2(); };
    double errs[2];
    int idx = 0;
    for (double h : {1.0 / 8, 1.0 / 16}) {
        auto grid = fd::build_grid(ball(0.5), h);
        std::vector<double> src(grid->size(), -6.0);
        ScalarField u = fd::solve_dirichlet(grid, src, Boundary::constant(0.0));
        double err = 0;
        for (std::size_t i = 0; i < grid->size(); ++i)
            err = std::max(err, std::abs(u[i] - exact(grid->position(i))));
        CHECK(err <= 1.0 * h * h);
        errs[idx++] = err;
    }
    CHECK(errs[0] / errs[1] >= 3.2);
    CHECK(errs[0] / errs[1] <= 4.8);
}

TEST_CASE("manufactured sine solution on the unit box") {
    auto exact = [](const Vec& p) {
        return std::sin(kPi * p[0]) * std::sin(kPi * p[1]) * std::sin(kPi * p[2]);
    };
    auto grid = fd::build_grid(unit_box(), 1.0 / 16);
    std::vector<double> src =
        eval_nodes(*grid, [&](const Vec& p) { return -3.0 * kPi * kPi * exact(p); });
    ScalarField u = fd::solve_dirichlet(grid, src, Boundary::constant(0.0));
    double err = 0;
    for (std::size_t i = 0; i < grid->size(); ++i)
        err = std::max(err, std::abs(u[i] - exact(grid->position(i))));
    CHECK(err <= 5e-3);
}

TEST_CASE("solver residual postcondition") {
    auto grid = fd::build_grid(ball(0.5), 1.0 / 12);
    std::vector<double> src =
        eval_nodes(*grid, [](const Vec& p) { return std::sin(5 * p[0]) + p[1] * p[2]; });
    ScalarField u = fd::solve_dirichlet(grid, src, Boundary::constant(0.0));
    double sup_src = 0;
    for (double s : src) sup_src = std::max(sup_src, std::abs(s));
    CHECK(fd::laplacian_residual(u, src) <= 1e-8 * sup_src + 1e-12);
}

TEST_CASE("quadratic truncation matches the per-node arm prediction") {
    // for u = d^2 - |x|^2 the discrete Laplacian per axis is
    // -(theta+ + theta-), so the residual against -2n is exactly
    // sum_a (2 - theta+_a - theta-_a); nonzero only in the boundary layer
    auto grid = fd::build_grid(ball(0.5), 1.0 / 10);
    ScalarField u(grid, Boundary::function([](const Vec& p) { return 0.25 - p.norm2(); }));
    for (std::size_t i = 0; i < grid->size(); ++i) u[i] = 0.25 - grid->position(i).norm2();
    std::vector<double> lap = fd::apply_laplacian(u);
    for (std::size_t i = 0; i < grid->size(); ++i) {
        double predicted = 0;
        for (int a = 0; a < 3; ++a)
            predicted += 2.0 - grid->theta(i, a, 0) - grid->theta(i, a, 1);
        CHECK(std::abs(lap[i] + 6.0 - predicted) <= 1e-8);
        if (grid->full_stencil(i)) CHECK(std::abs(lap[i] + 6.0) <= 1e-9);
    }
}

TEST_CASE("gradient is exact for affine fields") {
    auto grid = fd::build_grid(ball(0.5), 0.1);
    ScalarField u(grid, Boundary::function([](const Vec& p) { return p[0]; }));
    for (std::size_t i = 0; i < grid->size(); ++i) u[i] = grid->position(i)[0];
    fd::VectorField g = fd::gradient(u);
    for (std::size_t i = 0; i < grid->size(); ++i) {
        CHECK(std::abs(g.at(i, 0) - 1.0) <= 1e-10);
        CHECK(std::abs(g.at(i, 1)) <= 1e-10);
        CHECK(std::abs(g.at(i, 2)) <= 1e-10);
    }
}

TEST_CASE("gradient of the ball quadratic") {
    double d = 0.5, h = 1.0 / 16;
    auto grid = fd::build_grid(ball(d), h);
    ScalarField u(grid, Boundary::function([d](const Vec& p) { return d * d - p.norm2(); }));
    for (std::size_t i = 0; i < grid->size(); ++i)
        u[i] = d * d - grid->position(i).norm2();
    double sup = fd::sup_norm(fd::gradient(u));
    CHECK(sup <= 2 * d + 1e-9);       // grad = -2x, exact per node
    CHECK(sup >= 2 * d - 10 * h);
}

TEST_CASE("gradient converges at second order on a smooth polynomial") {
    auto f = [](const Vec& p) { return p[0] * p[0] * p[1] + 0.5 * p[2] * p[2] * p[2]; };
    auto gx = [](const Vec& p) { return 2 * p[0] * p[1]; };
    auto gy = [](const Vec& p) { return p[0] * p[0]; };
    auto gz = [](const Vec& p) { return 1.5 * p[2] * p[2]; };
    double errs[2];
    int idx = 0;
    for (double h : {1.0 / 8, 1.0 / 16}) {
        auto grid = fd::build_grid(ball(0.5), h);
        ScalarField u(grid, Boundary::function(f));
        for (std::size_t i = 0; i < grid->size(); ++i) u[i] = f(grid->position(i));
        fd::VectorField g = fd::gradient(u);
        double err = 0;
        for (std::size_t i = 0; i < grid->size(); ++i) {
            Vec p = grid->position(i);
            err = std::max({err, std::abs(g.at(i, 0) - gx(p)), std::abs(g.at(i, 1) - gy(p)),
                            std::abs(g.at(i, 2) - gz(p))});
        }
        errs[idx++] = err;
    }
    CHECK(errs[1] <= errs[0] / 2.5);  // one-sided arms keep it better than first order
}

TEST_CASE("norms") {
    auto grid = fd::build_grid(unit_box(), 1.0 / 16);
    ScalarField one(grid, Boundary::constant(1.0));
    for (std::size_t i = 0; i < grid->size(); ++i) one[i] = 1.0;
    CHECK(fd::l2_norm(one) == doctest::Approx(1.0).epsilon(0.1));
    CHECK(fd::sup_norm(one) == 1.0);

    ScalarField zero(grid);
    CHECK(fd::l2_norm(zero) == 0.0);
    CHECK(fd::h10_seminorm(zero) == 0.0);

    auto sine = [](const Vec& p) {
        return std::sin(kPi * p[0]) * std::sin(kPi * p[1]) * std::sin(kPi * p[2]);
    };
    ScalarField s(grid);
    for (std::size_t i = 0; i < grid->size(); ++i) s[i] = sine(grid->position(i));
    CHECK(fd::l2_norm(s) == doctest::Approx(std::pow(0.5, 1.5)).epsilon(5e-3));
}

TEST_CASE("discrete maximum principle") {
    auto grid = fd::build_grid(ball(0.5), 1.0 / 12);
    std::vector<double> src = eval_nodes(*grid, [](const Vec& p) { return 1.0 + p[0] * p[0]; });
    ScalarField u = fd::solve_dirichlet(grid, src, Boundary::constant(0.0));
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(u[i] <= 1e-12);
}

TEST_CASE("linearity of the solve") {
    auto grid = fd::build_grid(ball(0.5), 1.0 / 10);
    auto h1 = eval_nodes(*grid, [](const Vec& p) { return std::sin(3 * p[0]) + p[1]; });
    auto h2 = eval_nodes(*grid, [](const Vec& p) { return p[0] * p[2] - 0.5; });
    std::vector<double> combo(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i) combo[i] = 2 * h1[i] - 3 * h2[i];
    ScalarField u1 = fd::solve_dirichlet(grid, h1, Boundary::constant(0.0));
    ScalarField u2 = fd::solve_dirichlet(grid, h2, Boundary::constant(0.0));
    ScalarField uc = fd::solve_dirichlet(grid, combo, Boundary::constant(0.0));
    double worst = 0;
    for (std::size_t i = 0; i < grid->size(); ++i)
        worst = std::max(worst, std::abs(uc[i] - (2 * u1[i] - 3 * u2[i])));
    CHECK(worst <= 1e-7);
}

TEST_CASE("discrete Poincare bound on zero-boundary fields") {
    auto dom = ball(0.5);
    auto grid = fd::build_grid(dom, 1.0 / 12);
    auto src = eval_nodes(*grid, [](const Vec& p) { return 1.0 + std::cos(4 * p[1]); });
    ScalarField w = fd::solve_dirichlet(grid, src, Boundary::constant(0.0));
    CHECK(fd::l2_norm(w) <=
          dom->slab_diameter() / std::sqrt(2.0) * fd::h10_seminorm(w) + 1e-6);
}

TEST_CASE("four-dimensional ball quadratic") {
    auto dom = ball(0.2, 4);
    auto grid = fd::build_grid(dom, 0.05);
    CHECK(grid->size() > 100);
    std::vector<double> src(grid->size(), -8.0);  // lap of -|x|^2 in R^4
    ScalarField u = fd::solve_dirichlet(grid, src, Boundary::constant(0.0));
    double err = 0;
    for (std::size_t i = 0; i < grid->size(); ++i)
        err = std::max(err, std::abs(u[i] - (0.04 - grid->position(i).norm2())));
    CHECK(err <= 2.0 * 0.05 * 0.05);
}

TEST_CASE("csv and binary export") {
    auto grid = fd::build_grid(ball(0.5), 0.2);
    ScalarField u(grid);
    for (std::size_t i = 0; i < grid->size(); ++i) u[i] = static_cast<double>(i);
    std::string base = "/tmp/yamabe_test_field";
    fd::write_csv(u, base + ".csv");
    fd::write_binary(u, base + ".bin");
    std::ifstream csv(base + ".csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "x,y,z,value");
    std::ifstream bin(base + ".bin", std::ios::binary | std::ios::ate);
    CHECK(static_cast<std::size_t>(bin.tellg()) == u.size() * sizeof(double));
    std::ifstream side(base + ".bin.json");
    CHECK(side.good());
}
