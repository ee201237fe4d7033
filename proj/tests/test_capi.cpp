// Exercises the shared-library C surface the way an external client would:
// only yamabe.h, opaque handles, and status codes.
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "yamabe.h"

TEST_CASE("domain lifecycle and queries") {
    double center[3] = {0, 0, 0};
    ym_domain* d = nullptr;
    REQUIRE(ym_domain_create_ball(center, 3, 0.5, &d) == YM_OK);
    CHECK(ym_domain_dim(d) == 3);

    double v = 0;
    CHECK(ym_domain_volume(d, 0, &v) == YM_OK);
    CHECK(v == doctest::Approx(4.0 * 3.14159265358979 / 3.0 * 0.125));
    double slab = 0, diam = 0;
    CHECK(ym_domain_slab_diameter(d, &slab) == YM_OK);
    CHECK(ym_domain_diameter(d, &diam) == YM_OK);
    CHECK(slab == doctest::Approx(1.0));
    CHECK(diam == doctest::Approx(1.0));

    double p[3] = {0.2, 0, 0};
    int inside = 0;
    CHECK(ym_domain_contains(d, p, &inside) == YM_OK);
    CHECK(inside == 1);

    ym_domain* half = nullptr;
    CHECK(ym_domain_scale(d, 0.5, &half) == YM_OK);
    double hs = 0;
    CHECK(ym_domain_slab_diameter(half, &hs) == YM_OK);
    CHECK(hs == doctest::Approx(0.5));
    ym_domain_free(half);
    ym_domain_free(d);
}

TEST_CASE("errors set a message and a status") {
    double center[3] = {0, 0, 0};
    ym_domain* d = nullptr;
    CHECK(ym_domain_create_ball(center, 3, -1.0, &d) == YM_ERR_INVALID_ARGUMENT);
    CHECK(std::string(ym_last_error()).find("radius") != std::string::npos);
    CHECK(ym_domain_create_ball(nullptr, 3, 1.0, &d) == YM_ERR_INVALID_ARGUMENT);
}

TEST_CASE("certificate through the C API") {
    double center[3] = {0, 0, 0};
    ym_domain* d = nullptr;
    REQUIRE(ym_domain_create_ball(center, 3, 0.001, &d) == YM_OK);
    ym_certificate* c = nullptr;
    REQUIRE(ym_certificate_check(d, 1.0, 1.0, 1, &c) == YM_OK);
    CHECK(ym_certificate_passed(c) == 1);
    char* clause = nullptr;
    REQUIRE(ym_certificate_clause(c, &clause) == YM_OK);
    CHECK(std::string(clause).rfind("T1_", 0) == 0);
    ym_string_free(clause);
    CHECK(ym_certificate_contraction_q(c) < 1.0);
    char* json = nullptr;
    REQUIRE(ym_certificate_json(c, &json) == YM_OK);
    CHECK(std::string(json).find("\"passed\": true") != std::string::npos);
    ym_string_free(json);
    ym_certificate_free(c);
    ym_domain_free(d);
}

TEST_CASE("scalar analysis entry points") {
    ym_majorant_params p{};
    p.n = 3;
    p.lambda_sup = 1.0;
    p.gamma_sup = 1.0;
    p.size = 0.05;
    p.green_coeff = 10.2102;
    p.mode = YM_SIZE_VOLUME_CBRT;

    double m = 0;
    REQUIRE(ym_majorant(&p, 1.0, &m) == YM_OK);
    CHECK(m == doctest::Approx(0.3911138).epsilon(1e-6));

    double k = 0;
    int exists = 0;
    REQUIRE(ym_smallest_fixed_point(&p, &k, &exists) == YM_OK);
    CHECK(exists == 1);
    CHECK(k == doctest::Approx(0.2665).epsilon(1e-3));

    double bound = 0;
    REQUIRE(ym_explicit_k_bound(&p, &bound) == YM_OK);
    CHECK(bound == doctest::Approx(0.31906875).epsilon(1e-10));

    double q = 0;
    REQUIRE(ym_contraction_constant(0.0625, 1.0, 0.32, 3, &q) == YM_OK);
    CHECK(q == doctest::Approx(0.0075692).epsilon(1e-4));

    double ev = 0;
    REQUIRE(ym_evans_bound(1.0, &ev) == YM_OK);
    CHECK(ev == doctest::Approx(10.21034).epsilon(1e-5));

    double x[3] = {0, 0, 0}, xp[3] = {0.5, 0, 0};
    double g = 0;
    REQUIRE(ym_ball_green(3, x, xp, &g) == YM_OK);
    CHECK(g == doctest::Approx((1.0 / (4 * 3.14159265358979)) * (2.0 - 1.0)).epsilon(1e-10));

    double integral = 0;
    REQUIRE(ym_green_gradient_integral(3, x, 1e-4, &integral) == YM_OK);
    CHECK(integral == doctest::Approx(0.75).epsilon(1e-3));

    double cn = 0, arg = -1;
    REQUIRE(ym_ball_green_constant(3, 1e-3, &cn, &arg) == YM_OK);
    CHECK(cn == doctest::Approx(0.75).epsilon(1e-2));
    CHECK(arg >= 0.0);
}

TEST_CASE("grid, dirichlet solve, and field export") {
    double lo[3] = {0, 0, 0}, hi[3] = {1, 1, 1};
    ym_domain* d = nullptr;
    REQUIRE(ym_domain_create_box(lo, hi, 3, &d) == YM_OK);
    ym_grid* g = nullptr;
    REQUIRE(ym_grid_build(d, 0.0625, &g) == YM_OK);
    CHECK(ym_grid_size(g) == 15 * 15 * 15);
    CHECK(ym_grid_mesh_size(g) == doctest::Approx(0.0625));

    ym_field* f = nullptr;
    REQUIRE(ym_solve_dirichlet(
                g, "-3*pi*pi*sin(pi*x)*sin(pi*y)*sin(pi*z)", "0", &f) == YM_OK);
    long long count = ym_field_size(f);
    CHECK(count == ym_grid_size(g));
    std::vector<double> vals(static_cast<std::size_t>(count));
    REQUIRE(ym_field_values(f, vals.data(), count) == YM_OK);
    double sup = 0, l2 = 0, h10 = 0;
    REQUIRE(ym_field_norms(f, &sup, &l2, &h10) == YM_OK);
    CHECK(sup == doctest::Approx(1.0).epsilon(2e-2));
    CHECK(l2 == doctest::Approx(std::pow(0.5, 1.5)).epsilon(2e-2));

    // spot-check against the exact solution at a node
    double pos[3];
    REQUIRE(ym_grid_node_position(g, count / 2, pos) == YM_OK);
    double exact = std::sin(3.14159265358979 * pos[0]) * std::sin(3.14159265358979 * pos[1]) *
                   std::sin(3.14159265358979 * pos[2]);
    CHECK(vals[static_cast<std::size_t>(count / 2)] == doctest::Approx(exact).epsilon(2e-2));

    CHECK(ym_field_write_csv(f, "/tmp/yamabe_capi_field.csv") == YM_OK);
    CHECK(ym_field_write_binary(f, "/tmp/yamabe_capi_field.bin") == YM_OK);
    ym_field_free(f);
    ym_grid_free(g);
    ym_domain_free(d);
}

TEST_CASE("runs through the C API") {
    double center[3] = {0, 0, 0};
    ym_domain* d = nullptr;
    REQUIRE(ym_domain_create_ball(center, 3, 0.05, &d) == YM_OK);

    ym_run_options o{};
    o.mesh_size = 0.0125;
    o.tol = 1e-9;
    o.max_iter = 60;
    ym_run* r = nullptr;
    REQUIRE(ym_run_solve(d, 3, "1", "0", 1.0, 0.0, &o, &r) == YM_OK);
    CHECK(ym_run_converged(r) == 1);
    CHECK(ym_run_certified(r) == 1);
    CHECK(ym_run_final_residual(r) <= 1e-8);
    CHECK(ym_run_min_conformal_factor(r) > 0.0);
    CHECK(ym_run_fixed_point(r) == doctest::Approx(0.2203).epsilon(1e-2));
    CHECK(std::isnan(ym_run_curvature(r)));

    std::vector<ym_trace_row> rows(16);
    long long written = 0;
    REQUIRE(ym_run_trace(r, rows.data(), 16, &written) == YM_OK);
    CHECK(written == ym_run_iterations(r));
    CHECK(rows[0].k == 1);

    ym_field* u = nullptr;
    REQUIRE(ym_run_field(r, 1, &u) == YM_OK);
    double sup = 0;
    REQUIRE(ym_field_norms(u, &sup, nullptr, nullptr) == YM_OK);
    CHECK(sup > 0.0);
    ym_field_free(u);

    char* summary = nullptr;
    REQUIRE(ym_run_summary_json(r, &summary) == YM_OK);
    CHECK(std::string(summary).find("\"converged\": true") != std::string::npos);
    ym_string_free(summary);
    ym_run_free(r);

    // certificate gate surfaces as a status
    ym_domain* big = nullptr;
    REQUIRE(ym_domain_create_ball(center, 3, 0.8, &big) == YM_OK);
    ym_run_options ob{};
    ob.mesh_size = 0.2;
    CHECK(ym_run_solve(big, 3, "1", "0", 1.0, 0.0, &ob, &r) == YM_ERR_CERTIFICATE);
    ym_domain_free(big);

    // deform run
    ym_domain* unit = nullptr;
    REQUIRE(ym_domain_create_ball(center, 3, 1.0, &unit) == YM_OK);
    ym_run_options od{};
    od.tol = 1e-9;
    ym_run* dr = nullptr;
    REQUIRE(ym_run_deform(unit, 0.05, 0.01, &od, &dr) == YM_OK);
    CHECK(ym_run_curvature(dr) == doctest::Approx(4.0));
    ym_field* pulled = nullptr;
    REQUIRE(ym_run_field(dr, 2, &pulled) == YM_OK);
    ym_field_free(pulled);
    ym_run_free(dr);
    ym_domain_free(unit);
    ym_domain_free(d);
}

TEST_CASE("config-driven experiments and exit codes") {
    const char* good =
        "[domain]\nball 0 0 0 0.05\n"
        "[problem]\nn = 3\nR = 1\nS = 0\nLambda = 1\ngamma = 0\n"
        "[run]\nmode = solve\nmesh_size = 0.0125\ntol = 1e-9\nmax_iter = 60\nseed = 7\n";
    char* report = nullptr;
    int code = -1;
    REQUIRE(ym_experiment_run(good, nullptr, &report, &code) == YM_OK);
    CHECK(code == 0);
    CHECK(std::string(report).find("converged") != std::string::npos);
    ym_string_free(report);

    // subcommand-style mode override
    ym_experiment_options opts{};
    opts.mode = "certify";
    REQUIRE(ym_experiment_run(good, &opts, &report, &code) == YM_OK);
    CHECK(code == 0);
    ym_string_free(report);

    const char* broken = "[run]\nmode = solve\n";
    REQUIRE(ym_experiment_run(broken, nullptr, &report, &code) == YM_OK);
    CHECK(code == 1);
    CHECK(std::string(report).find("line") != std::string::npos);
    ym_string_free(report);

    const char* too_big =
        "[domain]\nball 0 0 0 0.8\n"
        "[problem]\nR = 1\nS = 0\nLambda = 1\ngamma = 0\n"
        "[run]\nmode = solve\nmesh_size = 0.2\n";
    REQUIRE(ym_experiment_run(too_big, nullptr, &report, &code) == YM_OK);
    CHECK(code == 2);
    ym_string_free(report);
}
