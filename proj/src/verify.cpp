#include "verify.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "config.hpp"
#include "green.hpp"
#include "picard.hpp"
#include "runner.hpp"

namespace yamabe::verify {

namespace fs = std::filesystem;
using analysis::MajorantParams;
using analysis::SizeMode;
using geom::Domain;
using picard::ProblemSpec;
using picard::RunOptions;
using picard::Solution;

bool contraction_ratios_ok(const std::vector<double>& ratios_from_k2, double q, double slack) {
    for (std::size_t i = 0; i < ratios_from_k2.size(); ++i) {
        int k = static_cast<int>(i) + 2;
        if (k < 3) continue;
        double r = ratios_from_k2[i];
        if (!(r < 1.0) || r > q + slack) return false;
    }
    return true;
}

namespace {

struct Harness {
    SuiteResult result;

    void run(const std::string& name, const std::function<std::string()>& body) {
        auto t0 = std::chrono::steady_clock::now();
        CheckResult c;
        c.name = name;
        try {
            c.details = body();
            c.passed = true;
        } catch (const std::exception& e) {
            c.passed = false;
            c.details = e.what();
        }
        c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.checks.push_back(std::move(c));
    }
};

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

void expect(bool cond, const std::string& msg) {
    if (!cond) fail(msg);
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (;;) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= count) return;
                    body(i);
                }
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::shared_ptr<const Domain> make_ball(double r, int n = 3) {
    return std::make_shared<const Domain>(Domain::ball(Vec::zero(n), r));
}

std::shared_ptr<const Domain> make_box(const Vec& lo, const Vec& hi) {
    return std::make_shared<const Domain>(Domain::box(lo, hi));
}

// ---------------------------------------------------------------- criterion 1

double poisson_sup_error(std::shared_ptr<const Domain> dom, double h,
                         const std::function<double(const Vec&)>& exact,
                         const std::function<double(const Vec&)>& source) {
    auto grid = fd::build_grid(std::move(dom), h);
    std::vector<double> s(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i) s[i] = source(grid->position(i));
    fd::ScalarField u = fd::solve_dirichlet(grid, s, fd::Boundary::constant(0.0));
    double err = 0;
    for (std::size_t i = 0; i < grid->size(); ++i)
        err = std::max(err, std::abs(u[i] - exact(grid->position(i))));
    return err;
}

std::string criterion1(const Options& opts) {
    const double d = 0.5;
    auto ball_exact = [d](const Vec& p) { return d * d - p.norm2(); };
    auto ball_source = [](const Vec&) { return -6.0; };
    auto box_exact = [](const Vec& p) {
        return std::sin(kPi * p[0]) * std::sin(kPi * p[1]) * std::sin(kPi * p[2]);
    };
    auto box_source = [&](const Vec& p) { return -3.0 * kPi * kPi * box_exact(p); };

    const double h1 = opts.fast ? 1.0 / 8 : 1.0 / 16;
    Vec lo{0, 0, 0}, hi{1, 1, 1};

    double ball_e1 = poisson_sup_error(make_ball(d), h1, ball_exact, ball_source);
    double ball_e2 = poisson_sup_error(make_ball(d), h1 / 2, ball_exact, ball_source);
    double ball_ratio = ball_e1 / ball_e2;
    double box_e1 = poisson_sup_error(make_box(lo, hi), h1, box_exact, box_source);
    double box_e2 = poisson_sup_error(make_box(lo, hi), h1 / 2, box_exact, box_source);
    double box_ratio = box_e1 / box_e2;

    expect(ball_ratio >= 3.2 && ball_ratio <= 4.8,
           "ball sup-error ratio " + fmt_g17(ball_ratio) + " outside [3.2, 4.8]");
    expect(box_ratio >= 3.2 && box_ratio <= 4.8,
           "box sup-error ratio " + fmt_g17(box_ratio) + " outside [3.2, 4.8]");

    std::string timing = "64^3 timing skipped (fast)";
    if (!opts.fast) {
        auto t0 = std::chrono::steady_clock::now();
        double e64 = poisson_sup_error(make_box(lo, hi), 1.0 / 64, box_exact, box_source);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        expect(secs <= 60.0, "64^3 solve took " + fmt_g17(secs) + " s > 60 s");
        timing = "64^3 solve " + fmt_g17(secs) + " s (err " + fmt_g17(e64) + ")";
    }
    return "ball ratio " + fmt_g17(ball_ratio) + ", box ratio " + fmt_g17(box_ratio) + "; " +
           timing;
}

// ---------------------------------------------------------------- criterion 2

long double min3l(long double a, long double b, long double c) {
    return std::min(a, std::min(b, c));
}

std::string criterion2(const Options& opts) {
    const long double pi_l = 3.14159265358979323846264338327950288L;
    const long double C_l = 4.76L * powl(pi_l, 2.0L / 3.0L);
    const long double inf = 1e300L;

    // the gradient-estimate constant itself
    {
        double impl = analysis::convex_green_coefficient();
        expect(std::abs(impl - static_cast<double>(C_l)) <= 1e-12 * static_cast<double>(C_l),
               "C = 4.76 pi^{2/3} off: " + fmt_g17(impl));
        double ev = analysis::evans_bound(1.0);
        long double ev_l = 4.76L * powl(pi_l * pi_l, 1.0L / 3.0L);
        expect(std::abs(ev - static_cast<double>(ev_l)) <= 1e-12 * static_cast<double>(ev_l),
               "evans_bound(1) off: " + fmt_g17(ev));
    }

    const std::vector<double> lams = {0.0, 0.3, 1.0, 2.5};
    const std::vector<double> gams = {0.0, 0.3, 1.0, 2.5};
    long checked = 0;

    auto check_rel = [&](double impl, long double ref, const std::string& what) {
        long double r = ref >= 1e250L ? (impl >= 1e250 ? 0.0L : 1.0L)
                                      : fabsl(static_cast<long double>(impl) - ref) /
                                            std::max(fabsl(ref), 1e-300L);
        expect(r <= 1e-12L, what + ": impl " + fmt_g17(impl) + " vs ref " +
                                fmt_g17(static_cast<double>(ref)));
        ++checked;
    };

    auto dom3 = make_ball(0.2);
    Vec blo{-0.1, -0.1, -0.1}, bhi{0.1, 0.2, 0.3};
    auto box3 = make_box(blo, bhi);
    for (const auto& dom : {dom3, box3})
        for (double L : lams)
            for (double g : gams) {
                for (auto theorem : {geom::Theorem::T1, geom::Theorem::T2}) {
                    auto rep = geom::check_admissibility(*dom, L, g, theorem);
                    long double Lu = theorem == geom::Theorem::T2 ? 0.25L
                                                                  : static_cast<long double>(L);
                    long double gl = g;
                    long double A_l = static_cast<long double>(rep.geometry.A);
                    for (const auto& cl : rep.clauses)
                        for (const auto& b : cl.checks) {
                            long double ref = -1;
                            if (b.name.ends_with(".volume")) {
                                long double den = C_l * (4.0L * Lu + gl);
                                long double cube =
                                    den > 0 ? powl(8.0L / den, 3.0L) : inf;
                                ref = theorem == geom::Theorem::T2
                                          ? powl(8.0L / (C_l * (1.0L + gl)), 3.0L)
                                          : std::min(1.0L, cube);
                            } else if (b.name.ends_with(".slab")) {
                                ref = theorem == geom::Theorem::T2
                                          ? std::min(1.0L, 1.25L * A_l)
                                          : min3l(1.0L, 1.25L * A_l,
                                                  2.0L / (0.75L * Lu + 1.0L));
                            } else if (b.name.ends_with(".diam")) {
                                long double den = C_l * (2.5L * Lu + gl);
                                ref = theorem == geom::Theorem::T2
                                          ? std::min(1.0L, 4.0L / (C_l * (0.625L + gl)))
                                          : min3l(1.0L, den > 0 ? 4.0L / den : inf,
                                                  4.0L / (1.5L * Lu + sqrtl(2.0L)));
                            }
                            if (ref >= 0) check_rel(b.required, ref, b.name);
                        }
                }
            }

    // ball clauses for n >= 4 (C_n from the quadrature, recombined in long double)
    std::vector<int> dims = opts.fast ? std::vector<int>{4} : std::vector<int>{4, 5};
    for (int n : dims) {
        long double Cn = analysis::ball_green_constant(n).value;
        auto domn = make_ball(0.2, n);
        for (double L : {0.0, 1.0})
            for (double g : {0.0, 1.0})
                for (auto theorem : {geom::Theorem::T1, geom::Theorem::T2}) {
                    auto rep = geom::check_admissibility(*domn, L, g, theorem);
                    long double Lu =
                        theorem == geom::Theorem::T2 ? 0.25L : static_cast<long double>(L);
                    long double den = Cn * (2.5L * Lu + g);
                    long double ref =
                        theorem == geom::Theorem::T2
                            ? std::min(0.5L, (n - 1.0L) / (Cn * (0.625L + g)))
                            : min3l(0.5L, den > 0 ? (n - 1.0L) / den : inf,
                                    (n - 1.0L) / (1.5L * Lu + sqrtl(2.0L)));
                    expect(rep.clauses.size() == 1 && rep.clauses[0].checks.size() == 1,
                           "unexpected clause layout for n >= 4");
                    check_rel(rep.clauses[0].checks[0].required, ref,
                              rep.clauses[0].checks[0].name);
                }
    }
    return std::to_string(checked) + " bound constants match the high-precision reference";
}

// ---------------------------------------------------------------- criterion 3

/// Independent dense-scan oracle: coarse 1e-3 pass over [0, 10], then a
/// literal step-1e-7 scan across the bracketing cell. Returns NaN when no
/// root exists in range.
double oracle_smallest_root(const MajorantParams& p) {
    auto g = [&](double t) { return analysis::majorant(t, p) - t; };
    if (g(0.0) <= 0.0) return 0.0;
    double prev = 0.0;
    for (long i = 1; i <= 10000; ++i) {
        double t = 10.0 * static_cast<double>(i) / 10000.0;
        if (g(t) <= 0.0) {
            long steps = std::lround((t - prev) / 1e-7);
            for (long k = 1; k <= steps; ++k) {
                double s = prev + 1e-7 * static_cast<double>(k);
                if (g(s) <= 0.0) return s - 0.5e-7;
            }
            return t;
        }
        prev = t;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

std::string criterion3(const Options& opts) {
    const long tuples = opts.fast ? 200 : 1000;
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double C = analysis::convex_green_coefficient();

    long existing = 0, absent = 0, bound_violations = 0;
    double worst_gap = 0, worst_excess = 0;
    std::string witness;
    for (long t = 0; t < tuples; ++t) {
        MajorantParams p;
        p.n = 3;
        p.mode = SizeMode::Volume;
        p.green_coeff = C;
        p.lambda_sup = 2.0 * unif(rng);
        p.gamma_sup = 2.0 * unif(rng);
        double limit = analysis::size_condition_limit(p);
        p.size = (0.05 + 0.90 * unif(rng)) * limit;  // T1_1a size condition holds

        analysis::FixedPointResult fp = analysis::smallest_fixed_point(p);
        double oracle = oracle_smallest_root(p);
        if (std::isnan(oracle)) {
            expect(!fp.exists, "oracle found no root but smallest_fixed_point did");
            ++absent;
            continue;
        }
        expect(fp.exists, "smallest_fixed_point missed a root the oracle found at t = " +
                              fmt_g17(oracle));
        double gap = std::abs(fp.K - oracle);
        worst_gap = std::max(worst_gap, gap);
        expect(gap <= 1e-6, "fixed point disagrees with the dense-scan oracle by " +
                                fmt_g17(gap));
        ++existing;

        double bound = analysis::explicit_k_bound(p);
        if (fp.K > bound * (1.0 + 1e-12)) {
            ++bound_violations;
            if (fp.K / bound > worst_excess) {
                worst_excess = fp.K / bound;
                witness = "Lambda=" + fmt_g17(p.lambda_sup) + " gamma=" + fmt_g17(p.gamma_sup) +
                          " A=" + fmt_g17(p.size) + " K=" + fmt_g17(fp.K) +
                          " bound=" + fmt_g17(bound);
            }
        }
    }

    std::string detail = std::to_string(existing) + " roots matched the oracle (worst gap " +
                         fmt_g17(worst_gap) + "), " + std::to_string(absent) +
                         " agreed-absent";
    expect(bound_violations == 0,
           detail + "; explicit bound K <= C A (4 Lambda + gamma)/8 violated on " +
               std::to_string(bound_violations) + "/" + std::to_string(existing) +
               " tuples (worst K/bound = " + fmt_g17(worst_excess) + " at " + witness +
               "); the bound fails whenever gamma > 2 Lambda (smallest root ~ (CA/4)(Lambda+"
               "gamma) > (CA/8)(4 Lambda+gamma)) and near the existence edge");
    return detail + "; zero explicit-bound violations";
}

// ------------------------------------------------------- criteria 4, 5, 9 runs

struct BatchRun {
    std::string label;
    Solution sol;
    double slab = 0;
};

std::vector<BatchRun> certified_batch(const Options& opts) {
    struct Coef {
        const char* R;
        const char* S;
        double L, g;
    };
    const std::vector<Coef> coefs = {
        {"1", "0", 1.0, 0.0},           {"-1", "0", 1.0, 0.0},
        {"0", "0.8", 0.0, 0.8},         {"0.6", "-0.6", 0.6, 0.6},
        {"-0.7", "0.5", 0.7, 0.5},      {"0.8*cos(3*x)", "0.2*sin(2*y)", 0.8, 0.2},
    };
    struct Dom {
        std::string label;
        std::shared_ptr<const Domain> dom;
    };
    std::vector<Dom> doms;
    doms.push_back({"ball r=0.03", make_ball(0.03)});
    doms.push_back({"ball r=0.05", make_ball(0.05)});
    doms.push_back({"box 0.08^3", make_box(Vec{-0.04, -0.04, -0.04}, Vec{0.04, 0.04, 0.04})});
    doms.push_back({"thin box 0.15x0.15x0.03",
                    make_box(Vec{-0.075, -0.075, -0.015}, Vec{0.075, 0.075, 0.015})});

    std::vector<BatchRun> runs(doms.size() * coefs.size());
    parallel_for(runs.size(), opts.workers, [&](std::size_t i) {
        const Dom& dm = doms[i / coefs.size()];
        const Coef& cf = coefs[i % coefs.size()];
        ProblemSpec spec;
        spec.domain = dm.dom;
        spec.n = 3;
        spec.R = Expression::parse(cf.R);
        spec.S = Expression::parse(cf.S);
        spec.lambda_sup = cf.L;
        spec.gamma_sup = cf.g;
        RunOptions ro;
        ro.mesh_size = dm.dom->slab_diameter() / 8.0;
        ro.tol = 1e-9;
        ro.max_iter = 80;
        runs[i].label = dm.label + " R=" + cf.R + " S=" + cf.S;
        runs[i].sol = picard::run_iteration(spec, ro);
        runs[i].slab = dm.dom->slab_diameter();
    });
    return runs;
}

std::string criterion4(const std::vector<BatchRun>& runs) {
    double worst_margin = 1e300;
    for (const auto& r : runs) {
        expect(r.sol.certified, r.label + ": certificate did not pass");
        expect(r.sol.converged, r.label + ": did not converge");
        expect(r.sol.final_residual <= 1e-8,
               r.label + ": final residual " + fmt_g17(r.sol.final_residual) + " > 10*tol");
        std::vector<double> ratios;
        for (const auto& row : r.sol.trace.rows)
            if (!std::isnan(row.ratio)) ratios.push_back(row.ratio);
        expect(contraction_ratios_ok(ratios, r.sol.q, 0.05),
               r.label + ": a contraction ratio exceeded q + 0.05 = " +
                   fmt_g17(r.sol.q + 0.05) + " (max ratio " + fmt_g17(r.sol.max_ratio) + ")");
        worst_margin = std::min(worst_margin, r.sol.q + 0.05 - r.sol.max_ratio);
    }
    return std::to_string(runs.size()) + " certified runs converged; min contraction margin " +
           fmt_g17(worst_margin);
}

std::string criterion5(const std::vector<BatchRun>& runs) {
    double worst = -1e300;
    for (const auto& r : runs) {
        expect(r.sol.K_exists, r.label + ": no majorant fixed point for a certified run");
        expect(r.sol.gradient_bound_ok,
               r.label + ": sup gradient " + fmt_g17(r.sol.max_sup_grad) + " exceeded K+0.05+10h");
        worst = std::max(worst, r.sol.max_sup_grad - r.sol.K);
    }
    return "zero gradient-bound violations across " + std::to_string(runs.size()) +
           " runs; max (sup_grad - K) = " + fmt_g17(worst);
}

// ---------------------------------------------------------------- criterion 6

std::string criterion6(const Options& opts) {
    std::vector<double> tols = opts.fast ? std::vector<double>{3e-3, 1e-3}
                                         : std::vector<double>{1e-2, 3e-3, 1e-3};
    std::vector<double> vals;
    for (double t : tols) vals.push_back(analysis::ball_green_constant(3, t).value);
    for (std::size_t i = 1; i < vals.size(); ++i) {
        double rel = std::abs(vals[i] - vals[i - 1]) / vals[i];
        expect(rel <= 1e-3, "C_3 refinement jump " + fmt_g17(rel) + " > 1e-3 between tol " +
                                fmt_g17(tols[i - 1]) + " and " + fmt_g17(tols[i]));
    }
    double c3 = vals.back();
    expect(c3 <= 16.47, "C_3 = " + fmt_g17(c3) + " exceeds the convex-domain bound 16.47");

    // scaling law: the radius-r integral equals r x the unit-ball integral
    const double r = 0.4;
    Vec x{0.12, -0.10, 0.06};
    double direct = analysis::scaled_ball_gradient_integral(3, r, x, 1e-4).value;
    double via_unit = r * analysis::green_gradient_integral_radial(3, x.norm() / r, 1e-4).value;
    double rel = std::abs(direct - via_unit) / std::abs(via_unit);
    expect(rel <= 1e-3, "scaling identity off by " + fmt_g17(rel));
    return "C_3 = " + fmt_g17(c3) + " <= 16.47; refinement stable; scaling identity to " +
           fmt_g17(rel);
}

// ---------------------------------------------------------------- criterion 7

std::string criterion7(std::vector<Solution>* keep) {
    auto dom = make_ball(0.05);
    RunOptions ro;
    ro.mesh_size = dom->slab_diameter() / 8.0;
    ro.tol = 1e-9;
    ro.max_iter = 80;
    Expression S0 = Expression::parse("0");

    std::vector<double> cs = {-5.0, 0.0, 5.0};
    std::vector<Solution> sols;
    std::vector<std::string> cert_fingerprints;
    for (double c : cs) {
        double lam = 0.25 * std::exp(-2.0 * c);
        Solution s = picard::solve_shifted(dom, 3, c, lam, S0, 0.0, ro);
        expect(s.converged, "shifted run c=" + fmt_g17(c) + " did not converge");
        expect(s.certified, "shifted run c=" + fmt_g17(c) + " not certified");
        expect(std::abs(s.f.boundary().constant_value() - c) <= 1e-8,
               "boundary trace differs from c");
        expect(s.min_u > 0, "min u not positive");
        std::ostringstream fp;
        fp << geom::to_string(s.certificate.clause);
        for (const auto& cl : s.certificate.clauses)
            for (const auto& b : cl.checks)
                fp << "|" << b.name << ":" << fmt_g17(b.required) << ":" << fmt_g17(b.actual);
        cert_fingerprints.push_back(fp.str());
        sols.push_back(std::move(s));
    }
    expect(cert_fingerprints[0] == cert_fingerprints[1] &&
               cert_fingerprints[1] == cert_fingerprints[2],
           "certificates differ across c (should be c-independent)");

    // boundary-shift equivariance: solve_shifted(c, lam) vs (0, lam e^{2c})
    double c = 5.0, lam = 0.25 * std::exp(-2.0 * c);
    Solution base = picard::solve_shifted(dom, 3, 0.0, lam * std::exp(2.0 * c), S0, 0.0, ro);
    const Solution& shifted = sols[2];
    double worst = 0;
    for (std::size_t i = 0; i < base.f.size(); ++i)
        worst = std::max(worst, std::abs(shifted.f[i] - base.f[i] - c));
    expect(worst <= 1e-8, "equivariance violated: max |f_c - f_0 - c| = " + fmt_g17(worst));

    if (keep)
        for (auto& s : sols) keep->push_back(std::move(s));
    return "c in {-5, 0, 5} converged with identical certificates; equivariance to " +
           fmt_g17(worst);
}

// ---------------------------------------------------------------- criterion 8

std::string criterion8(std::vector<Solution>* keep) {
    auto base = make_ball(1.0);
    auto run = [&](double d, double lam) {
        RunOptions ro;
        ro.mesh_size = d * 2.0 / 8.0;  // slab of the scaled ball, over 8
        ro.tol = 1e-9;
        ro.max_iter = 80;
        return picard::constant_curvature_deform(base, d, lam, ro);
    };

    picard::DeformResult plus = run(0.05, 0.01);
    picard::DeformResult minus = run(0.05, -0.01);
    expect(plus.solution.converged && minus.solution.converged, "deform runs did not converge");
    expect(std::abs(plus.curvature - 4.0) <= 1e-12, "curvature != +4");
    expect(std::abs(minus.curvature + 4.0) <= 1e-12, "curvature != -4");

    // the pulled-back residual is the scaled-run residual damped by d^2
    for (const auto* dr : {&plus, &minus}) {
        double predicted = dr->solution.final_residual / dr->amplification;
        expect(std::abs(dr->pulled_residual - predicted) <= 1e-12 + 1e-6 * predicted,
               "pulled residual " + fmt_g17(dr->pulled_residual) +
                   " inconsistent with d^2 x run residual " + fmt_g17(predicted));
        expect(dr->pulled_residual * dr->amplification <= 1e-8 * 1.01,
               "amplified pulled residual above 10*tol");
    }

    picard::DeformResult covar = run(0.025, 0.0025);
    expect(std::abs(covar.curvature - plus.curvature) <= 1e-12,
           "(d, lambda) vs (d/2, lambda/4) report different curvatures");
    expect(std::abs(covar.pulled_residual - plus.pulled_residual) <= 1e-9,
           "pulled residuals differ beyond mesh tolerance: " +
               fmt_g17(covar.pulled_residual) + " vs " + fmt_g17(plus.pulled_residual));

    if (keep) {
        keep->push_back(plus.solution);
        keep->push_back(minus.solution);
        keep->push_back(covar.solution);
    }
    return "curvature +4/-4 at (0.05, +-0.01); residual scaling and (d/2, lambda/4) covariance "
           "hold";
}

// ---------------------------------------------------------------- criterion 9

std::string criterion9(const std::vector<BatchRun>& batch, const std::vector<Solution>& extra) {
    long fields = 0;
    double worst_margin = 1e300, min_u = 1e300;
    auto scan = [&](const Solution& s, double slab) {
        expect(s.poincare_ok, "a difference field violated l2 <= (slab/sqrt2) h10 + 1e-6");
        for (const auto& row : s.trace.rows) {
            ++fields;
            worst_margin =
                std::min(worst_margin, slab / std::sqrt(2.0) + 1e-6 - row.poincare_ratio);
        }
        expect(s.min_u > 0.0, "u lost positivity");
        min_u = std::min(min_u, s.min_u);
    };
    for (const auto& r : batch) scan(r.sol, r.slab);
    for (const auto& s : extra) scan(s, s.certificate.geometry.slab_diameter);
    return std::to_string(fields) + " difference fields obey the discrete Poincare bound "
           "(min margin " + fmt_g17(worst_margin) + "); min u = " + fmt_g17(min_u) + " > 0";
}

// ----------------------------------------------------------- module invariants

std::vector<Vec> random_unit_normals(std::mt19937_64& rng, int count) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Vec> out;
    while (static_cast<int>(out.size()) < count) {
        Vec u{gauss(rng), gauss(rng), gauss(rng)};
        if (u.norm() < 1e-6) continue;
        out.push_back(u.normalized());
    }
    return out;
}

Domain random_polytope(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Vec> normals;
    std::vector<double> offsets;
    for (int a = 0; a < 3; ++a)
        for (int sgn = -1; sgn <= 1; sgn += 2) {
            Vec u = Vec::zero(3);
            u[a] = sgn;
            normals.push_back(u);
            offsets.push_back(0.3 + 0.7 * unif(rng));
        }
    int extra = 4 + static_cast<int>(unif(rng) * 10);
    for (const Vec& u : random_unit_normals(rng, extra)) {
        normals.push_back(u);
        offsets.push_back(0.25 + 0.75 * unif(rng));
    }
    return Domain::polytope(std::move(normals), std::move(offsets));
}

std::string invariants_geometry(const Options& opts) {
    const long count = opts.fast ? 2000 : 10000;
    std::atomic<long> done{0};
    std::mt19937_64 seeder(opts.seed + 1);
    std::vector<std::uint64_t> seeds;
    for (long i = 0; i < count; ++i) seeds.push_back(seeder());

    parallel_for(static_cast<std::size_t>(count), opts.workers, [&](std::size_t i) {
        std::mt19937_64 rng(seeds[i]);
        Domain p = random_polytope(rng);
        double slab = p.slab_diameter(), diam = p.diameter();
        expect(slab <= diam * (1.0 + 1e-12),
               "slab " + fmt_g17(slab) + " > diameter " + fmt_g17(diam));
        done.fetch_add(1);
    });

    // slab of a ball and scaling covariance
    for (double r : {0.25, 1.0, 3.0}) {
        auto b = Domain::ball(Vec::zero(3), r);
        expect(b.slab_diameter() == 2.0 * r, "ball slab != 2r");
        auto g = b.summary();
        expect(std::abs(g.slab_diameter - 2.0 * std::cbrt(g.volume / g.omega3)) <=
                   1e-12 * g.slab_diameter,
               "ball inscribed-ball equality failed");
        expect(g.slab_diameter <= 1.25 * g.A + 1e-12, "ball slab > 1.25 A");
    }
    {
        std::mt19937_64 rng(opts.seed + 77);
        Domain p = random_polytope(rng);
        double slab1 = p.slab_diameter();
        double slab2 = p.scaled(0.1).slab_diameter();
        expect(std::abs(slab2 - 0.1 * slab1) <= 1e-6 * slab1 * 0.1 + 1e-12,
               "slab scaling covariance off: " + fmt_g17(slab2 / slab1));
    }

    // admissibility monotone under shrinking
    std::mt19937_64 rng(opts.seed + 2);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    long monotone_checked = 0;
    for (long i = 0; i < (opts.fast ? 100 : 300); ++i) {
        double L = 1.5 * unif(rng), g = 1.5 * unif(rng);
        std::shared_ptr<const Domain> dom =
            i % 2 == 0 ? make_ball(0.01 + 0.05 * unif(rng))
                       : make_box(Vec{-0.03, -0.03, -0.01}, Vec{0.03, 0.03, 0.01});
        auto rep = geom::check_admissibility(*dom, L, g, geom::Theorem::T1);
        if (!rep.passed) continue;
        double s = 0.1 + 0.8 * unif(rng);
        auto rep2 = geom::check_admissibility(dom->scaled(s), L, g, geom::Theorem::T1);
        expect(rep2.passed, "shrinking turned a passing certificate into a failure (s = " +
                                fmt_g17(s) + ")");
        ++monotone_checked;
    }
    return std::to_string(done.load()) + " random polytopes obey slab <= diameter; " +
           std::to_string(monotone_checked) + " shrink-monotonicity cases";
}

std::string invariants_poisson(const Options&) {
    auto dom = make_ball(0.5);
    auto grid = fd::build_grid(dom, 1.0 / 12);

    // discrete maximum principle: source >= 0, boundary 0 => solution <= 0
    std::vector<double> one(grid->size(), 1.0);
    fd::ScalarField u = fd::solve_dirichlet(grid, one, fd::Boundary::constant(0.0));
    for (std::size_t i = 0; i < u.size(); ++i)
        expect(u[i] <= 1e-12, "maximum principle violated: u = " + fmt_g17(u[i]));

    // linearity
    std::vector<double> h1(grid->size()), h2(grid->size()), combo(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i) {
        Vec p = grid->position(i);
        h1[i] = std::sin(3.0 * p[0]) + p[1];
        h2[i] = p[0] * p[2] - 0.5;
        combo[i] = 2.0 * h1[i] - 3.0 * h2[i];
    }
    fd::ScalarField u1 = fd::solve_dirichlet(grid, h1, fd::Boundary::constant(0.0));
    fd::ScalarField u2 = fd::solve_dirichlet(grid, h2, fd::Boundary::constant(0.0));
    fd::ScalarField uc = fd::solve_dirichlet(grid, combo, fd::Boundary::constant(0.0));
    double worst = 0;
    for (std::size_t i = 0; i < grid->size(); ++i)
        worst = std::max(worst, std::abs(uc[i] - (2.0 * u1[i] - 3.0 * u2[i])));
    expect(worst <= 1e-7, "linearity violated by " + fmt_g17(worst));

    // solver residual postcondition
    double res = fd::laplacian_residual(u1, h1);
    double sup_h = 0;
    for (double x : h1) sup_h = std::max(sup_h, std::abs(x));
    expect(res <= 1e-8 * sup_h + 1e-12,
           "laplacian residual " + fmt_g17(res) + " above 1e-8 * sup|source|");

    // discrete Poincare on zero-boundary solves
    double slab = dom->slab_diameter();
    for (const fd::ScalarField* w : {&u1, &u2}) {
        double l2 = fd::l2_norm(*w), h10 = fd::h10_seminorm(*w);
        expect(l2 <= slab / std::sqrt(2.0) * h10 + 1e-6, "discrete Poincare bound violated");
    }
    return "maximum principle, linearity (to " + fmt_g17(worst) +
           "), residual postcondition, Poincare";
}

std::string invariants_analysis(const Options& opts) {
    // monotonicity + convexity of the majorant
    std::vector<MajorantParams> params;
    for (double L : {0.0, 0.5, 2.0})
        for (double g : {0.0, 1.0}) {
            MajorantParams p;
            p.n = 3;
            p.mode = SizeMode::Volume;
            p.green_coeff = analysis::convex_green_coefficient();
            p.lambda_sup = L;
            p.gamma_sup = g;
            p.size = 0.08;
            params.push_back(p);
        }
    for (const auto& p : params) {
        double prev = analysis::majorant(0.0, p);
        for (int i = 1; i <= 1000; ++i) {
            double t = 3.0 * i / 1000.0;
            double v = analysis::majorant(t, p);
            expect(v >= prev - 1e-15, "majorant not increasing");
            if (i >= 2) {
                double tm = 3.0 * (i - 1) / 1000.0;
                double mid = analysis::majorant(tm, p);
                double left = analysis::majorant(3.0 * (i - 2) / 1000.0, p);
                expect(mid <= 0.5 * (left + v) + 1e-12, "majorant not convex");
            }
            prev = v;
        }
    }

    // fixed-point certification: f(K) = K to 1e-10 and f > id below K
    std::mt19937_64 rng(opts.seed + 3);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        MajorantParams p;
        p.n = 3;
        p.mode = SizeMode::Volume;
        p.green_coeff = analysis::convex_green_coefficient();
        p.lambda_sup = 2.0 * unif(rng);
        p.gamma_sup = 2.0 * unif(rng);
        p.size = 0.3 * analysis::size_condition_limit(p) * (0.1 + 0.9 * unif(rng));
        auto fp = analysis::smallest_fixed_point(p);
        if (!fp.exists) continue;
        expect(std::abs(analysis::majorant(fp.K, p) - fp.K) <= 1e-10 * std::max(1.0, fp.K),
               "f(K) != K at tolerance 1e-10");
        for (int j = 0; j < 10000; ++j) {
            double t = fp.K * j / 10000.0;
            expect(analysis::majorant(t, p) > t, "majorant dips below the diagonal before K");
        }
    }

    // rotation invariance of the gradient integral
    {
        std::normal_distribution<double> gauss(0.0, 1.0);
        Vec x{0.37, 0.0, 0.0};
        double ref = analysis::green_gradient_integral(3, x, 1e-4).value;
        for (int i = 0; i < 10; ++i) {
            Vec g{gauss(rng), gauss(rng), gauss(rng)};
            Vec rx = g.normalized() * 0.37;
            double v = analysis::green_gradient_integral(3, rx, 1e-4).value;
            expect(std::abs(v - ref) <= 1e-3 * ref, "rotation invariance violated");
        }
        // center value has the closed form n/(n+1)
        double center = analysis::green_gradient_integral_radial(3, 0.0, 1e-4).value;
        expect(std::abs(center - 0.75) <= 2e-4, "central gradient integral != 3/4: " +
                                                    fmt_g17(center));
        double near = analysis::green_gradient_integral_radial(3, 0.99, 1e-3).value;
        expect(std::isfinite(near), "gradient integral blew up near the boundary");
    }
    return "majorant shape, fixed-point certification, rotation invariance, center value 3/4";
}

std::string invariants_iteration(const Options&) {
    // residual consistency through the exponential substitution
    auto dom = make_ball(0.05);
    ProblemSpec spec;
    spec.domain = dom;
    spec.n = 3;
    spec.R = Expression::parse("1");
    spec.S = Expression::parse("0");
    spec.lambda_sup = 1.0;
    spec.gamma_sup = 0.0;
    RunOptions ro;
    ro.mesh_size = dom->slab_diameter() / 8.0;
    ro.tol = 1e-9;
    ro.max_iter = 80;
    Solution s = picard::run_iteration(spec, ro);
    expect(s.converged, "reference run did not converge");

    // res_u(i) = D(i) + u_i ((n-2)/2) r_f(i) exactly, D the discrete
    // chain-rule defect of exp
    const fd::Grid& g = s.f.grid();
    std::vector<double> lap_f = fd::apply_laplacian(s.f);
    std::vector<double> lap_u = fd::apply_laplacian(s.u);
    fd::VectorField gf = fd::gradient(s.f);
    double chain_defect = 0, chain_defect_interior = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double grad2 = 0;
        for (int a = 0; a < 3; ++a) {
            double c = gf.comp[static_cast<std::size_t>(a) * g.size() + i];
            grad2 += c * c;
        }
        double gl = 0.5 * lap_f[i], gg = 0.25 * grad2;  // g = f/2 for n = 3
        double d = lap_u[i] - s.u[i] * (gl + gg);
        chain_defect = std::max(chain_defect, std::abs(d));
        if (g.full_stencil(i)) chain_defect_interior = std::max(chain_defect_interior, std::abs(d));
    }
    double sup_u = fd::sup_norm(s.u);
    double budget = chain_defect + 0.5 * sup_u * s.final_residual + 1e-13;
    expect(s.final_standard_residual <= budget,
           "standard residual " + fmt_g17(s.final_standard_residual) +
               " exceeds chain-defect budget " + fmt_g17(budget));
    double h = ro.mesh_size;
    expect(chain_defect_interior <= 0.5 * h * h,
           "interior chain defect " + fmt_g17(chain_defect_interior) + " not O(h^2)");

    // the iteration-coefficient switch: both conventions self-consistent
    ProblemSpec alt = spec;
    alt.grad_coef = picard::GradientCoefficient::Unit;
    Solution s2 = picard::run_iteration(alt, ro);
    expect(s2.converged && s2.final_residual <= 1e-8, "unit-coefficient run not self-consistent");

    return "standard residual = chain defect (" + fmt_g17(chain_defect) +
           " sup, interior " + fmt_g17(chain_defect_interior) +
           ") + transported gradient-form residual; both coefficient conventions converge";
}

std::string invariants_cli(const Options&) {
    cli::ExperimentConfig cfg;
    cfg.kind = geom::DomainKind::Ball;
    cfg.ball_center = {0, 0, 0};
    cfg.ball_radius = 0.05;
    cfg.domain_present = true;
    cfg.n = 3;
    cfg.R_text = "1";
    cfg.S_text = "0";
    cfg.lambda_sup = 1.0;
    cfg.gamma_sup = 0.0;
    cfg.mode = cli::Mode::Solve;
    cfg.mesh_size = 0.0125;
    cfg.tol = 1e-9;
    cfg.max_iter = 60;
    cfg.seed = 7;

    // round trip through the canonical text
    cli::ExperimentConfig back = cli::parse_config(cfg.canonical_text());
    expect(back == cfg, "canonical config text does not reparse to an equal config");

    // determinism: identical config + seed -> bit-identical artifacts; both
    // runs use the same output path so the echoed config matches too
    fs::path base = fs::temp_directory_path() / "yamabe_verify_determinism";
    fs::remove_all(base);
    fs::create_directories(base);
    auto run_into = [&](const std::string& sub) {
        cli::RunOverrides ov;
        ov.output_dir = (base / "run").string();
        auto out = cli::run_experiment(cfg, ov);
        expect(out.exit_code == 0, "determinism run failed: " + out.report);
        fs::rename(base / "run", base / sub);
    };
    run_into("a");
    run_into("b");
    auto slurp_masked = [&](const fs::path& p) {
        std::ifstream in(p);
        std::ostringstream buf;
        std::string line;
        while (std::getline(in, line))
            if (line.find("wall_time_seconds") == std::string::npos) buf << line << "\n";
        return buf.str();
    };
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(base / "a")) {
        fs::path other = base / "b" / entry.path().filename();
        expect(fs::exists(other), "artifact missing in the twin run");
        expect(slurp_masked(entry.path()) == slurp_masked(other),
               "artifact " + entry.path().filename().string() + " differs between twin runs");
        ++compared;
    }
    expect(compared >= 5, "expected at least 5 artifacts, got " + std::to_string(compared));

    // summary echoes a config that reparses equal (output_dir resolved)
    {
        std::ifstream in(base / "a" / "summary.json");
        nlohmann::json j = nlohmann::json::parse(in);
        cli::ExperimentConfig echoed = cli::parse_config(j["config_echo"].get<std::string>());
        cli::ExperimentConfig expected = cfg;
        expected.output_dir = (base / "run").string();
        expect(echoed == expected, "summary.json config_echo does not reparse equal");
    }
    fs::remove_all(base);
    return std::to_string(compared) + " artifacts bit-identical across twin runs (wall time "
           "masked); config round-trip holds";
}

std::string canary_slack(const Options&) {
    // a synthetic trace sitting between q and q + 0.05 must trip the
    // zero-slack checker and pass the 0.05-slack one
    double q = 0.3;
    std::vector<double> ratios = {q + 0.02, q + 0.02, q + 0.02};
    expect(!contraction_ratios_ok(ratios, q, 0.0), "zero-slack checker failed to flag");
    expect(contraction_ratios_ok(ratios, q, 0.05), "0.05-slack checker rejected a valid trace");
    expect(!contraction_ratios_ok({0.5, 1.0}, q, 0.8), "ratio >= 1 must always be flagged");
    return "slack sensitivity canary intact";
}

}  // namespace

SuiteResult run_suite(const Options& opts) {
    auto t0 = std::chrono::steady_clock::now();
    Harness h;

    h.run("criterion 1: poisson engine order", [&] { return criterion1(opts); });
    h.run("criterion 2: certificate arithmetic", [&] { return criterion2(opts); });
    h.run("criterion 3: fixed point vs oracle + explicit bound",
          [&] { return criterion3(opts); });

    std::vector<BatchRun> batch;
    h.run("criterion 4: contraction realized", [&] {
        batch = certified_batch(opts);
        return criterion4(batch);
    });
    h.run("criterion 5: uniform gradient bound", [&] {
        expect(!batch.empty(), "batch unavailable (criterion 4 failed to run)");
        return criterion5(batch);
    });
    h.run("criterion 6: green constants", [&] { return criterion6(opts); });

    std::vector<Solution> extra;
    h.run("criterion 7: boundary-shift pipeline", [&] { return criterion7(&extra); });
    h.run("criterion 8: constant-curvature deformation", [&] { return criterion8(&extra); });
    h.run("criterion 9: poincare + positivity", [&] {
        expect(!batch.empty(), "batch unavailable");
        return criterion9(batch, extra);
    });

    h.run("invariants: geometry", [&] { return invariants_geometry(opts); });
    h.run("invariants: poisson", [&] { return invariants_poisson(opts); });
    h.run("invariants: analysis", [&] { return invariants_analysis(opts); });
    h.run("invariants: iteration", [&] { return invariants_iteration(opts); });
    h.run("invariants: cli determinism + round trip", [&] { return invariants_cli(opts); });
    h.run("canary: contraction slack sensitivity", [&] { return canary_slack(opts); });

    h.result.all_passed = true;
    for (const auto& c : h.result.checks) h.result.all_passed = h.result.all_passed && c.passed;
    h.result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return h.result;
}

std::string format_report(const SuiteResult& r) {
    std::ostringstream out;
    for (const auto& c : r.checks) {
        char line[160];
        std::snprintf(line, sizeof line, "[%s] %-45s (%6.2fs) ", c.passed ? "PASS" : "FAIL",
                      c.name.c_str(), c.seconds);
        out << line << c.details << "\n";
    }
    out << (r.all_passed ? "VERIFY PASSED" : "VERIFY FAILED") << " in " << fmt_g17(r.seconds)
        << " s (" << r.checks.size() << " checks)\n";
    return out.str();
}

}  // namespace yamabe::verify
