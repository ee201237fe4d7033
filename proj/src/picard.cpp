#include "picard.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace yamabe::picard {

double gradient_coefficient_value(GradientCoefficient c, int n) {
    return c == GradientCoefficient::Full ? static_cast<double>((n - 1) * (n - 2)) : 1.0;
}

namespace {

std::vector<double> eval_at_nodes(const Expression& e, const fd::Grid& g) {
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = e.eval(g.position(i));
    return out;
}

void check_certified_bound(const char* what, const std::vector<double>& nodes, double bound) {
    double sup = 0;
    for (double x : nodes) sup = std::max(sup, std::abs(x));
    if (sup > bound * (1.0 + 1e-12) + 1e-300)
        throw InvalidInput(std::string("run: sampled sup|") + what + "| = " + fmt_g17(sup) +
                           " exceeds the certified bound " + fmt_g17(bound));
}

std::vector<double> squared_gradient(const ScalarField& f) {
    fd::VectorField g = fd::gradient(f);
    const std::size_t count = f.size();
    const int n = f.grid().dim();
    std::vector<double> out(count, 0.0);
    for (int a = 0; a < n; ++a)
        for (std::size_t i = 0; i < count; ++i) {
            double c = g.comp[static_cast<std::size_t>(a) * count + i];
            out[i] += c * c;
        }
    return out;
}

}  // namespace

ScalarField picard_step(const ScalarField& f, const std::vector<double>& R_nodes,
                        const std::vector<double>& S_nodes, int n, double grad_coef) {
    const std::size_t count = f.size();
    std::vector<double> grad2 = squared_gradient(f);
    std::vector<double> rhs(count);
    const double pre = 1.0 / (2.0 * (n - 1));
    for (std::size_t i = 0; i < count; ++i)
        rhs[i] = -pre * (R_nodes[i] * std::exp(2.0 * f[i]) + grad_coef * grad2[i]) + S_nodes[i];
    return fd::solve_dirichlet(f.grid_ptr(), rhs, fd::Boundary::constant(0.0));
}

double nonlinear_residual(const ScalarField& f, const std::vector<double>& R_nodes,
                          const std::vector<double>& S_nodes, int n, double grad_coef) {
    std::vector<double> lap = fd::apply_laplacian(f);
    std::vector<double> grad2 = squared_gradient(f);
    const double pre = 1.0 / (2.0 * (n - 1));
    double sup = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        double r = lap[i] + pre * (R_nodes[i] * std::exp(2.0 * f[i]) + grad_coef * grad2[i]) -
                   S_nodes[i];
        sup = std::max(sup, std::abs(r));
    }
    return sup;
}

double nonlinear_residual(const ScalarField& f, const ProblemSpec& spec) {
    const fd::Grid& g = f.grid();
    return nonlinear_residual(f, eval_at_nodes(spec.R, g), eval_at_nodes(spec.S, g), spec.n,
                              gradient_coefficient_value(spec.grad_coef, spec.n));
}

ScalarField to_standard_form(const ScalarField& f, int n) {
    const double half = 0.5 * (n - 2);
    std::vector<double> u(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) u[i] = std::exp(half * f[i]);
    fd::Boundary ub =
        f.boundary().is_constant()
            ? fd::Boundary::constant(std::exp(half * f.boundary().constant_value()))
            : fd::Boundary::function([half, fb = f.boundary()](const Vec& p) {
                  return std::exp(half * fb(p));
              });
    return ScalarField(f.grid_ptr(), std::move(u), std::move(ub));
}

namespace {

double standard_residual_impl(const ScalarField& u, const std::vector<double>& R_nodes,
                              const std::vector<double>& S_nodes, int n, double s_coef,
                              double r_coef) {
    std::vector<double> lap = fd::apply_laplacian(u);
    const double p = (n + 2.0) / (n - 2.0);
    double sup = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double r = lap[i] - s_coef * S_nodes[i] * u[i] + r_coef * R_nodes[i] * std::pow(u[i], p);
        sup = std::max(sup, std::abs(r));
    }
    return sup;
}

}  // namespace

double standard_residual(const ScalarField& u, const std::vector<double>& R_nodes,
                         const std::vector<double>& S_nodes, int n) {
    return standard_residual_impl(u, R_nodes, S_nodes, n, 0.5 * (n - 2),
                                  (n - 2.0) / (4.0 * (n - 1)));
}

double standard_residual_alt(const ScalarField& u, const std::vector<double>& R_nodes,
                             const std::vector<double>& S_nodes, int n) {
    return standard_residual_impl(u, R_nodes, S_nodes, n, 1.0, (n - 2.0) / (2.0 * (n - 1)));
}

Solution run_iteration(const ProblemSpec& spec, const RunOptions& opts) {
    auto t0 = std::chrono::steady_clock::now();
    if (!spec.domain) throw InvalidInput("run: missing domain");
    if (spec.n != spec.domain->dim()) throw InvalidInput("run: dimension mismatch");
    if (!(opts.tol > 0)) throw InvalidInput("run: tol must be > 0");
    if (opts.max_iter < 1) throw InvalidInput("run: max_iter must be >= 1");

    const double slab = spec.domain->slab_diameter();
    if (!(opts.mesh_size > 0) || opts.mesh_size > slab / 8.0 + 1e-15)
        throw InvalidInput("run: mesh_size must satisfy mesh_size <= slab_diameter/8 = " +
                           fmt_g17(slab / 8.0) + ", got " + fmt_g17(opts.mesh_size));

    CertificateReport cert =
        geom::check_admissibility(*spec.domain, spec.lambda_sup, spec.gamma_sup, opts.theorem,
                                  opts.volume_seed);
    if (!cert.passed && !opts.override_certificate)
        throw CertificateFailure("run: certificate failed (tightest violated bound: " +
                                 cert.tightest_violation + "); pass the override flag to run "
                                 "uncertified");

    auto grid = fd::build_grid(spec.domain, opts.mesh_size);
    std::vector<double> R_nodes = eval_at_nodes(spec.R, *grid);
    std::vector<double> S_nodes = eval_at_nodes(spec.S, *grid);
    check_certified_bound("R", R_nodes, spec.lambda_sup);
    check_certified_bound("S", S_nodes, spec.gamma_sup);

    const double grad_coef = gradient_coefficient_value(spec.grad_coef, spec.n);
    const double h = opts.mesh_size;

    Solution sol;
    sol.certificate = cert;
    sol.certified = cert.passed;
    sol.override_used = !cert.passed && opts.override_certificate;

    analysis::MajorantParams mp = cert.majorant_params();
    if (mp.size > 0) {
        analysis::FixedPointResult fp = analysis::smallest_fixed_point(mp);
        sol.K_exists = fp.exists;
        sol.K = fp.exists ? fp.K : 0.0;
    }
    sol.q = sol.K_exists
               ? analysis::contraction_constant(slab, cert.lambda_used, sol.K, spec.n)
               : cert.contraction_q;

    const double grad_slack = sol.K + 0.05 + 10.0 * h;
    const double poincare_bound = slab / std::sqrt(2.0);

    ScalarField f(grid);  // f_0 = 0, zero boundary
    double prev_diff_h10 = -1;
    for (int k = 1; k <= opts.max_iter; ++k) {
        ScalarField f_next = picard_step(f, R_nodes, S_nodes, spec.n, grad_coef);

        ScalarField diff(grid);
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = f_next[i] - f[i];
        double diff_h10 = fd::h10_seminorm(diff);
        double diff_l2 = fd::l2_norm(diff);

        TraceRow row;
        row.k = k;
        row.sup_grad = fd::sup_norm(fd::gradient(f_next));
        row.diff_h10 = diff_h10;
        row.residual = nonlinear_residual(f_next, R_nodes, S_nodes, spec.n, grad_coef);
        row.poincare_ratio = diff_h10 > 0 ? diff_l2 / diff_h10 : 0.0;
        if (k >= 2 && prev_diff_h10 > 0) row.ratio = diff_h10 / prev_diff_h10;

        sol.max_sup_grad = std::max(sol.max_sup_grad, row.sup_grad);
        sol.max_poincare_ratio = std::max(sol.max_poincare_ratio, row.poincare_ratio);
        if (diff_l2 > poincare_bound * diff_h10 + 1e-6) sol.poincare_ok = false;
        if (sol.certified && sol.K_exists && row.sup_grad > grad_slack)
            sol.gradient_bound_ok = false;
        if (!std::isnan(row.ratio)) {
            sol.max_ratio = std::max(sol.max_ratio, row.ratio);
            if (sol.certified && k >= 3 && (row.ratio > sol.q + 0.05 || row.ratio >= 1.0))
                sol.contraction_bound_ok = false;
        }

        sol.trace.rows.push_back(row);
        f = std::move(f_next);
        prev_diff_h10 = diff_h10;

        if (diff_h10 <= opts.tol && row.residual <= 10.0 * opts.tol) {
            sol.converged = true;
            sol.trace.stop_reason = "converged";
            break;
        }
    }
    if (!sol.converged) sol.trace.stop_reason = "max_iter";

    sol.f = f;
    sol.u = to_standard_form(f, spec.n);
    sol.min_u = sol.u.size() ? *std::min_element(sol.u.values().begin(), sol.u.values().end())
                             : 0.0;
    sol.final_residual = sol.trace.rows.back().residual;
    sol.final_standard_residual = standard_residual(sol.u, R_nodes, S_nodes, spec.n);
    sol.standard_residual_paper_form = standard_residual_alt(sol.u, R_nodes, S_nodes, spec.n);
    sol.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
}

Solution solve_shifted(std::shared_ptr<const Domain> domain, int n, double c, double lambda,
                       const Expression& S, double gamma_sup, const RunOptions& opts) {
    // lambda = 0 must not turn into 0 * exp(huge) = NaN
    const double scaled = lambda == 0.0 ? 0.0 : lambda * std::exp(2.0 * c);
    if (!(std::abs(scaled) <= 0.25 * (1.0 + 1e-12)))
        throw CertificateFailure("shifted: |lambda| e^{2c} = " + fmt_g17(std::abs(scaled)) +
                                 " exceeds the T2 rescaling bound 1/4");

    ProblemSpec vspec;
    vspec.domain = std::move(domain);
    vspec.n = n;
    vspec.R = Expression::parse(fmt_g17(scaled));
    vspec.S = S;
    vspec.lambda_sup = 0.25;
    vspec.gamma_sup = gamma_sup;
    RunOptions vopts = opts;
    vopts.theorem = Theorem::T2;

    Solution sol = run_iteration(vspec, vopts);

    // f = v + c; same interior increments, boundary trace c
    std::vector<double> fv = sol.f.values();
    for (double& x : fv) x += c;
    sol.f = ScalarField(sol.f.grid_ptr(), std::move(fv), fd::Boundary::constant(c));
    sol.u = to_standard_form(sol.f, n);
    sol.min_u = *std::min_element(sol.u.values().begin(), sol.u.values().end());

    // residuals of f against the original R = lambda coefficient
    const fd::Grid& g = sol.f.grid();
    std::vector<double> R_nodes(g.size(), lambda), S_nodes(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) S_nodes[i] = S.eval(g.position(i));
    sol.final_residual = nonlinear_residual(sol.f, R_nodes, S_nodes, n,
                                            gradient_coefficient_value(vspec.grad_coef, n));
    sol.final_standard_residual = standard_residual(sol.u, R_nodes, S_nodes, n);
    sol.standard_residual_paper_form = standard_residual_alt(sol.u, R_nodes, S_nodes, n);
    return sol;
}

DeformResult constant_curvature_deform(std::shared_ptr<const Domain> base, double d, double lambda,
                                       const RunOptions& opts) {
    if (!base) throw InvalidInput("deform: missing base domain");
    auto scaled = std::make_shared<const Domain>(base->scaled(d));

    CertificateReport cert = geom::check_admissibility(*scaled, std::abs(lambda), 0.0, Theorem::T1,
                                                       opts.volume_seed);
    if (!cert.passed && !opts.override_certificate) {
        // estimate the admissibility threshold in d by bisection
        double lo = 0.0, hi = d;
        for (int it = 0; it < 12; ++it) {
            double mid = 0.5 * (lo + hi);
            bool ok = false;
            try {
                ok = mid > 0 && geom::check_admissibility(base->scaled(mid), std::abs(lambda),
                                                          0.0, Theorem::T1, opts.volume_seed)
                                    .passed;
            } catch (const std::exception&) {
            }
            (ok ? lo : hi) = mid;
        }
        throw CertificateFailure("deform: scaled domain fails admissibility at d = " +
                                 fmt_g17(d) + " (tightest: " + cert.tightest_violation +
                                 "); estimated admissible below d ~ " + fmt_g17(lo));
    }

    ProblemSpec spec;
    spec.domain = scaled;
    spec.n = base->dim();
    spec.R = Expression::parse(fmt_g17(lambda));
    spec.S = Expression::parse("0");
    spec.lambda_sup = std::abs(lambda);
    spec.gamma_sup = 0.0;

    Solution sol = run_iteration(spec, opts);

    // pull back to the base domain: the scaled grid maps node-for-node onto
    // the base grid with mesh_size / d
    auto base_grid = fd::build_grid(base, opts.mesh_size / d);
    const fd::Grid& gs = sol.f.grid();
    if (base_grid->size() != gs.size())
        throw SolverFailure("deform: scaled/base grid node mismatch (" +
                            std::to_string(gs.size()) + " vs " +
                            std::to_string(base_grid->size()) + ")");
    for (std::size_t i = 0; i < gs.size(); ++i) {
        Vec pb = base_grid->position(i) * d, ps = gs.position(i);
        if ((pb - ps).norm() > 1e-9 * std::max(1.0, d))
            throw SolverFailure("deform: node correspondence broke at node " +
                                std::to_string(i));
    }
    ScalarField pulled(base_grid, sol.f.values(), fd::Boundary::constant(0.0));
    DeformResult res{std::move(sol), std::move(pulled)};

    res.curvature = lambda / (d * d);
    res.amplification = 1.0 / (d * d);
    std::vector<double> R_nodes(base_grid->size(), lambda * d * d),
        S_nodes(base_grid->size(), 0.0);
    res.pulled_residual = nonlinear_residual(
        res.pulled_back, R_nodes, S_nodes, spec.n,
        gradient_coefficient_value(spec.grad_coef, spec.n));
    return res;
}

}  // namespace yamabe::picard
