#pragma once

#include <limits>
#include <optional>
#include <string>

#include "certificate.hpp"
#include "expression.hpp"
#include "field.hpp"

namespace yamabe::picard {

using fd::ScalarField;
using geom::CertificateReport;
using geom::Domain;
using geom::Theorem;

/// Coefficient on |grad f|^2 inside the bracket of the iteration's
/// right-hand side: Full uses (n-1)(n-2), matching the gradient-form
/// equation the fixed point must solve; Unit uses 1 (the iteration as
/// displayed). Runs are self-consistent either way.
enum class GradientCoefficient { Full, Unit };

double gradient_coefficient_value(GradientCoefficient c, int n);

struct ProblemSpec {
    std::shared_ptr<const Domain> domain;
    int n = 3;
    Expression R = Expression::parse("0");
    Expression S = Expression::parse("0");
    double lambda_sup = 0;  ///< certified sup |R|; sampled violations are an error
    double gamma_sup = 0;   ///< certified sup |S|
    bool bounds_estimated = false;
    double boundary_c = 0;  ///< constant boundary value of f
    GradientCoefficient grad_coef = GradientCoefficient::Full;
};

struct TraceRow {
    int k = 0;
    double sup_grad = 0;   ///< |grad f_k|_inf after the step
    double diff_h10 = 0;   ///< |grad(f_k - f_{k-1})|_L2
    double ratio = std::numeric_limits<double>::quiet_NaN();  ///< defined for k >= 2
    double residual = 0;   ///< sup-norm nonlinear residual at f_k
    double poincare_ratio = 0;  ///< l2(diff) / h10(diff)
};

struct IterationTrace {
    std::vector<TraceRow> rows;
    std::string stop_reason;  ///< "converged", "max_iter", ...
};

struct RunOptions {
    double mesh_size = 0;
    double tol = 1e-9;
    int max_iter = 200;
    bool override_certificate = false;
    Theorem theorem = Theorem::T1;
    std::uint64_t volume_seed = Domain::kDefaultVolumeSeed;
};

struct Solution {
    ScalarField f;  ///< gradient-form solution (boundary = boundary_c)
    ScalarField u;  ///< conformal factor e^{(n-2) f / 2} (boundary e^{(n-2)c/2})
    CertificateReport certificate;
    IterationTrace trace;
    bool converged = false;
    bool certified = false;       ///< certificate passed (no override needed)
    bool override_used = false;
    double K = 0;                 ///< smallest majorant fixed point (when it exists)
    bool K_exists = false;
    double q = 0;                 ///< contraction_constant(delta, Lambda, K, n)
    double final_residual = 0;           ///< gradient-form residual at the last iterate
    double final_standard_residual = 0;  ///< power-form residual of u (derived constants)
    double standard_residual_paper_form = 0;  ///< power-form residual, alternate constants
    double max_sup_grad = 0;
    double max_ratio = 0;             ///< over k >= 2 (0 when fewer steps)
    double max_poincare_ratio = 0;
    double min_u = 0;
    bool gradient_bound_ok = true;    ///< sup_grad <= K + 0.05 + 10 h at every step
    bool contraction_bound_ok = true; ///< ratio_k <= q + 0.05 and < 1 for k >= 2
    bool poincare_ok = true;          ///< l2 <= (delta/sqrt2) h10 + 1e-6 per difference
    double wall_seconds = 0;
};

/// One substitution step: solves
///   L f_next = -(1/(2(n-1))) [R e^{2 f} + coef |grad f|^2] + S,  f_next = 0 on the boundary,
/// with R, S pre-evaluated at the interior nodes.
ScalarField picard_step(const ScalarField& f, const std::vector<double>& R_nodes,
                        const std::vector<double>& S_nodes, int n, double grad_coef);

/// sup_i |L f + (1/(2(n-1)))[R e^{2f} + coef |grad f|^2] - S| at the nodes.
double nonlinear_residual(const ScalarField& f, const std::vector<double>& R_nodes,
                          const std::vector<double>& S_nodes, int n, double grad_coef);
double nonlinear_residual(const ScalarField& f, const ProblemSpec& spec);

/// u = e^{(n-2) f / 2}; u > 0 everywhere and u = e^{(n-2)c/2} on the boundary.
ScalarField to_standard_form(const ScalarField& f, int n);

/// sup | L u - ((n-2)/2) S u + ((n-2)/(4(n-1))) R u^{(n+2)/(n-2)} |,
/// the power form obtained by substituting u = e^{(n-2)f/2}.
double standard_residual(const ScalarField& u, const std::vector<double>& R_nodes,
                         const std::vector<double>& S_nodes, int n);
/// Alternate printed constants: sup | L u - S u + ((n-2)/(2(n-1))) R u^{(n+2)/(n-2)} |.
double standard_residual_alt(const ScalarField& u, const std::vector<double>& R_nodes,
                             const std::vector<double>& S_nodes, int n);

/// Runs the iteration from f = 0 until the H^1_0 seminorm of successive
/// differences falls below tol and the nonlinear residual below 10 tol
/// (or max_iter). Requires a passing certificate unless
/// opts.override_certificate is set, in which case the run is labeled
/// uncertified. Exhausting max_iter yields a non-converged Solution, not
/// an exception.
Solution run_iteration(const ProblemSpec& spec, const RunOptions& opts);

/// Boundary constant c with curvature parameter lambda: substitutes
/// v = f - c, solves the zero-boundary problem with R = lambda e^{2c},
/// and returns f = v + c. Requires |lambda| e^{2c} <= 1/4 and a passing
/// Theorem-2 certificate. The certificate is independent of c.
Solution solve_shifted(std::shared_ptr<const Domain> domain, int n, double c, double lambda,
                       const Expression& S, double gamma_sup, const RunOptions& opts);

struct DeformResult {
    Solution solution;          ///< solve on the scaled domain d * base
    ScalarField pulled_back;    ///< f~(x) = f(d x) on the base grid
    double curvature = 0;       ///< lambda / d^2
    double pulled_residual = 0; ///< residual of f~ against R = lambda d^2 on the base
    double amplification = 0;   ///< 1 / d^2
};

/// Solves the constant-coefficient problem R = lambda, S = 0 on d * base
/// (zero boundary), pulls the solution back to the base domain, and
/// reports the achieved constant curvature lambda / d^2. The base domain
/// must contain the origin. Admissibility is checked on the scaled domain
/// with (|lambda|, 0); failure names the largest admissible d estimate.
DeformResult constant_curvature_deform(std::shared_ptr<const Domain> base, double d, double lambda,
                                       const RunOptions& opts);

}  // namespace yamabe::picard
