#pragma once

#include "common.hpp"

namespace yamabe::analysis {

/// Dirichlet Green's function of the unit ball in R^n (3 <= n <= 8),
/// image-point construction, normalized so that G > 0 inside and
/// G(0, x') = (1/4pi)(1/|x'| - 1) for n = 3. Both points must lie in the
/// open unit ball and must not coincide.
double ball_green(int n, const Vec& x, const Vec& xp);

/// Gradient of ball_green in the first argument, analytic.
Vec ball_green_gradient(int n, const Vec& x, const Vec& xp);

struct QuadratureResult {
    double value = 0;
    double achieved_tol = 0;  ///< absolute-tolerance estimate actually met
    long evaluations = 0;
};

/// integral over B_1 of |grad_x G(x, x')| dx', by spherical quadrature
/// centered at x. The |x - x'|^{1-n} singularity is removed analytically
/// by the radial substitution. By symmetry the value depends only on |x|.
QuadratureResult green_gradient_integral(int n, const Vec& x, double rel_tol = 1e-4);
QuadratureResult green_gradient_integral_radial(int n, double radius_of_x, double rel_tol = 1e-4);

/// Same integral for the radius-r ball, evaluated in r-ball coordinates
/// through the scaling law G_r(x,x') = r^{2-n} G_1(x/r, x'/r). Used to
/// cross-check r * green_gradient_integral(n, x/r).
QuadratureResult scaled_ball_gradient_integral(int n, double r, const Vec& x,
                                               double rel_tol = 1e-4);

struct GreenConstant {
    double value = 0;       ///< sup over x in B_1 of the gradient integral
    double arg_radius = 0;  ///< |x| at which the sup was located
    double rel_tol = 0;
};

/// C_n = sup_{x in B_1} integral |grad_x G_1(x, x')| dx', located by a
/// radial scan refined near the maximizer. Results are cached per (n, tol).
GreenConstant ball_green_constant(int n, double rel_tol = 1e-4);

/// Gradient-integral bound for convex 3-D domains: 4.76 * (pi^2 * V)^{1/3}.
double evans_bound(double volume);

}  // namespace yamabe::analysis
