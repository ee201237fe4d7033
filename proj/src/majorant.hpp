#pragma once

#include <optional>

#include "common.hpp"

namespace yamabe::analysis {

/// The constant of the convex-domain gradient estimate in R^3,
/// 4.76 * pi^(2/3); see evans_bound in green.hpp.
double convex_green_coefficient();

/// Which geometric size parameter drives the scalar majorant.
enum class SizeMode {
    Volume,      ///< size = volume^{1/3}; exponential rate 1.25 * size (slab factor)
    Diameter,    ///< size = diameter;     exponential rate size
    BallRadius,  ///< size = ball radius;  exponential rate 2 * size (slab = 2r)
};

/// Parameters of the scalar majorant
///   f(t) = (C * size / (2(n-1))) * (Lambda * e^{rate * t} + t^2 + gamma),
/// whose smallest fixed point bounds every iterate's sup-gradient.
struct MajorantParams {
    int n = 3;
    double lambda_sup = 0;  ///< sup |R|
    double gamma_sup = 0;   ///< sup |S|
    double size = 0;        ///< per SizeMode
    double green_coeff = 0; ///< C (convex 3-D) or C_n (balls)
    SizeMode mode = SizeMode::Volume;

    double exp_rate() const;
    void validate() const;
};

double majorant(double t, const MajorantParams& p);

struct FixedPointResult {
    bool exists = false;
    double K = 0;                ///< smallest root of t = f(t) when exists
    double bracket_lo = 0;       ///< certified bracket around the root
    double bracket_hi = 0;
    double explicit_bound = 0;   ///< explicit_k_bound(p)
    bool beyond_scan_range = false;  ///< no root found on [0, 10]
};

/// Smallest nonnegative solution of t = majorant(t). Scans 1e4 points on
/// [0, 10] for the first sign change of f(t) - t, then bisects to 1e-12.
/// Non-existence (f stays above the diagonal) is a result, not an error.
FixedPointResult smallest_fixed_point(const MajorantParams& p);

/// Explicit upper bound for the smallest fixed point, valid whenever
/// size <= size_condition_limit(p):
///   Volume:     C*A*(4L+g) / (4(n-1))   [= C*A*(4L+g)/8 for n = 3]
///   Diameter:   C*d*(2.5L+g) / (2(n-1)) [= (C*d/4)(2.5L+g) for n = 3]
///   BallRadius: C*r*(2.5L+g) / (n-1)
double explicit_k_bound(const MajorantParams& p);

/// Largest size for which explicit_k_bound is guaranteed to dominate the
/// smallest fixed point (and be <= 1): the admissibility size condition.
double size_condition_limit(const MajorantParams& p);

/// Contraction factor of successive H^1_0 gradient differences:
///   q = (1/(2(n-1))) * (delta^2 * Lambda * e^{K delta} / 2 + sqrt(2) * delta * K).
/// q < 1 certifies geometric convergence of the iteration.
double contraction_constant(double delta, double lambda_sup, double K, int n);

}  // namespace yamabe::analysis
