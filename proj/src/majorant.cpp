#include "majorant.hpp"

#include <cmath>

namespace yamabe::analysis {

double convex_green_coefficient() { return 4.76 * std::pow(kPi, 2.0 / 3.0); }

double MajorantParams::exp_rate() const {
    switch (mode) {
        case SizeMode::Volume: return 1.25 * size;
        case SizeMode::Diameter: return size;
        case SizeMode::BallRadius: return 2.0 * size;
    }
    return 0;
}

void MajorantParams::validate() const {
    if (n < 3 || n > kMaxDim) throw InvalidInput("majorant: dimension must be in [3, 8]");
    if (lambda_sup < 0 || gamma_sup < 0)
        throw InvalidInput("majorant: Lambda and gamma must be nonnegative");
    if (!(size > 0)) throw InvalidInput("majorant: size parameter must be > 0");
    if (!(green_coeff > 0)) throw InvalidInput("majorant: gradient-estimate constant must be > 0");
}

double majorant(double t, const MajorantParams& p) {
    p.validate();
    if (t < 0) throw InvalidInput("majorant: t must be >= 0");
    double pre = p.green_coeff * p.size / (2.0 * (p.n - 1));
    return pre * (p.lambda_sup * std::exp(p.exp_rate() * t) + t * t + p.gamma_sup);
}

FixedPointResult smallest_fixed_point(const MajorantParams& p) {
    p.validate();
    FixedPointResult r;
    r.explicit_bound = explicit_k_bound(p);

    auto g = [&](double t) { return majorant(t, p) - t; };

    if (g(0.0) <= 0.0) {  // f(0) = 0 only when Lambda = gamma = 0
        r.exists = true;
        r.K = 0;
        r.bracket_lo = r.bracket_hi = 0;
        return r;
    }

    const double t_max = 10.0;
    const int points = 10000;
    double prev_t = 0, prev_g = g(0.0);
    for (int i = 1; i <= points; ++i) {
        double t = t_max * i / points;
        double gt = g(t);
        if (gt <= 0.0) {
            // bisect the first sign change; f is increasing and convex, so
            // this brackets the smallest root
            double lo = prev_t, hi = t;
            for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
                double mid = 0.5 * (lo + hi);
                (g(mid) > 0.0 ? lo : hi) = mid;
            }
            r.exists = true;
            r.bracket_lo = lo;
            r.bracket_hi = hi;
            r.K = 0.5 * (lo + hi);
            return r;
        }
        prev_t = t;
        prev_g = gt;
    }
    (void)prev_g;
    r.beyond_scan_range = true;
    return r;
}

double explicit_k_bound(const MajorantParams& p) {
    p.validate();
    double C = p.green_coeff, s = p.size, L = p.lambda_sup, g = p.gamma_sup;
    switch (p.mode) {
        case SizeMode::Volume: return C * s * (4.0 * L + g) / (4.0 * (p.n - 1));
        case SizeMode::Diameter: return C * s * (2.5 * L + g) / (2.0 * (p.n - 1));
        case SizeMode::BallRadius: return C * s * (2.5 * L + g) / (p.n - 1);
    }
    return 0;
}

double size_condition_limit(const MajorantParams& p) {
    double C = p.green_coeff, L = p.lambda_sup, g = p.gamma_sup;
    double inf = 1e300;
    switch (p.mode) {
        case SizeMode::Volume: {
            double den = C * (4.0 * L + g);
            return std::min(1.0, den > 0 ? 4.0 * (p.n - 1) / den : inf);
        }
        case SizeMode::Diameter: {
            double den = C * (2.5 * L + g);
            return std::min(1.0, den > 0 ? 2.0 * (p.n - 1) / den : inf);
        }
        case SizeMode::BallRadius: {
            double den = C * (2.5 * L + g);
            return std::min(0.5, den > 0 ? (p.n - 1) / den : inf);
        }
    }
    return 0;
}

double contraction_constant(double delta, double lambda_sup, double K, int n) {
    if (delta < 0 || lambda_sup < 0 || K < 0)
        throw InvalidInput("contraction_constant: inputs must be nonnegative");
    if (n < 3) throw InvalidInput("contraction_constant: n must be >= 3");
    return (delta * delta * lambda_sup * std::exp(K * delta) / 2.0 +
            std::sqrt(2.0) * delta * K) /
           (2.0 * (n - 1));
}

}  // namespace yamabe::analysis
