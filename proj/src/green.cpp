#include "green.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <mutex>

namespace yamabe::analysis {

namespace {

void check_dim(int n) {
    if (n < 3 || n > kMaxDim)
        throw InvalidInput("green: dimension must be in [3, 8], got " + std::to_string(n));
}

double fundamental_coeff(int n) { return 1.0 / ((n - 2) * unit_sphere_area(n)); }

/// rho^2 = |x|^2 |x'|^2 - 2 x.x' + 1, the squared image distance
/// |x'| * |x - x'/|x'|^2|, symmetric in x and x'.
double rho2(const Vec& x, const Vec& xp) {
    return x.norm2() * xp.norm2() - 2.0 * x.dot(xp) + 1.0;
}

void check_args(int n, const Vec& x, const Vec& xp) {
    check_dim(n);
    if (x.n != n || xp.n != n) throw InvalidInput("green: point dimension mismatch");
    if (x.norm() >= 1.0 || xp.norm() > 1.0 + 1e-12)
        throw InvalidInput("green: points must lie in the (closed) unit ball, x interior");
    if ((x - xp).norm() == 0.0) throw InvalidInput("green: coincident points");
}

/// Adaptive Simpson with absolute tolerance. Returns the integral and adds
/// the achieved-error estimate into *err.
double adaptive_simpson(const std::function<double(double)>& f, double a, double fa, double m,
                        double fm, double b, double fb, double whole, double tol, int depth,
                        double* err, long* evals) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    *evals += 2;
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        *err += std::abs(delta) / 15.0;
        return left + right + delta / 15.0;
    }
    return adaptive_simpson(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1, err, evals) +
           adaptive_simpson(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1, err, evals);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 double* err, long* evals) {
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    *evals += 3;
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, fa, m, fm, b, fb, whole, tol, 40, err, evals);
}

/// Inner radial integrand in the stabilized form
///   |grad_x G(x, x + r w)| * r^{n-1}
///     = c_n (n-2) * | w + r^{n-1} rho^{-n} (|x'|^2 x - x') |,
/// which is finite at r = 0 (the image term vanishes there).
double radial_integrand(int n, const Vec& x, const Vec& w, double r) {
    Vec xp = x + w * r;
    double r2 = rho2(x, xp);
    double rn = std::pow(r2, -0.5 * n);  // rho^{-n}
    Vec image_term = (x * xp.norm2() - xp) * (std::pow(r, n - 1) * rn);
    return fundamental_coeff(n) * (n - 2) * (w + image_term).norm();
}

QuadratureResult gradient_integral_axis(int n, double s, double rel_tol) {
    check_dim(n);
    if (s < 0 || s >= 1.0)
        throw InvalidInput("green: |x| must lie in [0, 1), got " + fmt_g17(s));
    if (!(rel_tol > 0)) throw InvalidInput("green: rel_tol must be > 0");

    Vec x = Vec::zero(n);
    x[0] = s;
    const double ring = unit_sphere_area(n - 1);  // measure of the azimuthal S^{n-2}

    QuadratureResult res;
    double inner_err_sink = 0;  // per-call inner errors are budgeted analytically below
    // directions w = cos(theta) e_0 + sin(theta) e_1; axial symmetry about e_0
    auto shell = [&](double theta, double inner_tol) {
        Vec w = Vec::zero(n);
        w[0] = std::cos(theta);
        w[1] = std::sin(theta);
        double xc = s * w[0];
        double rmax = -xc + std::sqrt(std::max(0.0, xc * xc + 1.0 - s * s));
        if (rmax <= 0) return 0.0;
        auto fr = [&](double r) { return radial_integrand(n, x, w, r); };
        return integrate(fr, 0.0, rmax, inner_tol, &inner_err_sink, &res.evaluations);
    };

    // rough scale for converting the relative tolerance to absolute ones
    double coarse = 0;
    {
        const int m = 24;
        for (int i = 0; i < m; ++i) {
            double th = kPi * (i + 0.5) / m;
            coarse += shell(th, 1e-3) * std::pow(std::sin(th), n - 2) * ring * (kPi / m);
        }
    }
    const double abs_tol = rel_tol * std::max(std::abs(coarse), 1e-3);
    // pointwise inner error <= ring * inner_tol, so the outer integral picks
    // up at most pi * ring * inner_tol from the shells
    const double inner_tol = 0.1 * abs_tol / (kPi * ring);

    double outer_err = 0;
    auto outer = [&](double theta) {
        double sn = std::pow(std::sin(theta), n - 2);
        if (sn == 0.0) return 0.0;
        return ring * sn * shell(theta, inner_tol);
    };
    res.value = integrate(outer, 0.0, kPi, 0.5 * abs_tol, &outer_err, &res.evaluations);
    res.achieved_tol = outer_err + 0.1 * abs_tol;
    if (res.achieved_tol > 2.0 * abs_tol)
        throw SolverFailure("green quadrature: requested abs tol " + fmt_g17(abs_tol) +
                            ", achieved only " + fmt_g17(res.achieved_tol));
    return res;
}

}  // namespace

double ball_green(int n, const Vec& x, const Vec& xp) {
    check_args(n, x, xp);
    double c = fundamental_coeff(n);
    double d = (x - xp).norm();
    double p = 1.0 - 0.5 * n;  // exponents (2-n)/2 applied to squared radii
    return c * (std::pow(d * d, p) - std::pow(rho2(x, xp), p));
}

Vec ball_green_gradient(int n, const Vec& x, const Vec& xp) {
    check_args(n, x, xp);
    double c = fundamental_coeff(n) * (2.0 - n);
    Vec diff = x - xp;
    double dn = std::pow(diff.norm2(), -0.5 * n);
    double rn = std::pow(rho2(x, xp), -0.5 * n);
    Vec g = diff * dn - (x * xp.norm2() - xp) * rn;
    return g * c;
}

QuadratureResult green_gradient_integral(int n, const Vec& x, double rel_tol) {
    if (x.n != n) throw InvalidInput("green: point dimension mismatch");
    return gradient_integral_axis(n, x.norm(), rel_tol);
}

QuadratureResult green_gradient_integral_radial(int n, double radius_of_x, double rel_tol) {
    return gradient_integral_axis(n, radius_of_x, rel_tol);
}

QuadratureResult scaled_ball_gradient_integral(int n, double r, const Vec& x, double rel_tol) {
    check_dim(n);
    if (!(r > 0)) throw InvalidInput("green: ball radius must be > 0");
    if (x.n != n || x.norm() >= r) throw InvalidInput("green: x must lie inside the radius-r ball");

    // grad_x G_r(x, x') = r^{1-n} (grad G_1)(x/r, x'/r); quadrature runs in
    // the radius-r geometry so the change of variables is exercised for real.
    double s = x.norm();
    Vec xs = Vec::zero(n);
    xs[0] = s;
    const double ring = unit_sphere_area(n - 1);

    QuadratureResult res;
    double inner_err_sink = 0;
    auto shell = [&](double theta, double inner_tol) {
        Vec w = Vec::zero(n);
        w[0] = std::cos(theta);
        w[1] = std::sin(theta);
        double xc = s * w[0];
        double rmax = -xc + std::sqrt(std::max(0.0, xc * xc + r * r - s * s));
        if (rmax <= 0) return 0.0;
        auto fr = [&](double t) {
            if (t == 0.0) return fundamental_coeff(n) * (n - 2.0);  // analytic limit
            Vec xp = xs + w * t;
            Vec g = ball_green_gradient(n, xs * (1.0 / r), xp * (1.0 / r));
            return std::pow(r, 1.0 - n) * g.norm() * std::pow(t, n - 1);
        };
        return integrate(fr, 0.0, rmax, inner_tol, &inner_err_sink, &res.evaluations);
    };

    double coarse = 0;
    {
        const int m = 24;
        for (int i = 0; i < m; ++i) {
            double th = kPi * (i + 0.5) / m;
            coarse += shell(th, 1e-3) * std::pow(std::sin(th), n - 2) * ring * (kPi / m);
        }
    }
    const double abs_tol = rel_tol * std::max(std::abs(coarse), 1e-3);
    const double inner_tol = 0.1 * abs_tol / (kPi * ring);
    double outer_err = 0;
    auto outer = [&](double theta) {
        double sn = std::pow(std::sin(theta), n - 2);
        if (sn == 0.0) return 0.0;
        return ring * sn * shell(theta, inner_tol);
    };
    res.value = integrate(outer, 0.0, kPi, 0.5 * abs_tol, &outer_err, &res.evaluations);
    res.achieved_tol = outer_err + 0.1 * abs_tol;
    return res;
}

GreenConstant ball_green_constant(int n, double rel_tol) {
    check_dim(n);
    static std::mutex mu;
    static std::map<std::pair<int, double>, GreenConstant> cache;
    {
        std::lock_guard<std::mutex> lk(mu);
        auto it = cache.find({n, rel_tol});
        if (it != cache.end()) return it->second;
    }

    auto eval = [&](double s) { return green_gradient_integral_radial(n, s, rel_tol).value; };

    double best_s = 0, best = -1;
    for (double s : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.88, 0.94, 0.97, 0.985, 0.995}) {
        double v = eval(s);
        if (v > best) {
            best = v;
            best_s = s;
        }
    }
    // golden-section refinement around the best sample
    double lo = std::max(0.0, best_s - 0.1), hi = std::min(0.999, best_s + 0.1);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = eval(c), fd = eval(d);
    for (int it = 0; it < 40 && hi - lo > 1e-4; ++it) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = eval(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = eval(d);
        }
    }
    double s_star = 0.5 * (lo + hi);
    double v_star = eval(s_star);
    GreenConstant g;
    if (v_star >= best) {
        g.value = v_star;
        g.arg_radius = s_star;
    } else {
        g.value = best;
        g.arg_radius = best_s;
    }
    g.rel_tol = rel_tol;
    std::lock_guard<std::mutex> lk(mu);
    cache[{n, rel_tol}] = g;
    return g;
}

double evans_bound(double volume) {
    if (!(volume > 0)) throw InvalidInput("evans_bound: volume must be > 0");
    return 4.76 * std::cbrt(kPi * kPi * volume);
}

}  // namespace yamabe::analysis
