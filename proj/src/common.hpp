#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace yamabe {

inline constexpr int kMaxDim = 8;
inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Fixed-capacity point/vector in R^n, n <= 8. Cheap to copy, no heap.
struct Vec {
    int n = 0;
    std::array<double, kMaxDim> a{};

    Vec() = default;
    Vec(std::initializer_list<double> xs) {
        n = static_cast<int>(xs.size());
        if (n > kMaxDim) throw std::invalid_argument("Vec: dimension > 8");
        int i = 0;
        for (double x : xs) a[i++] = x;
    }
    static Vec zero(int dim) {
        Vec v;
        v.n = dim;
        return v;
    }
    double& operator[](int i) { return a[i]; }
    double operator[](int i) const { return a[i]; }

    Vec operator+(const Vec& o) const {
        Vec r = *this;
        for (int i = 0; i < n; ++i) r.a[i] += o.a[i];
        return r;
    }
    Vec operator-(const Vec& o) const {
        Vec r = *this;
        for (int i = 0; i < n; ++i) r.a[i] -= o.a[i];
        return r;
    }
    Vec operator*(double s) const {
        Vec r = *this;
        for (int i = 0; i < n; ++i) r.a[i] *= s;
        return r;
    }
    double dot(const Vec& o) const {
        double s = 0;
        for (int i = 0; i < n; ++i) s += a[i] * o.a[i];
        return s;
    }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }
    Vec normalized() const {
        double m = norm();
        if (m == 0) throw std::invalid_argument("Vec: cannot normalize zero vector");
        return *this * (1.0 / m);
    }
};

/// Volume of the unit ball in R^n.
inline double unit_ball_volume(int n) {
    return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

/// Surface area of the unit sphere S^{n-1} in R^n.
inline double unit_sphere_area(int n) {
    return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Format a double with 17 significant digits (round-trip safe).
inline std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Thrown when a domain or problem violates a documented precondition.
class InvalidInput : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when an iterative method fails to reach its tolerance.
class SolverFailure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Thrown when a run requires a convergence certificate and none holds.
class CertificateFailure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace yamabe
