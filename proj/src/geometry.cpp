#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace yamabe::geom {

namespace {

constexpr double kUnitNormalTol = 1e-12;

/// Quasi-uniform directions on S^2 (Fibonacci spiral).
Vec fibonacci_direction(long i, long count) {
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    double z = 1.0 - (2.0 * i + 1.0) / count;
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi = 2.0 * kPi * (i / golden - std::floor(i / golden));
    Vec u{0, 0, 0};
    u[0] = r * std::cos(phi);
    u[1] = r * std::sin(phi);
    u[2] = z;
    return u;
}

/// Solve the 3x3 system A x = b by Gaussian elimination with partial
/// pivoting; returns nullopt when |det| is below `tol`.
std::optional<Vec> solve3(const Vec rows[3], const double b[3], double tol) {
    double m[3][4];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m[i][j] = rows[i][j];
        m[i][3] = b[i];
    }
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        if (std::abs(m[piv][col]) < tol) return std::nullopt;
        std::swap(m[piv], m[col]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            double f = m[r][col] / m[col][col];
            for (int j = col; j < 4; ++j) m[r][j] -= f * m[col][j];
        }
    }
    Vec x{0, 0, 0};
    for (int i = 0; i < 3; ++i) x[i] = m[i][3] / m[i][i];
    return x;
}

}  // namespace

Domain Domain::ball(const Vec& center, double radius) {
    if (center.n < 3 || center.n > kMaxDim)
        throw InvalidInput("ball: dimension must be in [3, 8], got " + std::to_string(center.n));
    if (!(radius > 0)) throw InvalidInput("ball: radius must be > 0");
    Domain d;
    d.kind_ = DomainKind::Ball;
    d.n_ = center.n;
    d.center_ = center;
    d.radius_ = radius;
    d.bbox_lo_ = d.bbox_hi_ = center;
    for (int i = 0; i < d.n_; ++i) {
        d.bbox_lo_[i] -= radius;
        d.bbox_hi_[i] += radius;
    }
    return d;
}

Domain Domain::box(const Vec& lo, const Vec& hi) {
    if (lo.n != hi.n) throw InvalidInput("box: lo/hi dimension mismatch");
    if (lo.n < 3 || lo.n > kMaxDim)
        throw InvalidInput("box: dimension must be in [3, 8], got " + std::to_string(lo.n));
    for (int i = 0; i < lo.n; ++i)
        if (!(lo[i] < hi[i]))
            throw InvalidInput("box: lo < hi must hold componentwise (axis " + std::to_string(i) +
                               ")");
    Domain d;
    d.kind_ = DomainKind::Box;
    d.n_ = lo.n;
    d.lo_ = lo;
    d.hi_ = hi;
    d.bbox_lo_ = lo;
    d.bbox_hi_ = hi;
    return d;
}

Domain Domain::polytope(std::vector<Vec> normals, std::vector<double> offsets) {
    if (normals.size() != offsets.size() || normals.empty())
        throw InvalidInput("polytope: need matching, nonempty normals/offsets");
    if (normals.size() > 64) throw InvalidInput("polytope: at most 64 half-spaces supported");
    for (const Vec& u : normals) {
        if (u.n != 3) throw InvalidInput("polytope: only 3-D polytopes are supported");
        if (std::abs(u.norm() - 1.0) > kUnitNormalTol)
            throw InvalidInput("polytope: normals must have unit length (tol 1e-12)");
    }

    Domain d;
    d.kind_ = DomainKind::Polytope;
    d.n_ = 3;
    d.normals_ = std::move(normals);
    d.offsets_ = std::move(offsets);

    // Vertices: intersections of half-space triples that satisfy every
    // constraint. Fine at desk scale (<= 64 faces).
    const size_t m = d.normals_.size();
    double scale = 1.0;
    for (double b : d.offsets_) scale = std::max(scale, std::abs(b));
    const double feas_tol = 1e-9 * scale;
    for (size_t i = 0; i < m; ++i)
        for (size_t j = i + 1; j < m; ++j)
            for (size_t k = j + 1; k < m; ++k) {
                Vec rows[3] = {d.normals_[i], d.normals_[j], d.normals_[k]};
                double b[3] = {d.offsets_[i], d.offsets_[j], d.offsets_[k]};
                auto x = solve3(rows, b, 1e-12);
                if (!x) continue;
                bool feasible = true;
                for (size_t q = 0; q < m && feasible; ++q)
                    feasible = d.normals_[q].dot(*x) <= d.offsets_[q] + feas_tol;
                if (!feasible) continue;
                bool dup = false;
                for (const Vec& v : d.vertices_)
                    if ((v - *x).norm() < 1e-8 * std::max(1.0, x->norm())) {
                        dup = true;
                        break;
                    }
                if (!dup) d.vertices_.push_back(*x);
            }
    if (d.vertices_.size() < 4)
        throw InvalidInput("polytope: vertex enumeration found " +
                           std::to_string(d.vertices_.size()) +
                           " vertices; intersection is degenerate or empty");

    // Boundedness: the recession cone {u : n_i.u <= 0 for all i} must be
    // trivial. Scan directions and refine toward the worst one.
    {
        auto escape = [&](const Vec& u) {
            double mx = -1e300;
            for (const Vec& nn : d.normals_) mx = std::max(mx, nn.dot(u));
            return mx;  // <= 0: u is a recession direction
        };
        double best = 1e300;
        Vec best_u{1, 0, 0};
        for (long i = 0; i < 4096; ++i) {
            Vec u = fibonacci_direction(i, 4096);
            double e = escape(u);
            if (e < best) {
                best = e;
                best_u = u;
            }
        }
        // local pattern refinement
        double step = 0.1;
        while (step > 1e-7) {
            bool improved = false;
            for (int ax = 0; ax < 3; ++ax)
                for (int sgn = -1; sgn <= 1; sgn += 2) {
                    Vec u = best_u;
                    u[ax] += sgn * step;
                    u = u.normalized();
                    double e = escape(u);
                    if (e < best) {
                        best = e;
                        best_u = u;
                        improved = true;
                    }
                }
            if (!improved) step *= 0.5;
        }
        if (best <= 1e-9) throw InvalidInput("polytope: unbounded (recession direction found)");
    }

    // Nonempty interior: the vertex centroid must have strictly positive slack.
    {
        Vec c = Vec::zero(3);
        for (const Vec& v : d.vertices_) c = c + v;
        c = c * (1.0 / static_cast<double>(d.vertices_.size()));
        double slack = 1e300;
        for (size_t q = 0; q < m; ++q)
            slack = std::min(slack, d.offsets_[q] - d.normals_[q].dot(c));
        if (slack <= 1e-10 * scale)
            throw InvalidInput("polytope: empty interior (vertex centroid has no slack)");
    }

    d.bbox_lo_ = d.bbox_hi_ = d.vertices_[0];
    for (const Vec& v : d.vertices_)
        for (int i = 0; i < 3; ++i) {
            d.bbox_lo_[i] = std::min(d.bbox_lo_[i], v[i]);
            d.bbox_hi_[i] = std::max(d.bbox_hi_[i], v[i]);
        }

    // Slab diameter: coarse direction scan + pattern refinement, done once.
    {
        long coarse = 4096;
        double best = 1e300;
        Vec best_u{0, 0, 1};
        for (long i = 0; i < coarse; ++i) {
            Vec u = fibonacci_direction(i, coarse);
            double w = width(d, u);
            if (w < best) {
                best = w;
                best_u = u;
            }
        }
        double step = 0.05;
        while (step > 1e-9) {
            bool improved = false;
            for (int ax = 0; ax < 3; ++ax)
                for (int sgn = -1; sgn <= 1; sgn += 2) {
                    Vec u = best_u;
                    u[ax] += sgn * step;
                    u = u.normalized();
                    double w = width(d, u);
                    if (w < best * (1.0 - 1e-14)) {
                        best = w;
                        best_u = u;
                        improved = true;
                    }
                }
            if (!improved) step *= 0.5;
        }
        d.slab_cache_ = best;
    }
    return d;
}

double Domain::support(const Vec& u) const {
    switch (kind_) {
        case DomainKind::Ball: return center_.dot(u) + radius_ * u.norm();
        case DomainKind::Box: {
            double s = 0;
            for (int i = 0; i < n_; ++i) s += u[i] > 0 ? u[i] * hi_[i] : u[i] * lo_[i];
            return s;
        }
        case DomainKind::Polytope: {
            double s = -1e300;
            for (const Vec& v : vertices_) s = std::max(s, u.dot(v));
            return s;
        }
    }
    return 0;
}

double width(const Domain& d, const Vec& u) {
    Vec mu = u * -1.0;
    return d.support(u) + d.support(mu);
}

double min_width_scan(const Domain& d, long count) {
    double best = 1e300;
    for (long i = 0; i < count; ++i) best = std::min(best, width(d, fibonacci_direction(i, count)));
    return best;
}

double Domain::slab_diameter() const {
    switch (kind_) {
        case DomainKind::Ball: return 2.0 * radius_;
        case DomainKind::Box: {
            double m = 1e300;
            for (int i = 0; i < n_; ++i) m = std::min(m, hi_[i] - lo_[i]);
            return m;
        }
        case DomainKind::Polytope: return slab_cache_;
    }
    return 0;
}

double Domain::diameter() const {
    switch (kind_) {
        case DomainKind::Ball: return 2.0 * radius_;
        case DomainKind::Box: return (hi_ - lo_).norm();
        case DomainKind::Polytope: {
            double best = 0;
            for (size_t i = 0; i < vertices_.size(); ++i)
                for (size_t j = i + 1; j < vertices_.size(); ++j)
                    best = std::max(best, (vertices_[i] - vertices_[j]).norm());
            return best;
        }
    }
    return 0;
}

VolumeEstimate Domain::volume_estimate(std::uint64_t seed) const {
    VolumeEstimate est;
    est.seed = seed;
    switch (kind_) {
        case DomainKind::Ball:
            est.value = unit_ball_volume(n_) * std::pow(radius_, n_);
            return est;
        case DomainKind::Box: {
            double v = 1;
            for (int i = 0; i < n_; ++i) v *= hi_[i] - lo_[i];
            est.value = v;
            return est;
        }
        case DomainKind::Polytope: break;
    }

    // Rejection sampling in the bounding box until the standard error is
    // at most 0.5% of the estimate (>= 1e6 samples, deterministic seed).
    double box_vol = 1;
    for (int i = 0; i < 3; ++i) box_vol *= bbox_hi_[i] - bbox_lo_[i];
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    long hits = 0, total = 0;
    const long batch = 1000000;
    const long max_samples = 64 * batch;
    for (;;) {
        for (long i = 0; i < batch; ++i) {
            Vec p = Vec::zero(3);
            for (int a = 0; a < 3; ++a)
                p[a] = bbox_lo_[a] + unif(rng) * (bbox_hi_[a] - bbox_lo_[a]);
            bool inside = true;
            for (size_t q = 0; q < normals_.size() && inside; ++q)
                inside = normals_[q].dot(p) <= offsets_[q];
            hits += inside;
        }
        total += batch;
        double p = static_cast<double>(hits) / total;
        est.value = box_vol * p;
        est.std_error = box_vol * std::sqrt(std::max(p * (1 - p), 0.0) / total);
        est.samples = total;
        if (est.std_error <= 0.005 * est.value) return est;
        if (total >= max_samples)
            throw SolverFailure("polytope volume: standard error " + fmt_g17(est.std_error) +
                                " still above 0.5% of estimate " + fmt_g17(est.value) + " after " +
                                std::to_string(total) + " samples");
    }
}

double Domain::signed_distance(const Vec& p) const {
    switch (kind_) {
        case DomainKind::Ball: return (p - center_).norm() - radius_;
        case DomainKind::Box: {
            double inside = -1e300, out2 = 0;
            for (int i = 0; i < n_; ++i) {
                double q = std::max(lo_[i] - p[i], p[i] - hi_[i]);
                inside = std::max(inside, q);
                if (q > 0) out2 += q * q;
            }
            return out2 > 0 ? std::sqrt(out2) : inside;
        }
        case DomainKind::Polytope: {
            double s = -1e300;
            for (size_t q = 0; q < normals_.size(); ++q)
                s = std::max(s, normals_[q].dot(p) - offsets_[q]);
            return s;
        }
    }
    return 0;
}

Domain Domain::scaled(double s) const {
    if (!(s > 0)) throw InvalidInput("scale: factor must be > 0");
    if (!(signed_distance(Vec::zero(n_)) < 0))
        throw InvalidInput("scale: the origin must lie in the interior of the domain");
    switch (kind_) {
        case DomainKind::Ball: return ball(center_ * s, radius_ * s);
        case DomainKind::Box: return box(lo_ * s, hi_ * s);
        case DomainKind::Polytope: {
            std::vector<double> b = offsets_;
            for (double& x : b) x *= s;
            return polytope(normals_, std::move(b));
        }
    }
    throw InvalidInput("scale: unknown kind");
}

GeometrySummary Domain::summary(std::uint64_t volume_seed) const {
    GeometrySummary g;
    g.n = n_;
    g.volume_estimate = volume_estimate(volume_seed);
    g.volume = g.volume_estimate.value;
    g.A = n_ == 3 ? std::cbrt(g.volume) : 0.0;
    g.slab_diameter = slab_diameter();
    g.diameter = diameter();
    return g;
}

}  // namespace yamabe::geom
