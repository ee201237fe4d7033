#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "common.hpp"

namespace yamabe::geom {

enum class DomainKind { Ball, Box, Polytope };

/// Monte-Carlo volume estimate for polytopes; exact closed forms report
/// std_error = 0.
struct VolumeEstimate {
    double value = 0;
    double std_error = 0;
    std::uint64_t seed = 0;
    long samples = 0;
};

struct GeometrySummary {
    int n = 3;
    double volume = 0;
    double A = 0;              ///< volume^{1/3}, defined for n = 3 only (0 otherwise)
    double slab_diameter = 0;  ///< width: least gap between enclosing parallel hyperplanes
    double diameter = 0;
    double omega3 = 4.0 * kPi / 3.0;  ///< volume of the unit ball in R^3
    VolumeEstimate volume_estimate;
};

/// A bounded convex domain in R^n: a ball (any 3 <= n <= 8), an
/// axis-aligned box, or an intersection of half-spaces n.x <= b
/// (boxes and polytopes are 3-D). Immutable after construction; all
/// queries are pure and thread-safe.
class Domain {
  public:
    static Domain ball(const Vec& center, double radius);
    static Domain box(const Vec& lo, const Vec& hi);
    /// Half-space normals must be unit vectors (tolerance 1e-12). The
    /// intersection must be bounded with nonempty interior; vertices are
    /// enumerated at construction (intended for <= 64 half-spaces).
    static Domain polytope(std::vector<Vec> normals, std::vector<double> offsets);

    DomainKind kind() const { return kind_; }
    int dim() const { return n_; }

    double volume() const { return volume_estimate(kDefaultVolumeSeed).value; }
    VolumeEstimate volume_estimate(std::uint64_t seed) const;
    double slab_diameter() const;
    double diameter() const;

    /// Support function h(u) = sup_{x in domain} u.x (u need not be unit).
    double support(const Vec& u) const;

    bool contains(const Vec& p) const { return signed_distance(p) < 0; }
    /// Negative inside. Exact for balls and boxes; for polytopes the
    /// max-of-affine form max_i(n_i.x - b_i), which is exact when the
    /// nearest face is unique and a lower bound in magnitude otherwise.
    double signed_distance(const Vec& p) const;

    /// The dilation {s.x : x in domain}. Requires the origin strictly inside.
    Domain scaled(double s) const;

    Vec bbox_lo() const { return bbox_lo_; }
    Vec bbox_hi() const { return bbox_hi_; }

    GeometrySummary summary(std::uint64_t volume_seed = kDefaultVolumeSeed) const;

    // Ball accessors (valid when kind() == Ball).
    const Vec& center() const { return center_; }
    double radius() const { return radius_; }
    // Box accessors.
    const Vec& lo() const { return lo_; }
    const Vec& hi() const { return hi_; }
    // Polytope accessors.
    const std::vector<Vec>& normals() const { return normals_; }
    const std::vector<double>& offsets() const { return offsets_; }
    const std::vector<Vec>& vertices() const { return vertices_; }

    static constexpr std::uint64_t kDefaultVolumeSeed = 20240611;

  private:
    Domain() = default;

    DomainKind kind_ = DomainKind::Ball;
    int n_ = 3;
    Vec center_;
    double radius_ = 0;
    Vec lo_, hi_;
    std::vector<Vec> normals_;
    std::vector<double> offsets_;
    std::vector<Vec> vertices_;
    Vec bbox_lo_, bbox_hi_;
    double slab_cache_ = -1;  // polytope slab diameter, computed at construction
};

/// Width of the domain in direction u: support(u) + support(-u).
double width(const Domain& d, const Vec& u);

/// Brute-force minimal width over `count` quasi-uniform sphere directions.
/// Test oracle for slab_diameter; no local refinement.
double min_width_scan(const Domain& d, long count);

}  // namespace yamabe::geom
