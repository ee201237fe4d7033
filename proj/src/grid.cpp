#include "grid.hpp"

#include <cmath>

namespace yamabe::fd {

namespace {
constexpr double kThetaFloor = 1e-9;
}

std::uint64_t Grid::pack(const std::array<std::int32_t, kMaxDim>& m) const {
    const int bits = 64 / n_;
    std::uint64_t key = 0;
    for (int a = 0; a < n_; ++a) key = (key << bits) | static_cast<std::uint64_t>(m[a]);
    return key;
}

std::optional<std::size_t> Grid::node_at(const std::array<std::int32_t, kMaxDim>& m) const {
    for (int a = 0; a < n_; ++a)
        if (m[a] < 0 || m[a] >= extent_[a]) return std::nullopt;
    auto it = index_.find(pack(m));
    if (it == index_.end()) return std::nullopt;
    return static_cast<std::size_t>(it->second);
}

Grid::Grid(std::shared_ptr<const Domain> domain, double mesh_size)
    : domain_(std::move(domain)), n_(domain_->dim()), h_(mesh_size) {
    if (!(h_ > 0)) throw InvalidInput("grid: mesh_size must be > 0");
    const double slab = domain_->slab_diameter();
    if (h_ > 0.5 * slab + 1e-15)
        throw InvalidInput("grid: mesh_size " + fmt_g17(h_) +
                           " too coarse for slab diameter " + fmt_g17(slab) +
                           "; need mesh_size <= " + fmt_g17(0.5 * slab));

    const Vec lo = domain_->bbox_lo(), hi = domain_->bbox_hi();
    origin_ = lo;
    const int bits = 64 / n_;
    for (int a = 0; a < n_; ++a) {
        origin_[a] -= h_;  // pad the bounding box by one cell
        double span = hi[a] - lo[a];
        long ext = static_cast<long>(std::ceil(span / h_)) + 3;
        if (ext >= (1L << bits))
            throw InvalidInput("grid: lattice extent " + std::to_string(ext) +
                               " exceeds addressable range for dimension " + std::to_string(n_));
        extent_[a] = static_cast<std::int32_t>(ext);
    }

    // first pass: classify interior lattice points (lexicographic order).
    // Points within 1e-12 h of the boundary are treated as boundary points;
    // keeping them interior would create arbitrarily short arms whose
    // stencil weights amplify roundoff.
    const double snap = 1e-12 * h_;
    std::array<std::int32_t, kMaxDim> m{};
    for (;;) {
        Vec p = origin_;
        for (int a = 0; a < n_; ++a) p[a] += m[a] * h_;
        if (domain_->signed_distance(p) < -snap) {
            std::int32_t idx = static_cast<std::int32_t>(size());
            index_.emplace(pack(m), idx);
            for (int a = 0; a < n_; ++a) {
                positions_.push_back(p[a]);
                coords_.push_back(m[a]);
            }
        }
        int a = n_ - 1;
        while (a >= 0 && ++m[a] == extent_[a]) m[a--] = 0;
        if (a < 0) break;
    }
    if (size() == 0)
        throw InvalidInput("grid: no interior nodes at mesh_size " + fmt_g17(h_));

    // second pass: stencil legs and boundary arms
    const std::size_t count = size();
    nb_.assign(count * n_ * 2, -1);
    theta_.assign(count * n_ * 2, 1.0);
    for (std::size_t i = 0; i < count; ++i) {
        Vec p = position(i);
        std::array<std::int32_t, kMaxDim> mi{};
        for (int a = 0; a < n_; ++a) mi[a] = coords_[i * n_ + a];
        for (int a = 0; a < n_; ++a)
            for (int side = 0; side < 2; ++side) {
                const double dir = side == 1 ? 1.0 : -1.0;
                auto mm = mi;
                mm[a] += side == 1 ? 1 : -1;
                if (auto j = node_at(mm)) {
                    nb_[(i * n_ + a) * 2 + side] = static_cast<std::int32_t>(*j);
                    continue;
                }
                // leg crosses the boundary: bisect the signed distance on (0, h]
                double lo_t = 0.0, hi_t = 1.0;
                Vec q = p;
                for (int it = 0; it < 60; ++it) {
                    double mid = 0.5 * (lo_t + hi_t);
                    q[a] = p[a] + dir * mid * h_;
                    (domain_->signed_distance(q) < 0.0 ? lo_t : hi_t) = mid;
                }
                theta_[(i * n_ + a) * 2 + side] =
                    std::max(kThetaFloor, 0.5 * (lo_t + hi_t));
            }
    }
}

std::shared_ptr<const Grid> build_grid(std::shared_ptr<const Domain> domain, double mesh_size) {
    return std::make_shared<const Grid>(std::move(domain), mesh_size);
}

}  // namespace yamabe::fd
