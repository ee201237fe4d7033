#pragma once

#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "common.hpp"
#include "geometry.hpp"

namespace yamabe::fd {

using geom::Domain;

/// Uniform Cartesian discretization of a Domain with embedded boundary.
/// Interior nodes are lattice points with signed_distance < 0; each of the
/// 2n stencil legs of an interior node either reaches another interior node
/// (theta = 1) or crosses the boundary at fractional arm length
/// theta in (0, 1], located by bisection on the signed distance.
///
/// Nodes are stored in lexicographic order of their lattice coordinates.
/// Grids are immutable and safely shared between concurrent solves.
class Grid {
  public:
    Grid(std::shared_ptr<const Domain> domain, double mesh_size);

    const Domain& domain() const { return *domain_; }
    std::shared_ptr<const Domain> domain_ptr() const { return domain_; }
    int dim() const { return n_; }
    double mesh_size() const { return h_; }
    std::size_t size() const { return positions_.size() / n_; }

    Vec position(std::size_t i) const {
        Vec p = Vec::zero(n_);
        for (int a = 0; a < n_; ++a) p[a] = positions_[i * n_ + a];
        return p;
    }

    /// Neighbor node index of leg (i, axis, side), or -1 when the leg ends
    /// on the boundary. side: 0 = negative direction, 1 = positive.
    std::int32_t neighbor(std::size_t i, int axis, int side) const {
        return nb_[(i * n_ + axis) * 2 + side];
    }
    double theta(std::size_t i, int axis, int side) const {
        return theta_[(i * n_ + axis) * 2 + side];
    }
    /// Boundary crossing point of a leg with neighbor() < 0.
    Vec boundary_point(std::size_t i, int axis, int side) const {
        Vec p = position(i);
        p[axis] += (side == 1 ? 1.0 : -1.0) * theta(i, axis, side) * h_;
        return p;
    }

    /// Lattice coordinates of node i (relative to the grid origin).
    Vec lattice_coords(std::size_t i) const {
        Vec c = Vec::zero(n_);
        for (int a = 0; a < n_; ++a) c[a] = coords_[i * n_ + a];
        return c;
    }
    Vec origin() const { return origin_; }

    /// Node index at the given lattice coordinates, if interior.
    std::optional<std::size_t> node_at(const std::array<std::int32_t, kMaxDim>& m) const;

    /// True if every leg of node i is a full interior leg.
    bool full_stencil(std::size_t i) const {
        for (int a = 0; a < n_; ++a)
            for (int s = 0; s < 2; ++s)
                if (neighbor(i, a, s) < 0) return false;
        return true;
    }

  private:
    std::shared_ptr<const Domain> domain_;
    int n_ = 3;
    double h_ = 0;
    Vec origin_;
    std::array<std::int32_t, kMaxDim> extent_{};
    std::vector<double> positions_;       // n per node
    std::vector<std::int32_t> coords_;    // n per node
    std::vector<std::int32_t> nb_;        // 2n per node
    std::vector<double> theta_;           // 2n per node
    std::unordered_map<std::uint64_t, std::int32_t> index_;

    std::uint64_t pack(const std::array<std::int32_t, kMaxDim>& m) const;
};

/// Builds the grid; rejects mesh sizes coarser than slab_diameter / 2 with
/// the required mesh size in the message. Solver pipelines additionally
/// require mesh_size <= slab_diameter / 8 (see picard.hpp).
std::shared_ptr<const Grid> build_grid(std::shared_ptr<const Domain> domain, double mesh_size);

}  // namespace yamabe::fd
