#pragma once

#include <functional>
#include <string>
#include <vector>

#include "grid.hpp"

namespace yamabe::fd {

/// Dirichlet boundary data: a constant or an analytic function evaluated
/// at boundary crossing points.
class Boundary {
  public:
    static Boundary constant(double c) {
        Boundary b;
        b.constant_ = true;
        b.value_ = c;
        return b;
    }
    static Boundary function(std::function<double(const Vec&)> f) {
        Boundary b;
        b.constant_ = false;
        b.fn_ = std::move(f);
        return b;
    }
    double operator()(const Vec& p) const { return constant_ ? value_ : fn_(p); }
    bool is_constant() const { return constant_; }
    double constant_value() const { return value_; }

  private:
    bool constant_ = true;
    double value_ = 0;
    std::function<double(const Vec&)> fn_;
};

/// Values at the interior nodes of a Grid plus boundary trace.
class ScalarField {
  public:
    /// Empty placeholder; assign a real field before use.
    ScalarField() = default;

    ScalarField(std::shared_ptr<const Grid> grid, Boundary boundary = Boundary::constant(0))
        : grid_(std::move(grid)), v_(grid_->size(), 0.0), boundary_(std::move(boundary)) {}
    ScalarField(std::shared_ptr<const Grid> grid, std::vector<double> values, Boundary boundary)
        : grid_(std::move(grid)), v_(std::move(values)), boundary_(std::move(boundary)) {
        if (v_.size() != grid_->size()) throw InvalidInput("field: value/grid size mismatch");
    }

    const Grid& grid() const { return *grid_; }
    std::shared_ptr<const Grid> grid_ptr() const { return grid_; }
    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }
    double operator[](std::size_t i) const { return v_[i]; }
    double& operator[](std::size_t i) { return v_[i]; }
    std::size_t size() const { return v_.size(); }
    const Boundary& boundary() const { return boundary_; }

    /// Value seen by the leg (i, axis, side): neighbor value or boundary data.
    double leg_value(std::size_t i, int axis, int side) const {
        std::int32_t j = grid_->neighbor(i, axis, side);
        if (j >= 0) return v_[static_cast<std::size_t>(j)];
        return boundary_(grid_->boundary_point(i, axis, side));
    }

  private:
    std::shared_ptr<const Grid> grid_;
    std::vector<double> v_;
    Boundary boundary_;
};

struct VectorField {
    std::shared_ptr<const Grid> grid;
    std::vector<double> comp;  // axis-major: comp[axis * size + node]

    double at(std::size_t node, int axis) const { return comp[axis * grid->size() + node]; }
};

/// Discrete Laplacian with boundary-arm-corrected legs:
///   (L u)_i = sum_legs (u_leg - u_i) / (theta_leg * h^2).
/// Symmetric across interior node pairs, monotone (M-matrix).
std::vector<double> apply_laplacian(const ScalarField& u);

/// Second-order gradient: centered where both neighbors are interior,
/// non-uniform 3-point formula using the boundary arm otherwise.
VectorField gradient(const ScalarField& u);

double sup_norm(const ScalarField& u);
double sup_norm(const VectorField& v);  // max over nodes of |v| (Euclidean)
double l2_norm(const ScalarField& u);   // sqrt(sum v^2 h^n)
double l2_norm(const VectorField& v);
double h10_seminorm(const ScalarField& u);  // l2_norm(gradient(u))

/// sup_i |(L u)_i - source_i|
double laplacian_residual(const ScalarField& u, const std::vector<double>& source);

struct SolveStats {
    long iterations = 0;
    double rel_residual = 0;
    double sup_residual = 0;
};

/// Solves L u = source with the given Dirichlet data by Jacobi-
/// preconditioned conjugate gradients on the (SPD) negated system, to
/// relative l2 residual 1e-10; the sup residual is additionally driven
/// below 1e-8 * sup|source|. Throws SolverFailure after 20 * size()
/// iterations.
ScalarField solve_dirichlet(std::shared_ptr<const Grid> grid, const std::vector<double>& source,
                            const Boundary& boundary, SolveStats* stats = nullptr);

void write_csv(const ScalarField& u, const std::string& path);
/// Raw little-endian float64 column dump (lexicographic node order) plus a
/// JSON sidecar <path>.json describing the grid.
void write_binary(const ScalarField& u, const std::string& path);

}  // namespace yamabe::fd
