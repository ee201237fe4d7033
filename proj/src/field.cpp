#include "field.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"

namespace yamabe::fd {

std::vector<double> apply_laplacian(const ScalarField& u) {
    const Grid& g = u.grid();
    const int n = g.dim();
    const double inv_h2 = 1.0 / (g.mesh_size() * g.mesh_size());
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        double acc = 0;
        for (int a = 0; a < n; ++a)
            for (int s = 0; s < 2; ++s)
                acc += (u.leg_value(i, a, s) - u[i]) / g.theta(i, a, s);
        out[i] = acc * inv_h2;
    }
    return out;
}

VectorField gradient(const ScalarField& u) {
    const Grid& g = u.grid();
    const int n = g.dim();
    const double h = g.mesh_size();
    VectorField v{u.grid_ptr(), std::vector<double>(g.size() * n, 0.0)};
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (int a = 0; a < n; ++a) {
            double tm = g.theta(i, a, 0), tp = g.theta(i, a, 1);
            double hm = tm * h, hp = tp * h;
            double um = u.leg_value(i, a, 0), up = u.leg_value(i, a, 1);
            double d;
            if (std::min(tm, tp) < 1e-6) {
                // an almost-zero arm makes the 3-point weights ~1/theta;
                // the secant through the leg endpoints stays conditioned
                d = (up - um) / (hm + hp);
            } else {
                // 3-point non-uniform first derivative, exact for quadratics
                d = -hp / (hm * (hm + hp)) * um + (hp - hm) / (hm * hp) * u[i] +
                    hm / (hp * (hm + hp)) * up;
            }
            v.comp[static_cast<std::size_t>(a) * g.size() + i] = d;
        }
    }
    return v;
}

double sup_norm(const ScalarField& u) {
    double m = 0;
    for (double x : u.values()) m = std::max(m, std::abs(x));
    return m;
}

double sup_norm(const VectorField& v) {
    const std::size_t count = v.grid->size();
    const int n = v.grid->dim();
    double m = 0;
    for (std::size_t i = 0; i < count; ++i) {
        double s = 0;
        for (int a = 0; a < n; ++a) {
            double c = v.comp[static_cast<std::size_t>(a) * count + i];
            s += c * c;
        }
        m = std::max(m, s);
    }
    return std::sqrt(m);
}

double l2_norm(const ScalarField& u) {
    double s = 0;
    for (double x : u.values()) s += x * x;
    return std::sqrt(s * std::pow(u.grid().mesh_size(), u.grid().dim()));
}

double l2_norm(const VectorField& v) {
    double s = 0;
    for (double x : v.comp) s += x * x;
    return std::sqrt(s * std::pow(v.grid->mesh_size(), v.grid->dim()));
}

double h10_seminorm(const ScalarField& u) { return l2_norm(gradient(u)); }

double laplacian_residual(const ScalarField& u, const std::vector<double>& source) {
    if (source.size() != u.size()) throw InvalidInput("laplacian_residual: grid mismatch");
    std::vector<double> lap = apply_laplacian(u);
    double m = 0;
    for (std::size_t i = 0; i < lap.size(); ++i) m = std::max(m, std::abs(lap[i] - source[i]));
    return m;
}

ScalarField solve_dirichlet(std::shared_ptr<const Grid> grid, const std::vector<double>& source,
                            const Boundary& boundary, SolveStats* stats) {
    const Grid& g = *grid;
    if (source.size() != g.size()) throw InvalidInput("solve_dirichlet: source/grid mismatch");
    const std::size_t count = g.size();
    const int n = g.dim();
    const double inv_h2 = 1.0 / (g.mesh_size() * g.mesh_size());

    // A = -L (SPD M-matrix), b = boundary contributions - source
    std::vector<double> diag(count, 0.0), b(count, 0.0);
    double source_inf = 0;
    for (std::size_t i = 0; i < count; ++i) {
        double d = 0;
        for (int a = 0; a < n; ++a)
            for (int s = 0; s < 2; ++s) {
                double w = inv_h2 / g.theta(i, a, s);
                d += w;
                if (g.neighbor(i, a, s) < 0) b[i] += w * boundary(g.boundary_point(i, a, s));
            }
        diag[i] = d;
        b[i] -= source[i];
        source_inf = std::max(source_inf, std::abs(source[i]));
    }

    auto apply_A = [&](const std::vector<double>& x, std::vector<double>& y) {
        for (std::size_t i = 0; i < count; ++i) {
            double acc = diag[i] * x[i];
            for (int a = 0; a < n; ++a)
                for (int s = 0; s < 2; ++s) {
                    std::int32_t j = g.neighbor(i, a, s);
                    if (j >= 0) acc -= inv_h2 * x[static_cast<std::size_t>(j)];
                }
            y[i] = acc;
        }
    };

    double b2 = 0, binf = 0;
    for (double x : b) {
        b2 += x * x;
        binf = std::max(binf, std::abs(x));
    }
    b2 = std::sqrt(b2);

    std::vector<double> x(count, 0.0);
    const double rel_target = 1e-10 * std::max(b2, 1e-300);
    const double inf_target = 5e-9 * source_inf + 1e-9 * binf + 1e-13;

    std::vector<double> r = b, z(count), p(count), Ap(count);
    auto norms = [&](const std::vector<double>& v, double& two, double& inf) {
        two = 0;
        inf = 0;
        for (double t : v) {
            two += t * t;
            inf = std::max(inf, std::abs(t));
        }
        two = std::sqrt(two);
    };

    double r2, rinf;
    norms(r, r2, rinf);
    for (std::size_t i = 0; i < count; ++i) z[i] = r[i] / diag[i];
    p = z;
    double rz = 0;
    for (std::size_t i = 0; i < count; ++i) rz += r[i] * z[i];

    const long max_iter = 20 * static_cast<long>(count) + 50;
    long it = 0;
    while (!(r2 <= rel_target && rinf <= inf_target)) {
        if (it >= max_iter)
            throw SolverFailure("solve_dirichlet: CG did not converge in " +
                                std::to_string(max_iter) + " iterations; |r|_2/|b|_2 = " +
                                fmt_g17(r2 / std::max(b2, 1e-300)));
        apply_A(p, Ap);
        double pAp = 0;
        for (std::size_t i = 0; i < count; ++i) pAp += p[i] * Ap[i];
        if (pAp <= 0) throw SolverFailure("solve_dirichlet: lost positive definiteness");
        double alpha = rz / pAp;
        for (std::size_t i = 0; i < count; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        if (++it % 64 == 0) {  // guard against residual drift
            apply_A(x, Ap);
            for (std::size_t i = 0; i < count; ++i) r[i] = b[i] - Ap[i];
        }
        norms(r, r2, rinf);
        for (std::size_t i = 0; i < count; ++i) z[i] = r[i] / diag[i];
        double rz_next = 0;
        for (std::size_t i = 0; i < count; ++i) rz_next += r[i] * z[i];
        double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < count; ++i) p[i] = z[i] + beta * p[i];
    }

    if (stats) {
        stats->iterations = it;
        stats->rel_residual = r2 / std::max(b2, 1e-300);
        stats->sup_residual = rinf;
    }
    return ScalarField(std::move(grid), std::move(x), boundary);
}

void write_csv(const ScalarField& u, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SolverFailure("cannot open " + path + " for writing");
    const Grid& g = u.grid();
    const int n = g.dim();
    if (n == 3)
        out << "x,y,z,value\n";
    else {
        for (int a = 0; a < n; ++a) out << "x" << a + 1 << ",";
        out << "value\n";
    }
    for (std::size_t i = 0; i < u.size(); ++i) {
        Vec p = g.position(i);
        for (int a = 0; a < n; ++a) out << fmt_g17(p[a]) << ",";
        out << fmt_g17(u[i]) << "\n";
    }
}

void write_binary(const ScalarField& u, const std::string& path) {
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw SolverFailure("cannot open " + path + " for writing");
        out.write(reinterpret_cast<const char*>(u.values().data()),
                  static_cast<std::streamsize>(u.size() * sizeof(double)));
    }
    nlohmann::ordered_json meta;
    const Grid& g = u.grid();
    meta["mesh_size"] = g.mesh_size();
    meta["dimension"] = g.dim();
    meta["count"] = u.size();
    auto vec_to_json = [&](const Vec& v) {
        std::vector<double> xs(v.a.begin(), v.a.begin() + v.n);
        return xs;
    };
    meta["bbox_lo"] = vec_to_json(g.domain().bbox_lo());
    meta["bbox_hi"] = vec_to_json(g.domain().bbox_hi());
    meta["grid_origin"] = vec_to_json(g.origin());
    meta["node_index_order"] = "lexicographic by lattice coordinate";
    meta["dtype"] = "float64";
    meta["byte_order"] = "little_endian";
    std::ofstream side(path + ".json");
    side << meta.dump(2) << "\n";
}

}  // namespace yamabe::fd
