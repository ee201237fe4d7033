#include "certificate.hpp"

#include <cmath>

#include "green.hpp"

namespace yamabe::geom {

std::string to_string(Clause c) {
    switch (c) {
        case Clause::T1_1a: return "T1_1a";
        case Clause::T1_1b: return "T1_1b";
        case Clause::T1_2: return "T1_2";
        case Clause::T2_1a: return "T2_1a";
        case Clause::T2_1b: return "T2_1b";
        case Clause::T2_2: return "T2_2";
    }
    return "?";
}

std::string to_string(Theorem t) { return t == Theorem::T1 ? "T1" : "T2"; }

namespace {

constexpr double kInf = 1e300;

double safe_div(double num, double den) { return den > 0 ? num / den : kInf; }

BoundCheck check(std::string name, double required, double actual) {
    BoundCheck b;
    b.name = std::move(name);
    b.required = required;
    b.actual = actual;
    b.ok = actual <= required;
    return b;
}

ClauseResult clause_result(Clause c, std::vector<BoundCheck> checks) {
    ClauseResult r;
    r.clause = c;
    r.checks = std::move(checks);
    r.passed = true;
    for (const auto& b : r.checks) r.passed = r.passed && b.ok;
    return r;
}

}  // namespace

analysis::MajorantParams CertificateReport::majorant_params() const {
    analysis::MajorantParams p;
    p.n = n;
    p.lambda_sup = lambda_used;
    p.gamma_sup = gamma_used;
    switch (clause) {
        case Clause::T1_1a:
        case Clause::T2_1a:
            p.mode = analysis::SizeMode::Volume;
            p.size = geometry.A;
            p.green_coeff = analysis::convex_green_coefficient();
            break;
        case Clause::T1_1b:
        case Clause::T2_1b:
            p.mode = analysis::SizeMode::Diameter;
            p.size = geometry.diameter;
            p.green_coeff = analysis::convex_green_coefficient();
            break;
        case Clause::T1_2:
        case Clause::T2_2:
            p.mode = analysis::SizeMode::BallRadius;
            p.size = geometry.diameter / 2.0;
            p.green_coeff = analysis::ball_green_constant(n).value;
            break;
    }
    return p;
}

CertificateReport check_admissibility(const Domain& domain, double lambda_sup, double gamma_sup,
                                      Theorem theorem, std::uint64_t volume_seed) {
    if (lambda_sup < 0 || gamma_sup < 0)
        throw InvalidInput("check_admissibility: Lambda and gamma must be nonnegative");
    const int n = domain.dim();
    if (n >= 4 && domain.kind() != DomainKind::Ball)
        throw InvalidInput("check_admissibility: n >= 4 supports balls only (got a " +
                           std::string(domain.kind() == DomainKind::Box ? "box" : "polytope") +
                           " in dimension " + std::to_string(n) + ")");

    CertificateReport rep;
    rep.theorem = theorem;
    rep.n = n;
    rep.lambda_used = theorem == Theorem::T2 ? 0.25 : lambda_sup;
    rep.gamma_used = gamma_sup;
    rep.smoothness_relaxed = domain.kind() != DomainKind::Ball;
    rep.geometry = domain.summary(volume_seed);

    const double C = analysis::convex_green_coefficient();
    const double L = rep.lambda_used, g = rep.gamma_used;
    const GeometrySummary& geo = rep.geometry;
    const bool t2 = theorem == Theorem::T2;

    if (n == 3) {
        // volume + slab clause
        double vol_bound = t2 ? std::pow(safe_div(8.0, C * (1.0 + g)), 3)
                              : std::min(1.0, std::pow(safe_div(8.0, C * (4.0 * L + g)), 3));
        double slab_bound = t2 ? std::min(1.0, 1.25 * geo.A)
                               : std::min({1.0, 1.25 * geo.A, 2.0 / (0.75 * L + 1.0)});
        Clause ca = t2 ? Clause::T2_1a : Clause::T1_1a;
        rep.clauses.push_back(clause_result(
            ca, {check(to_string(ca) + ".volume", vol_bound, geo.volume),
                 check(to_string(ca) + ".slab", slab_bound, geo.slab_diameter)}));

        // diameter clause
        double diam_bound =
            t2 ? std::min(1.0, safe_div(4.0, C * (0.625 + g)))
               : std::min({1.0, safe_div(4.0, C * (2.5 * L + g)),
                           4.0 / (1.5 * L + std::sqrt(2.0))});
        Clause cb = t2 ? Clause::T2_1b : Clause::T1_1b;
        rep.clauses.push_back(
            clause_result(cb, {check(to_string(cb) + ".diam", diam_bound, geo.diameter)}));
    } else {
        const double Cn = analysis::ball_green_constant(n).value;
        double radius = domain.radius();
        double r_bound =
            t2 ? std::min(0.5, safe_div(n - 1.0, Cn * (0.625 + g)))
               : std::min({0.5, safe_div(n - 1.0, Cn * (2.5 * L + g)),
                           (n - 1.0) / (1.5 * L + std::sqrt(2.0))});
        Clause cc = t2 ? Clause::T2_2 : Clause::T1_2;
        rep.clauses.push_back(
            clause_result(cc, {check(to_string(cc) + ".radius", r_bound, radius)}));
    }

    rep.passed = false;
    for (const auto& cr : rep.clauses)
        if (cr.passed) {
            rep.passed = true;
            rep.clause = cr.clause;
            break;
        }

    if (!rep.passed) {
        // name the violated bound closest to passing
        double best_ratio = kInf;
        for (const auto& cr : rep.clauses)
            for (const auto& b : cr.checks)
                if (!b.ok && b.required > 0 && b.actual / b.required < best_ratio) {
                    best_ratio = b.actual / b.required;
                    rep.tightest_violation = b.name;
                }
        // fall back to the volume mode for the reported scalar data
        rep.clause = n == 3 ? (t2 ? Clause::T2_1a : Clause::T1_1a)
                            : (t2 ? Clause::T2_2 : Clause::T1_2);
    }

    analysis::MajorantParams mp = rep.majorant_params();
    rep.k_bound = mp.size > 0 ? analysis::explicit_k_bound(mp) : 0.0;
    rep.contraction_q =
        analysis::contraction_constant(geo.slab_diameter, L, 1.0, n);  // worst case K <= 1
    return rep;
}

}  // namespace yamabe::geom
