#pragma once

#include <string>
#include <vector>

#include "geometry.hpp"
#include "majorant.hpp"

namespace yamabe::geom {

enum class Theorem { T1, T2 };

/// Certificate clauses. 1a: volume + slab conditions (n = 3 convex);
/// 1b: diameter condition (n = 3 convex); 2: ball-radius condition
/// (n >= 4 balls). T2 variants fix the curvature bound at 1/4.
enum class Clause { T1_1a, T1_1b, T1_2, T2_1a, T2_1b, T2_2 };

std::string to_string(Clause c);
std::string to_string(Theorem t);

struct BoundCheck {
    std::string name;  ///< e.g. "T1_1a.volume"
    double required = 0;
    double actual = 0;
    bool ok = false;
};

struct ClauseResult {
    Clause clause;
    bool passed = false;
    std::vector<BoundCheck> checks;
};

/// Admissibility verdict for a (domain, Lambda, gamma) triple: which clause
/// certifies convergence of the iteration, the explicit fixed-point bound,
/// and the a-priori contraction constant with K <= 1 substituted.
struct CertificateReport {
    Theorem theorem = Theorem::T1;
    bool passed = false;
    Clause clause = Clause::T1_1a;        ///< first passing clause when passed
    std::vector<ClauseResult> clauses;    ///< every clause evaluated
    std::string tightest_violation;       ///< failing check closest to passing (when !passed)
    double k_bound = 0;      ///< explicit fixed-point bound in the governing mode
    double contraction_q = 0;///< (1/(2(n-1)))(delta^2 L e^delta / 2 + sqrt(2) delta)
    bool smoothness_relaxed = false;  ///< box/polytope accepted despite corners
    int n = 3;
    double lambda_used = 0;  ///< fixed at 1/4 for the T2 family
    double gamma_used = 0;
    GeometrySummary geometry;

    /// Majorant parameters matching the governing clause (valid when passed).
    analysis::MajorantParams majorant_params() const;
};

/// Evaluates every clause applicable to the domain kind and dimension.
/// Zero denominators (e.g. 4 Lambda + gamma = 0) make the corresponding
/// bound +infinity so only the explicit caps bind. For Theorem T2 the
/// Lambda argument is ignored (fixed at 1/4). Throws InvalidInput for
/// n >= 4 non-ball domains.
CertificateReport check_admissibility(const Domain& domain, double lambda_sup, double gamma_sup,
                                      Theorem theorem,
                                      std::uint64_t volume_seed = Domain::kDefaultVolumeSeed);

}  // namespace yamabe::geom
