#include "yamabe.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "config.hpp"
#include "green.hpp"
#include "picard.hpp"
#include "runner.hpp"
#include "verify.hpp"

using namespace yamabe;

struct ym_domain {
    std::shared_ptr<const geom::Domain> d;
};
struct ym_grid {
    std::shared_ptr<const fd::Grid> g;
};
struct ym_field {
    fd::ScalarField f;
};
struct ym_certificate {
    geom::CertificateReport rep;
};
struct ym_run {
    picard::Solution sol;
    bool is_deform = false;
    double curvature = std::numeric_limits<double>::quiet_NaN();
    double pulled_residual = 0;
    std::shared_ptr<fd::ScalarField> pulled;
};

namespace {

thread_local std::string g_last_error;

ym_status set_error(ym_status s, const std::string& msg) {
    g_last_error = msg;
    return s;
}

template <typename Fn>
ym_status guarded(Fn&& fn) {
    try {
        fn();
        return YM_OK;
    } catch (const cli::ConfigParseError& e) {
        return set_error(YM_ERR_PARSE, e.what());
    } catch (const CertificateFailure& e) {
        return set_error(YM_ERR_CERTIFICATE, e.what());
    } catch (const SolverFailure& e) {
        return set_error(YM_ERR_SOLVER, e.what());
    } catch (const InvalidInput& e) {
        return set_error(YM_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return set_error(YM_ERR_INTERNAL, e.what());
    } catch (...) {
        return set_error(YM_ERR_INTERNAL, "unknown error");
    }
}

ym_status require(bool cond, const char* msg) {
    return cond ? YM_OK : set_error(YM_ERR_INVALID_ARGUMENT, msg);
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

Vec to_vec(const double* p, int n) {
    Vec v = Vec::zero(n);
    for (int i = 0; i < n; ++i) v[i] = p[i];
    return v;
}

analysis::MajorantParams to_params(const ym_majorant_params* p) {
    analysis::MajorantParams mp;
    mp.n = p->n;
    mp.lambda_sup = p->lambda_sup;
    mp.gamma_sup = p->gamma_sup;
    mp.size = p->size;
    mp.green_coeff = p->green_coeff;
    switch (p->mode) {
        case YM_SIZE_VOLUME_CBRT: mp.mode = analysis::SizeMode::Volume; break;
        case YM_SIZE_DIAMETER: mp.mode = analysis::SizeMode::Diameter; break;
        case YM_SIZE_BALL_RADIUS: mp.mode = analysis::SizeMode::BallRadius; break;
        default: throw InvalidInput("unknown size mode");
    }
    return mp;
}

picard::RunOptions to_run_options(const ym_run_options* o, const geom::Domain& dom) {
    picard::RunOptions r;
    r.mesh_size = o ? o->mesh_size : 0.0;
    if (r.mesh_size <= 0) r.mesh_size = dom.slab_diameter() / 8.0;
    r.tol = o && o->tol > 0 ? o->tol : 1e-9;
    r.max_iter = o && o->max_iter > 0 ? o->max_iter : 200;
    r.override_certificate = o && o->override_certificate;
    if (o && o->seed) r.volume_seed = o->seed;
    return r;
}

picard::GradientCoefficient to_coef(const ym_run_options* o) {
    return o && o->unit_gradient_coefficient ? picard::GradientCoefficient::Unit
                                             : picard::GradientCoefficient::Full;
}

/// Force `mode = <mode>` inside the [run] section of a config text.
std::string patch_mode(const std::string& text, const std::string& mode) {
    std::istringstream in(text);
    std::ostringstream out;
    std::string line;
    bool in_run = false, replaced = false, saw_run = false;
    while (std::getline(in, line)) {
        std::string t = line;
        size_t a = t.find_first_not_of(" \t");
        if (a != std::string::npos && t[a] == '[') {
            in_run = t.find("[run]") != std::string::npos;
            saw_run = saw_run || in_run;
        } else if (in_run && t.find_first_not_of(" \t") != std::string::npos) {
            size_t eq = t.find('=');
            if (eq != std::string::npos) {
                std::string key = t.substr(0, eq);
                key.erase(0, key.find_first_not_of(" \t"));
                key.erase(key.find_last_not_of(" \t") + 1);
                if (key == "mode") {
                    out << "mode = " << mode << "\n";
                    replaced = true;
                    continue;
                }
            }
        }
        out << line << "\n";
    }
    if (!replaced) {
        if (!saw_run) out << "[run]\n";
        out << "mode = " << mode << "\n";
    }
    return out.str();
}

}  // namespace

extern "C" {

const char* ym_version(void) { return "1.0.0"; }

const char* ym_last_error(void) { return g_last_error.c_str(); }

void ym_string_free(char* s) { std::free(s); }

/* ---------------------------------------------------------------- domains */

ym_status ym_domain_create_ball(const double* center, int n, double radius, ym_domain** out) {
    if (auto s = require(center && out, "null argument")) return s;
    return guarded([&] { *out = new ym_domain{std::make_shared<const geom::Domain>(
                             geom::Domain::ball(to_vec(center, n), radius))}; });
}

ym_status ym_domain_create_box(const double* lo, const double* hi, int n, ym_domain** out) {
    if (auto s = require(lo && hi && out, "null argument")) return s;
    return guarded([&] { *out = new ym_domain{std::make_shared<const geom::Domain>(
                             geom::Domain::box(to_vec(lo, n), to_vec(hi, n)))}; });
}

ym_status ym_domain_create_polytope(const double* normals, const double* offsets, int m,
                                    ym_domain** out) {
    if (auto s = require(normals && offsets && out && m > 0, "null or empty argument")) return s;
    return guarded([&] {
        std::vector<Vec> ns;
        std::vector<double> bs;
        for (int i = 0; i < m; ++i) {
            ns.push_back(to_vec(normals + 3 * i, 3));
            bs.push_back(offsets[i]);
        }
        *out = new ym_domain{std::make_shared<const geom::Domain>(
            geom::Domain::polytope(std::move(ns), std::move(bs)))};
    });
}

void ym_domain_free(ym_domain* d) { delete d; }

int ym_domain_dim(const ym_domain* d) { return d ? d->d->dim() : 0; }

ym_status ym_domain_volume(const ym_domain* d, unsigned long long seed, double* out) {
    if (auto s = require(d && out, "null argument")) return s;
    return guarded([&] {
        *out = d->d->volume_estimate(seed ? seed : geom::Domain::kDefaultVolumeSeed).value;
    });
}

ym_status ym_domain_slab_diameter(const ym_domain* d, double* out) {
    if (auto s = require(d && out, "null argument")) return s;
    return guarded([&] { *out = d->d->slab_diameter(); });
}

ym_status ym_domain_diameter(const ym_domain* d, double* out) {
    if (auto s = require(d && out, "null argument")) return s;
    return guarded([&] { *out = d->d->diameter(); });
}

ym_status ym_domain_signed_distance(const ym_domain* d, const double* point, double* out) {
    if (auto s = require(d && point && out, "null argument")) return s;
    return guarded([&] { *out = d->d->signed_distance(to_vec(point, d->d->dim())); });
}

ym_status ym_domain_contains(const ym_domain* d, const double* point, int* out) {
    if (auto s = require(d && point && out, "null argument")) return s;
    return guarded([&] { *out = d->d->contains(to_vec(point, d->d->dim())) ? 1 : 0; });
}

ym_status ym_domain_scale(const ym_domain* d, double factor, ym_domain** out) {
    if (auto s = require(d && out, "null argument")) return s;
    return guarded([&] {
        *out = new ym_domain{std::make_shared<const geom::Domain>(d->d->scaled(factor))};
    });
}

/* ----------------------------------------------------------- certificates */

ym_status ym_certificate_check(const ym_domain* d, double lambda_sup, double gamma_sup,
                               int theorem, ym_certificate** out) {
    if (auto s = require(d && out, "null argument")) return s;
    if (auto s = require(theorem == 1 || theorem == 2, "theorem must be 1 or 2")) return s;
    return guarded([&] {
        *out = new ym_certificate{geom::check_admissibility(
            *d->d, lambda_sup, gamma_sup,
            theorem == 1 ? geom::Theorem::T1 : geom::Theorem::T2)};
    });
}

void ym_certificate_free(ym_certificate* c) { delete c; }

int ym_certificate_passed(const ym_certificate* c) { return c && c->rep.passed ? 1 : 0; }

ym_status ym_certificate_clause(const ym_certificate* c, char** out) {
    if (auto s = require(c && out, "null argument")) return s;
    *out = dup_string(geom::to_string(c->rep.clause));
    return YM_OK;
}

double ym_certificate_k_bound(const ym_certificate* c) {
    return c ? c->rep.k_bound : std::numeric_limits<double>::quiet_NaN();
}

double ym_certificate_contraction_q(const ym_certificate* c) {
    return c ? c->rep.contraction_q : std::numeric_limits<double>::quiet_NaN();
}

ym_status ym_certificate_json(const ym_certificate* c, char** out) {
    if (auto s = require(c && out, "null argument")) return s;
    return guarded([&] {
        nlohmann::ordered_json j;
        j["theorem"] = geom::to_string(c->rep.theorem);
        j["passed"] = c->rep.passed;
        j["clause"] = geom::to_string(c->rep.clause);
        j["k_bound"] = c->rep.k_bound;
        j["contraction_q"] = c->rep.contraction_q;
        j["smoothness_relaxed"] = c->rep.smoothness_relaxed;
        nlohmann::ordered_json checks = nlohmann::ordered_json::array();
        for (const auto& cl : c->rep.clauses)
            for (const auto& b : cl.checks)
                checks.push_back({{"name", b.name},
                                  {"required", b.required},
                                  {"actual", b.actual},
                                  {"ok", b.ok}});
        j["checks"] = checks;
        *out = dup_string(j.dump(2));
    });
}

/* --------------------------------------------------------- scalar analysis */

ym_status ym_majorant(const ym_majorant_params* p, double t, double* out) {
    if (auto s = require(p && out, "null argument")) return s;
    return guarded([&] { *out = analysis::majorant(t, to_params(p)); });
}

ym_status ym_smallest_fixed_point(const ym_majorant_params* p, double* k, int* exists) {
    if (auto s = require(p && k && exists, "null argument")) return s;
    return guarded([&] {
        analysis::FixedPointResult fp = analysis::smallest_fixed_point(to_params(p));
        *exists = fp.exists ? 1 : 0;
        *k = fp.exists ? fp.K : std::numeric_limits<double>::quiet_NaN();
    });
}

ym_status ym_explicit_k_bound(const ym_majorant_params* p, double* out) {
    if (auto s = require(p && out, "null argument")) return s;
    return guarded([&] { *out = analysis::explicit_k_bound(to_params(p)); });
}

ym_status ym_contraction_constant(double delta, double lambda_sup, double k, int n,
                                  double* out) {
    if (auto s = require(out != nullptr, "null argument")) return s;
    return guarded([&] { *out = analysis::contraction_constant(delta, lambda_sup, k, n); });
}

ym_status ym_evans_bound(double volume, double* out) {
    if (auto s = require(out != nullptr, "null argument")) return s;
    return guarded([&] { *out = analysis::evans_bound(volume); });
}

ym_status ym_ball_green(int n, const double* x, const double* xp, double* out) {
    if (auto s = require(x && xp && out, "null argument")) return s;
    return guarded([&] { *out = analysis::ball_green(n, to_vec(x, n), to_vec(xp, n)); });
}

ym_status ym_ball_green_gradient(int n, const double* x, const double* xp, double* out_vec) {
    if (auto s = require(x && xp && out_vec, "null argument")) return s;
    return guarded([&] {
        Vec g = analysis::ball_green_gradient(n, to_vec(x, n), to_vec(xp, n));
        for (int i = 0; i < n; ++i) out_vec[i] = g[i];
    });
}

ym_status ym_green_gradient_integral(int n, const double* x, double rel_tol, double* out) {
    if (auto s = require(x && out, "null argument")) return s;
    return guarded([&] {
        *out = analysis::green_gradient_integral(n, to_vec(x, n), rel_tol > 0 ? rel_tol : 1e-4)
                   .value;
    });
}

ym_status ym_ball_green_constant(int n, double rel_tol, double* value, double* arg_radius) {
    if (auto s = require(value != nullptr, "null argument")) return s;
    return guarded([&] {
        analysis::GreenConstant c = analysis::ball_green_constant(n, rel_tol > 0 ? rel_tol : 1e-4);
        *value = c.value;
        if (arg_radius) *arg_radius = c.arg_radius;
    });
}

/* ------------------------------------------------------- grids and fields */

ym_status ym_grid_build(const ym_domain* d, double mesh_size, ym_grid** out) {
    if (auto s = require(d && out, "null argument")) return s;
    return guarded([&] { *out = new ym_grid{fd::build_grid(d->d, mesh_size)}; });
}

void ym_grid_free(ym_grid* g) { delete g; }

long long ym_grid_size(const ym_grid* g) {
    return g ? static_cast<long long>(g->g->size()) : 0;
}

double ym_grid_mesh_size(const ym_grid* g) { return g ? g->g->mesh_size() : 0.0; }

ym_status ym_grid_node_position(const ym_grid* g, long long node, double* out) {
    if (auto s = require(g && out, "null argument")) return s;
    if (auto s = require(node >= 0 && node < ym_grid_size(g), "node index out of range"))
        return s;
    Vec p = g->g->position(static_cast<std::size_t>(node));
    for (int i = 0; i < g->g->dim(); ++i) out[i] = p[i];
    return YM_OK;
}

ym_status ym_solve_dirichlet(const ym_grid* g, const char* source_expr,
                             const char* boundary_expr, ym_field** out) {
    if (auto s = require(g && source_expr && out, "null argument")) return s;
    return guarded([&] {
        Expression src = Expression::parse(source_expr);
        Expression bnd = Expression::parse(boundary_expr ? boundary_expr : "0");
        std::vector<double> sv(g->g->size());
        for (std::size_t i = 0; i < g->g->size(); ++i) sv[i] = src.eval(g->g->position(i));
        fd::Boundary b = fd::Boundary::function([bnd](const Vec& p) { return bnd.eval(p); });
        *out = new ym_field{fd::solve_dirichlet(g->g, sv, b)};
    });
}

void ym_field_free(ym_field* f) { delete f; }

long long ym_field_size(const ym_field* f) {
    return f ? static_cast<long long>(f->f.size()) : 0;
}

ym_status ym_field_values(const ym_field* f, double* buffer, long long capacity) {
    if (auto s = require(f && buffer, "null argument")) return s;
    if (auto s = require(capacity >= ym_field_size(f), "buffer too small")) return s;
    std::memcpy(buffer, f->f.values().data(), f->f.size() * sizeof(double));
    return YM_OK;
}

ym_status ym_field_norms(const ym_field* f, double* sup, double* l2, double* h10) {
    if (auto s = require(f != nullptr, "null argument")) return s;
    return guarded([&] {
        if (sup) *sup = fd::sup_norm(f->f);
        if (l2) *l2 = fd::l2_norm(f->f);
        if (h10) *h10 = fd::h10_seminorm(f->f);
    });
}

ym_status ym_field_write_csv(const ym_field* f, const char* path) {
    if (auto s = require(f && path, "null argument")) return s;
    return guarded([&] { fd::write_csv(f->f, path); });
}

ym_status ym_field_write_binary(const ym_field* f, const char* path) {
    if (auto s = require(f && path, "null argument")) return s;
    return guarded([&] { fd::write_binary(f->f, path); });
}

/* ------------------------------------------------------------------- runs */

ym_status ym_run_solve(const ym_domain* d, int n, const char* R, const char* S,
                       double lambda_sup, double gamma_sup, const ym_run_options* o,
                       ym_run** out) {
    if (auto s = require(d && R && S && out, "null argument")) return s;
    return guarded([&] {
        picard::ProblemSpec spec;
        spec.domain = d->d;
        spec.n = n;
        spec.R = Expression::parse(R);
        spec.S = Expression::parse(S);
        spec.lambda_sup = lambda_sup;
        spec.gamma_sup = gamma_sup;
        spec.grad_coef = to_coef(o);
        picard::Solution sol = picard::run_iteration(spec, to_run_options(o, *d->d));
        auto run = new ym_run;
        run->sol = std::move(sol);
        *out = run;
    });
}

ym_status ym_run_shifted(const ym_domain* d, int n, double c, double lambda, const char* S,
                         double gamma_sup, const ym_run_options* o, ym_run** out) {
    if (auto s = require(d && S && out, "null argument")) return s;
    return guarded([&] {
        picard::Solution sol = picard::solve_shifted(d->d, n, c, lambda, Expression::parse(S),
                                                     gamma_sup, to_run_options(o, *d->d));
        auto run = new ym_run;
        run->sol = std::move(sol);
        *out = run;
    });
}

ym_status ym_run_deform(const ym_domain* base, double d, double lambda,
                        const ym_run_options* o, ym_run** out) {
    if (auto s = require(base && out, "null argument")) return s;
    return guarded([&] {
        picard::RunOptions ro = to_run_options(o, *base->d);
        if (!o || o->mesh_size <= 0) ro.mesh_size = base->d->scaled(d).slab_diameter() / 8.0;
        picard::DeformResult dr = picard::constant_curvature_deform(base->d, d, lambda, ro);
        auto r = new ym_run;
        r->sol = std::move(dr.solution);
        r->is_deform = true;
        r->curvature = dr.curvature;
        r->pulled_residual = dr.pulled_residual;
        r->pulled = std::make_shared<fd::ScalarField>(std::move(dr.pulled_back));
        *out = r;
    });
}

void ym_run_free(ym_run* r) { delete r; }

int ym_run_converged(const ym_run* r) { return r && r->sol.converged ? 1 : 0; }

int ym_run_certified(const ym_run* r) { return r && r->sol.certified ? 1 : 0; }

long long ym_run_iterations(const ym_run* r) {
    return r ? static_cast<long long>(r->sol.trace.rows.size()) : 0;
}

double ym_run_fixed_point(const ym_run* r) {
    return r && r->sol.K_exists ? r->sol.K : std::numeric_limits<double>::quiet_NaN();
}

double ym_run_contraction(const ym_run* r) {
    return r ? r->sol.q : std::numeric_limits<double>::quiet_NaN();
}

double ym_run_final_residual(const ym_run* r) {
    return r ? r->sol.final_residual : std::numeric_limits<double>::quiet_NaN();
}

double ym_run_min_conformal_factor(const ym_run* r) {
    return r ? r->sol.min_u : std::numeric_limits<double>::quiet_NaN();
}

double ym_run_curvature(const ym_run* r) {
    return r && r->is_deform ? r->curvature : std::numeric_limits<double>::quiet_NaN();
}

ym_status ym_run_trace(const ym_run* r, ym_trace_row* rows, long long capacity,
                       long long* written) {
    if (auto s = require(r && rows && written, "null argument")) return s;
    long long count = std::min<long long>(capacity, ym_run_iterations(r));
    for (long long i = 0; i < count; ++i) {
        const picard::TraceRow& t = r->sol.trace.rows[static_cast<std::size_t>(i)];
        rows[i] = ym_trace_row{t.k, t.sup_grad, t.diff_h10, t.ratio, t.residual};
    }
    *written = count;
    return YM_OK;
}

ym_status ym_run_field(const ym_run* r, int which, ym_field** out) {
    if (auto s = require(r && out, "null argument")) return s;
    switch (which) {
        case 0: *out = new ym_field{r->sol.f}; return YM_OK;
        case 1: *out = new ym_field{r->sol.u}; return YM_OK;
        case 2:
            if (!r->pulled) return set_error(YM_ERR_INVALID_ARGUMENT, "not a deform run");
            *out = new ym_field{*r->pulled};
            return YM_OK;
    }
    return set_error(YM_ERR_INVALID_ARGUMENT, "which must be 0, 1 or 2");
}

ym_status ym_run_summary_json(const ym_run* r, char** out) {
    if (auto s = require(r && out, "null argument")) return s;
    return guarded([&] {
        nlohmann::ordered_json j;
        j["converged"] = r->sol.converged;
        j["certified"] = r->sol.certified;
        j["override_used"] = r->sol.override_used;
        j["iterations"] = r->sol.trace.rows.size();
        j["stop_reason"] = r->sol.trace.stop_reason;
        j["K"] = r->sol.K;
        j["K_exists"] = r->sol.K_exists;
        j["q"] = r->sol.q;
        j["final_residual"] = r->sol.final_residual;
        j["final_standard_residual"] = r->sol.final_standard_residual;
        j["standard_residual_paper_form"] = r->sol.standard_residual_paper_form;
        j["max_sup_grad"] = r->sol.max_sup_grad;
        j["max_ratio"] = r->sol.max_ratio;
        j["min_u"] = r->sol.min_u;
        if (r->is_deform) {
            j["curvature"] = r->curvature;
            j["pulled_residual"] = r->pulled_residual;
        }
        *out = dup_string(j.dump(2));
    });
}

/* --------------------------------------------------------------- frontend */

ym_status ym_experiment_run(const char* config_text, const ym_experiment_options* opts,
                            char** report, int* exit_code) {
    if (auto s = require(config_text && report && exit_code, "null argument")) return s;
    std::string text = config_text;
    if (opts && opts->mode) text = patch_mode(text, opts->mode);

    try {
        cli::ExperimentConfig cfg = cli::parse_config(text);
        if (opts) {
            if (opts->fast) cfg.fast = true;
            if (opts->workers > 0) cfg.workers = opts->workers;
        }
        cli::RunOverrides ov;
        if (opts && opts->output_dir) ov.output_dir = std::string(opts->output_dir);
        if (opts && opts->has_seed) ov.seed = opts->seed;
        if (opts && opts->override_certificate) ov.override_certificate = true;
        cli::ExperimentOutcome outcome = cli::run_experiment(cfg, ov);
        *report = dup_string(outcome.report);
        *exit_code = outcome.exit_code;
        return YM_OK;
    } catch (const cli::ConfigParseError& e) {
        *report = dup_string(e.what());
        *exit_code = 1;
        return YM_OK;
    } catch (const CertificateFailure& e) {
        *report = dup_string(e.what());
        *exit_code = 2;
        return YM_OK;
    } catch (const InvalidInput& e) {
        *report = dup_string(e.what());
        *exit_code = 1;
        return YM_OK;
    } catch (const std::exception& e) {
        *report = dup_string(e.what());
        *exit_code = 1;
        return set_error(YM_ERR_INTERNAL, e.what());
    }
}

ym_status ym_verify(int fast, int workers, char** report, int* all_passed) {
    if (auto s = require(report && all_passed, "null argument")) return s;
    return guarded([&] {
        verify::Options vo;
        vo.fast = fast != 0;
        vo.workers = workers > 0 ? workers : 2;
        verify::SuiteResult r = verify::run_suite(vo);
        *report = dup_string(verify::format_report(r));
        *all_passed = r.all_passed ? 1 : 0;
    });
}

} /* extern "C" */
