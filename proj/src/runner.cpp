#include "runner.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "green.hpp"
#include "verify.hpp"

namespace yamabe::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using picard::Solution;

namespace {

ordered_json certificate_json(const geom::CertificateReport& c) {
    ordered_json j;
    j["theorem"] = geom::to_string(c.theorem);
    j["passed"] = c.passed;
    j["clause"] = geom::to_string(c.clause);
    ordered_json clauses = ordered_json::array();
    for (const auto& cr : c.clauses) {
        ordered_json cj;
        cj["clause"] = geom::to_string(cr.clause);
        cj["passed"] = cr.passed;
        ordered_json checks = ordered_json::array();
        for (const auto& b : cr.checks) {
            ordered_json bj;
            bj["name"] = b.name;
            bj["required"] = b.required;
            bj["actual"] = b.actual;
            bj["ok"] = b.ok;
            checks.push_back(bj);
        }
        cj["checks"] = checks;
        clauses.push_back(cj);
    }
    j["clauses"] = clauses;
    if (!c.passed) j["tightest_violation"] = c.tightest_violation;
    j["k_bound"] = c.k_bound;
    j["contraction_q"] = c.contraction_q;
    j["smoothness_relaxed"] = c.smoothness_relaxed;
    j["n"] = c.n;
    j["lambda_used"] = c.lambda_used;
    j["gamma_used"] = c.gamma_used;
    j["geometry"] = {{"volume", c.geometry.volume},
                     {"A", c.geometry.A},
                     {"slab_diameter", c.geometry.slab_diameter},
                     {"diameter", c.geometry.diameter},
                     {"omega3", c.geometry.omega3},
                     {"volume_std_error", c.geometry.volume_estimate.std_error},
                     {"volume_seed", c.geometry.volume_estimate.seed},
                     {"volume_samples", c.geometry.volume_estimate.samples}};
    return j;
}

void write_trace_csv(const picard::IterationTrace& t, const std::string& path) {
    std::ofstream out(path);
    out << "k,sup_grad,diff_h10,ratio,residual\n";
    for (const auto& r : t.rows) {
        out << r.k << "," << fmt_g17(r.sup_grad) << "," << fmt_g17(r.diff_h10) << ",";
        if (!std::isnan(r.ratio)) out << fmt_g17(r.ratio);
        out << "," << fmt_g17(r.residual) << "\n";
    }
}

ordered_json solution_summary(const Solution& s, const ExperimentConfig& cfg,
                              bool bounds_estimated, double lambda_sup, double gamma_sup) {
    ordered_json j;
    j["mode"] = to_string(cfg.mode);
    j["config_echo"] = cfg.canonical_text();
    j["n"] = cfg.n;
    j["lambda_sup"] = lambda_sup;
    j["gamma_sup"] = gamma_sup;
    j["bounds_estimated"] = bounds_estimated;
    j["certificate"] = certificate_json(s.certificate);
    j["K"] = s.K;
    j["K_exists"] = s.K_exists;
    j["q"] = s.q;
    j["iterations"] = s.trace.rows.size();
    j["stop_reason"] = s.trace.stop_reason;
    j["converged"] = s.converged;
    j["certified"] = s.certified;
    j["override_used"] = s.override_used;
    j["final_residual"] = s.final_residual;
    j["final_standard_residual"] = s.final_standard_residual;
    j["standard_residual_paper_form"] = s.standard_residual_paper_form;
    j["max_sup_grad"] = s.max_sup_grad;
    j["max_ratio"] = s.max_ratio;
    j["max_poincare_ratio"] = s.max_poincare_ratio;
    j["min_u"] = s.min_u;
    j["gradient_bound_ok"] = s.gradient_bound_ok;
    j["contraction_bound_ok"] = s.contraction_bound_ok;
    j["poincare_ok"] = s.poincare_ok;
    j["mesh_size"] = cfg.mesh_size;
    j["tol"] = cfg.tol;
    j["max_iter"] = cfg.max_iter;
    j["seed"] = cfg.seed;
    return j;
}

void write_json(const ordered_json& j, const std::string& path) {
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

void write_solution_artifacts(const Solution& s, ordered_json summary, const std::string& dir) {
    if (dir.empty()) return;
    fs::create_directories(dir);
    write_trace_csv(s.trace, dir + "/trace.csv");
    fd::write_csv(s.f, dir + "/solution_f.csv");
    fd::write_csv(s.u, dir + "/solution_u.csv");
    write_json(certificate_json(s.certificate), dir + "/certificate.json");
    summary["wall_time_seconds"] = s.wall_seconds;  // excluded from determinism checks
    write_json(summary, dir + "/summary.json");
}

std::string brief(const Solution& s) {
    std::ostringstream out;
    out << (s.converged ? "converged" : "NOT converged") << " in " << s.trace.rows.size()
        << " steps; residual " << fmt_g17(s.final_residual) << "; K "
        << (s.K_exists ? fmt_g17(s.K) : std::string("n/a")) << "; q " << fmt_g17(s.q)
        << "; max ratio " << fmt_g17(s.max_ratio) << "; min u " << fmt_g17(s.min_u)
        << (s.certified ? "" : " [uncertified]");
    return out.str();
}

struct PreparedProblem {
    picard::ProblemSpec spec;
    bool bounds_estimated = false;
};

PreparedProblem prepare_problem(const ExperimentConfig& cfg) {
    PreparedProblem p;
    p.spec.domain = cfg.make_domain();
    p.spec.n = cfg.n;
    p.spec.R = Expression::parse(cfg.R_text);
    p.spec.S = Expression::parse(cfg.S_text);
    p.spec.boundary_c = cfg.boundary_c;
    p.spec.grad_coef = cfg.grad_coef;
    if (cfg.lambda_sup)
        p.spec.lambda_sup = *cfg.lambda_sup;
    else {
        p.spec.lambda_sup = estimate_sup_bound(*p.spec.domain, p.spec.R);
        p.bounds_estimated = true;
    }
    if (cfg.gamma_sup)
        p.spec.gamma_sup = *cfg.gamma_sup;
    else {
        p.spec.gamma_sup = estimate_sup_bound(*p.spec.domain, p.spec.S);
        p.bounds_estimated = true;
    }
    p.spec.bounds_estimated = p.bounds_estimated;
    return p;
}

picard::RunOptions run_options(const ExperimentConfig& cfg, bool override_cert) {
    picard::RunOptions o;
    o.mesh_size = cfg.mesh_size;
    o.tol = cfg.tol;
    o.max_iter = cfg.max_iter;
    o.override_certificate = override_cert;
    o.volume_seed = cfg.seed != 0 ? cfg.seed : geom::Domain::kDefaultVolumeSeed;
    return o;
}

int worker_count(const ExperimentConfig& cfg, const RunOverrides& ov) {
    if (ov.workers && *ov.workers > 0) return *ov.workers;
    if (cfg.workers > 0) return cfg.workers;
    if (const char* env = std::getenv("YAMABE_WORKERS"))
        if (int w = std::atoi(env); w > 0) return w;
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 2;
}

ExperimentOutcome run_sweep(const ExperimentConfig& cfg, const RunOverrides& ov,
                            const std::string& outdir) {
    std::vector<double> lambdas = cfg.sweep_lambda.present
                                      ? cfg.sweep_lambda.values()
                                      : std::vector<double>{cfg.lambda.value_or(0.0)};
    std::vector<double> ds =
        cfg.sweep_d.present
            ? cfg.sweep_d.values()
            : (cfg.d > 0 ? std::vector<double>{cfg.d} : std::vector<double>{});
    const bool deform_rows = !ds.empty();

    struct Row {
        double lambda = 0, d = 0;
        bool cert_passed = false, converged = false, ran = false;
        long iterations = 0;
        double residual = 0, K = 0, q = 0, max_ratio = 0;
        std::string error;
    };
    std::vector<Row> rows;
    for (double dv : (deform_rows ? ds : std::vector<double>{0.0}))
        for (double lv : lambdas) {
            Row r;
            r.lambda = lv;
            r.d = dv;
            rows.push_back(r);
        }

    auto base_domain = cfg.make_domain();
    auto run_row = [&](Row& r, const std::string& row_dir) {
        // rows always execute (uncertified rows are labeled, not skipped)
        picard::RunOptions o = run_options(cfg, true);
        Solution sol = [&] {
            if (deform_rows) {
                // keep at least 8 cells across the scaled domain for every row
                double slab_d = base_domain->slab_diameter() * r.d;
                o.mesh_size = std::min(o.mesh_size, slab_d / 8.0);
                picard::DeformResult dr =
                    picard::constant_curvature_deform(base_domain, r.d, r.lambda, o);
                return std::move(dr.solution);
            }
            picard::ProblemSpec spec;
            spec.domain = base_domain;
            spec.n = cfg.n;
            spec.R = Expression::parse(fmt_g17(r.lambda));
            spec.S = Expression::parse(cfg.S_text);
            spec.lambda_sup = std::abs(r.lambda);
            spec.gamma_sup = estimate_sup_bound(*base_domain, spec.S);
            spec.grad_coef = cfg.grad_coef;
            return picard::run_iteration(spec, o);
        }();
        r.ran = true;
        r.cert_passed = sol.certified;
        r.converged = sol.converged;
        r.iterations = static_cast<long>(sol.trace.rows.size());
        r.residual = sol.final_residual;
        r.K = sol.K_exists ? sol.K : std::nan("");
        r.q = sol.q;
        r.max_ratio = sol.max_ratio;
        if (!row_dir.empty())
            write_solution_artifacts(sol, solution_summary(sol, cfg, false, sol.certificate.lambda_used,
                                                           sol.certificate.gamma_used),
                                     row_dir);
    };

    const int workers = worker_count(cfg, ov);
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= rows.size()) return;
                std::string row_dir;
                if (!outdir.empty()) {
                    char buf[32];
                    std::snprintf(buf, sizeof buf, "rows/%04zu", i);
                    row_dir = outdir + "/" + buf;
                }
                try {
                    run_row(rows[i], row_dir);
                } catch (const std::exception& e) {
                    rows[i].error = e.what();
                }
            }
        });
    for (auto& t : pool) t.join();

    std::ostringstream csv;
    csv << "index,lambda,d,certificate_passed,converged,iterations,final_residual,K,q,"
           "max_ratio,error\n";
    for (size_t i = 0; i < rows.size(); ++i) {
        const Row& r = rows[i];
        csv << i << "," << fmt_g17(r.lambda) << "," << fmt_g17(r.d) << "," << r.cert_passed
            << "," << r.converged << "," << r.iterations << "," << fmt_g17(r.residual) << ","
            << fmt_g17(r.K) << "," << fmt_g17(r.q) << "," << fmt_g17(r.max_ratio) << ","
            << r.error << "\n";
    }
    if (!outdir.empty()) {
        fs::create_directories(outdir);
        std::ofstream out(outdir + "/sweep.csv");
        out << csv.str();
    }

    ExperimentOutcome res;
    res.exit_code = 0;
    size_t ok = 0;
    for (const Row& r : rows) ok += r.ran && r.error.empty();
    res.report = "sweep: " + std::to_string(rows.size()) + " rows, " + std::to_string(ok) +
                 " ran cleanly\n" + csv.str();
    return res;
}

ExperimentOutcome run_estimate_green(const ExperimentConfig& cfg, const std::string& outdir) {
    const int n = cfg.n;
    std::ostringstream csv;
    csv << "radius,gradient_integral\n";
    for (double s :
         {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.88, 0.94, 0.97, 0.99}) {
        double v = analysis::green_gradient_integral_radial(n, s, 1e-4).value;
        csv << fmt_g17(s) << "," << fmt_g17(v) << "\n";
    }
    analysis::GreenConstant c = analysis::ball_green_constant(n, 1e-4);
    ordered_json j;
    j["n"] = n;
    j["Cn"] = c.value;
    j["Cn_arg_radius"] = c.arg_radius;
    j["evans_bound"] = analysis::evans_bound(unit_ball_volume(3));
    j["tolerance"] = c.rel_tol;
    if (!outdir.empty()) {
        fs::create_directories(outdir);
        std::ofstream out(outdir + "/green.csv");
        out << csv.str();
        write_json(j, outdir + "/green_summary.json");
    }
    ExperimentOutcome res;
    res.report = "C_" + std::to_string(n) + " = " + fmt_g17(c.value) + " at |x| = " +
                 fmt_g17(c.arg_radius) + "\n" + j.dump(2) + "\n" + csv.str();
    return res;
}

}  // namespace

namespace {

ExperimentOutcome run_experiment_impl(const ExperimentConfig& cfg, const RunOverrides& ov) {
    ExperimentConfig effective = cfg;
    if (ov.seed) effective.seed = *ov.seed;
    if (ov.output_dir) effective.output_dir = *ov.output_dir;
    const bool override_cert = effective.override_certificate || ov.override_certificate;
    const std::string outdir = effective.output_dir;

    ExperimentOutcome res;
    switch (effective.mode) {
        case Mode::Certify: {
            PreparedProblem p = prepare_problem(effective);
            geom::CertificateReport cert = geom::check_admissibility(
                *p.spec.domain, p.spec.lambda_sup, p.spec.gamma_sup, geom::Theorem::T1,
                effective.seed != 0 ? effective.seed : geom::Domain::kDefaultVolumeSeed);
            ordered_json j = certificate_json(cert);
            if (p.bounds_estimated) j["bounds_estimated"] = true;
            if (!outdir.empty()) {
                fs::create_directories(outdir);
                write_json(j, outdir + "/certificate.json");
            }
            res.report = j.dump(2);
            res.exit_code = cert.passed ? 0 : 2;
            return res;
        }
        case Mode::Solve: {
            PreparedProblem p = prepare_problem(effective);
            Solution sol = picard::run_iteration(p.spec, run_options(effective, override_cert));
            write_solution_artifacts(sol,
                                     solution_summary(sol, effective, p.bounds_estimated,
                                                      p.spec.lambda_sup, p.spec.gamma_sup),
                                     outdir);
            res.report = brief(sol);
            res.exit_code = sol.converged ? 0 : 3;
            return res;
        }
        case Mode::Shifted: {
            PreparedProblem p = prepare_problem(effective);
            Solution sol = picard::solve_shifted(p.spec.domain, effective.n,
                                                 effective.boundary_c, *effective.lambda,
                                                 p.spec.S, p.spec.gamma_sup,
                                                 run_options(effective, override_cert));
            ordered_json j = solution_summary(sol, effective, p.bounds_estimated, 0.25,
                                              p.spec.gamma_sup);
            j["boundary_c"] = effective.boundary_c;
            j["lambda"] = *effective.lambda;
            write_solution_artifacts(sol, std::move(j), outdir);
            res.report = brief(sol);
            res.exit_code = sol.converged ? 0 : 3;
            return res;
        }
        case Mode::Deform: {
            auto base = effective.make_domain();
            picard::DeformResult dr = picard::constant_curvature_deform(
                base, effective.d, *effective.lambda, run_options(effective, override_cert));
            ordered_json j = solution_summary(dr.solution, effective, false,
                                              std::abs(*effective.lambda), 0.0);
            j["lambda"] = *effective.lambda;
            j["d"] = effective.d;
            j["curvature"] = dr.curvature;
            j["pulled_residual"] = dr.pulled_residual;
            j["amplification"] = dr.amplification;
            if (!outdir.empty()) {
                fs::create_directories(outdir);
                fd::write_csv(dr.pulled_back, outdir + "/pulled_back_f.csv");
            }
            write_solution_artifacts(dr.solution, std::move(j), outdir);
            res.report = brief(dr.solution) + "; curvature " + fmt_g17(dr.curvature);
            res.exit_code = dr.solution.converged ? 0 : 3;
            return res;
        }
        case Mode::Sweep: return run_sweep(effective, ov, outdir);
        case Mode::EstimateGreen: return run_estimate_green(effective, outdir);
        case Mode::Verify: {
            verify::Options vo;
            vo.fast = effective.fast;
            vo.workers = worker_count(effective, ov);
            verify::SuiteResult sr = verify::run_suite(vo);
            res.report = verify::format_report(sr);
            res.exit_code = sr.all_passed ? 0 : 4;
            return res;
        }
    }
    throw InvalidInput("run_experiment: unknown mode");
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const RunOverrides& ov) {
    try {
        return run_experiment_impl(cfg, ov);
    } catch (const CertificateFailure& e) {
        return ExperimentOutcome{2, e.what()};
    }
}

}  // namespace yamabe::cli
