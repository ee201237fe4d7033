#include "config.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace yamabe::cli {

std::string to_string(Mode m) {
    switch (m) {
        case Mode::Solve: return "solve";
        case Mode::Shifted: return "shifted";
        case Mode::Deform: return "deform";
        case Mode::Sweep: return "sweep";
        case Mode::Certify: return "certify";
        case Mode::EstimateGreen: return "estimate-green";
        case Mode::Verify: return "verify";
    }
    return "?";
}

ConfigParseError::ConfigParseError(std::vector<ConfigError> errors)
    : std::runtime_error([&errors] {
          std::string s = "config errors:";
          for (const auto& e : errors)
              s += "\n  line " + std::to_string(e.line) + ": " + e.message;
          return s;
      }()),
      errors_(std::move(errors)) {}

std::vector<double> SweepRange::values() const {
    std::vector<double> v;
    if (!present) return v;
    if (count == 1) {
        v.push_back(lo);
        return v;
    }
    for (int i = 0; i < count; ++i) v.push_back(lo + (hi - lo) * i / (count - 1));
    return v;
}

namespace {

std::vector<std::string> tokens(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> t;
    std::string w;
    while (in >> w) t.push_back(w);
    return t;
}

bool parse_double(const std::string& s, double& out) {
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end && *end == '\0' && end != s.c_str();
}

bool parse_bool(const std::string& s, bool& out) {
    if (s == "true" || s == "1" || s == "yes") return out = true, true;
    if (s == "false" || s == "0" || s == "no") return out = false, true;
    return false;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::vector<ConfigError> errors;
    auto err = [&](int line, const std::string& m) { errors.push_back({line, m}); };

    enum class Section { None, Domain, Problem, Run } section = Section::None;
    bool mode_seen = false, mesh_seen = false, polytope_open = false;

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(raw);
        if (size_t h = line.find('#'); h != std::string::npos) line = trim(line.substr(0, h));
        if (line.empty()) continue;

        if (line.front() == '[') {
            polytope_open = false;
            if (line == "[domain]")
                section = Section::Domain;
            else if (line == "[problem]")
                section = Section::Problem;
            else if (line == "[run]")
                section = Section::Run;
            else {
                section = Section::None;
                err(lineno, "unknown section " + line);
            }
            continue;
        }

        if (section == Section::Domain) {
            auto t = tokens(line);
            if (polytope_open) {
                if (t.size() == 4) {
                    std::array<double, 4> hs{};
                    bool ok = true;
                    for (int i = 0; i < 4; ++i) ok = ok && parse_double(t[i], hs[i]);
                    if (!ok)
                        err(lineno, "malformed half-space row (expected 'nx ny nz b')");
                    else
                        cfg.halfspaces.push_back(hs);
                    continue;
                }
                polytope_open = false;  // fall through: a new literal or junk
            }
            if (t.empty()) continue;
            if (t[0] == "ball") {
                cfg.kind = geom::DomainKind::Ball;
                cfg.domain_present = true;
                std::vector<double> nums;
                bool ok = t.size() >= 3;
                for (size_t i = 1; i < t.size() && ok; ++i) {
                    double v;
                    ok = parse_double(t[i], v);
                    nums.push_back(v);
                }
                if (!ok || nums.size() < 4)
                    err(lineno, "ball literal needs 'ball c1 .. cn r' with n >= 3");
                else {
                    cfg.ball_radius = nums.back();
                    nums.pop_back();
                    cfg.ball_center = nums;
                }
            } else if (t[0] == "box") {
                cfg.kind = geom::DomainKind::Box;
                cfg.domain_present = true;
                std::vector<double> nums;
                bool ok = true;
                for (size_t i = 1; i < t.size() && ok; ++i) {
                    double v;
                    ok = parse_double(t[i], v);
                    nums.push_back(v);
                }
                if (!ok || nums.size() < 6 || nums.size() % 2 != 0)
                    err(lineno, "box literal needs 'box l1 .. ln h1 .. hn'");
                else {
                    size_t half = nums.size() / 2;
                    cfg.box_lo.assign(nums.begin(), nums.begin() + half);
                    cfg.box_hi.assign(nums.begin() + half, nums.end());
                }
            } else if (t[0] == "polytope") {
                cfg.kind = geom::DomainKind::Polytope;
                cfg.domain_present = true;
                polytope_open = true;
            } else {
                err(lineno, "unknown domain literal '" + t[0] + "'");
            }
            continue;
        }

        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            err(lineno, "expected 'key = value'");
            continue;
        }
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));

        auto want_double = [&](double& slot) {
            double v;
            if (parse_double(val, v))
                slot = v;
            else
                err(lineno, "malformed number for key '" + key + "'");
        };
        auto want_opt_double = [&](std::optional<double>& slot) {
            double v;
            if (parse_double(val, v))
                slot = v;
            else
                err(lineno, "malformed number for key '" + key + "'");
        };
        auto want_range = [&](SweepRange& slot) {
            auto t = tokens(val);
            double lo, hi;
            if (t.size() == 3 && parse_double(t[0], lo) && parse_double(t[1], hi)) {
                slot.present = true;
                slot.lo = lo;
                slot.hi = hi;
                slot.count = std::atoi(t[2].c_str());
                if (slot.count < 1) err(lineno, "sweep count must be >= 1");
            } else {
                err(lineno, "sweep range needs 'lo hi count'");
            }
        };

        if (section == Section::Problem) {
            if (key == "n") {
                cfg.n = std::atoi(val.c_str());
                if (cfg.n < 3 || cfg.n > kMaxDim) err(lineno, "n must be in [3, 8]");
            } else if (key == "R") {
                cfg.R_text = val;
            } else if (key == "S") {
                cfg.S_text = val;
            } else if (key == "Lambda") {
                want_opt_double(cfg.lambda_sup);
            } else if (key == "gamma") {
                want_opt_double(cfg.gamma_sup);
            } else if (key == "c") {
                want_double(cfg.boundary_c);
            } else if (key == "lambda") {
                want_opt_double(cfg.lambda);
            } else {
                err(lineno, "unknown key '" + key + "' in [problem]");
            }
        } else if (section == Section::Run) {
            if (key == "mode") {
                mode_seen = true;
                if (val == "solve")
                    cfg.mode = Mode::Solve;
                else if (val == "shifted")
                    cfg.mode = Mode::Shifted;
                else if (val == "deform")
                    cfg.mode = Mode::Deform;
                else if (val == "sweep")
                    cfg.mode = Mode::Sweep;
                else if (val == "certify")
                    cfg.mode = Mode::Certify;
                else if (val == "estimate-green")
                    cfg.mode = Mode::EstimateGreen;
                else if (val == "verify")
                    cfg.mode = Mode::Verify;
                else
                    err(lineno, "unknown mode '" + val + "'");
            } else if (key == "mesh_size") {
                mesh_seen = true;
                want_double(cfg.mesh_size);
            } else if (key == "tol") {
                want_double(cfg.tol);
            } else if (key == "max_iter") {
                cfg.max_iter = std::atoi(val.c_str());
            } else if (key == "seed") {
                cfg.seed = std::strtoull(val.c_str(), nullptr, 10);
            } else if (key == "output_dir") {
                cfg.output_dir = val;
            } else if (key == "d") {
                want_double(cfg.d);
            } else if (key == "iteration_coefficient") {
                if (val == "eq3")
                    cfg.grad_coef = picard::GradientCoefficient::Full;
                else if (val == "eq5")
                    cfg.grad_coef = picard::GradientCoefficient::Unit;
                else
                    err(lineno, "iteration_coefficient must be eq3 or eq5");
            } else if (key == "override_certificate") {
                if (bool b; parse_bool(val, b))
                    cfg.override_certificate = b;
                else
                    err(lineno, "override_certificate must be true/false");
            } else if (key == "workers") {
                cfg.workers = std::atoi(val.c_str());
            } else if (key == "fast") {
                if (bool b; parse_bool(val, b))
                    cfg.fast = b;
                else
                    err(lineno, "fast must be true/false");
            } else if (key == "sweep_lambda") {
                want_range(cfg.sweep_lambda);
            } else if (key == "sweep_d") {
                want_range(cfg.sweep_d);
            } else {
                err(lineno, "unknown key '" + key + "' in [run]");
            }
        } else {
            err(lineno, "key '" + key + "' outside of any section");
        }
    }

    // cross-field validation (line 0 = whole file)
    auto require = [&](bool cond, const std::string& m) {
        if (!cond) err(0, m);
    };
    try {
        Expression::parse(cfg.R_text);
    } catch (const std::exception& e) {
        err(0, std::string("R does not parse: ") + e.what());
    }
    try {
        Expression::parse(cfg.S_text);
    } catch (const std::exception& e) {
        err(0, std::string("S does not parse: ") + e.what());
    }
    require(mode_seen, "missing required key 'mode' in [run]");
    const bool needs_domain = cfg.mode != Mode::EstimateGreen && cfg.mode != Mode::Verify;
    const bool needs_mesh = cfg.mode == Mode::Solve || cfg.mode == Mode::Shifted ||
                            cfg.mode == Mode::Deform || cfg.mode == Mode::Sweep;
    if (needs_domain) require(cfg.domain_present, "missing [domain] literal for this mode");
    if (needs_mesh) {
        require(mesh_seen, "missing required key 'mesh_size' for this mode");
        if (mesh_seen) require(cfg.mesh_size > 0, "mesh_size must be > 0");
    }
    require(cfg.tol > 0, "tol must be > 0");
    require(cfg.max_iter >= 1, "max_iter must be >= 1");
    if (cfg.mode == Mode::Shifted)
        require(cfg.lambda.has_value(), "mode shifted requires 'lambda' in [problem]");
    if (cfg.mode == Mode::Deform) {
        require(cfg.lambda.has_value(), "mode deform requires 'lambda' in [problem]");
        require(cfg.d > 0, "mode deform requires 'd' > 0 in [run]");
    }
    if (cfg.mode == Mode::Sweep)
        require(cfg.sweep_lambda.present || cfg.sweep_d.present,
                "mode sweep requires sweep_lambda and/or sweep_d");
    if (cfg.lambda_sup && *cfg.lambda_sup < 0) err(0, "Lambda must be >= 0");
    if (cfg.gamma_sup && *cfg.gamma_sup < 0) err(0, "gamma must be >= 0");

    if (!errors.empty()) throw ConfigParseError(std::move(errors));
    return cfg;
}

std::shared_ptr<const geom::Domain> ExperimentConfig::make_domain() const {
    if (!domain_present) throw InvalidInput("config: no domain literal");
    switch (kind) {
        case geom::DomainKind::Ball: {
            if (static_cast<int>(ball_center.size()) != n)
                throw InvalidInput("config: ball center has " +
                                   std::to_string(ball_center.size()) +
                                   " coordinates but n = " + std::to_string(n));
            Vec c = Vec::zero(n);
            for (int i = 0; i < n; ++i) c[i] = ball_center[i];
            return std::make_shared<const geom::Domain>(geom::Domain::ball(c, ball_radius));
        }
        case geom::DomainKind::Box: {
            if (static_cast<int>(box_lo.size()) != n)
                throw InvalidInput("config: box has " + std::to_string(box_lo.size()) +
                                   " coordinates per corner but n = " + std::to_string(n));
            Vec lo = Vec::zero(n), hi = Vec::zero(n);
            for (int i = 0; i < n; ++i) {
                lo[i] = box_lo[i];
                hi[i] = box_hi[i];
            }
            return std::make_shared<const geom::Domain>(geom::Domain::box(lo, hi));
        }
        case geom::DomainKind::Polytope: {
            if (n != 3) throw InvalidInput("config: polytopes require n = 3");
            std::vector<Vec> normals;
            std::vector<double> offsets;
            for (const auto& hs : halfspaces) {
                normals.push_back(Vec{hs[0], hs[1], hs[2]});
                offsets.push_back(hs[3]);
            }
            return std::make_shared<const geom::Domain>(
                geom::Domain::polytope(std::move(normals), std::move(offsets)));
        }
    }
    throw InvalidInput("config: unknown domain kind");
}

std::string ExperimentConfig::canonical_text() const {
    std::ostringstream out;
    out << "[domain]\n";
    if (domain_present) {
        switch (kind) {
            case geom::DomainKind::Ball:
                out << "ball";
                for (double c : ball_center) out << " " << fmt_g17(c);
                out << " " << fmt_g17(ball_radius) << "\n";
                break;
            case geom::DomainKind::Box:
                out << "box";
                for (double c : box_lo) out << " " << fmt_g17(c);
                for (double c : box_hi) out << " " << fmt_g17(c);
                out << "\n";
                break;
            case geom::DomainKind::Polytope:
                out << "polytope\n";
                for (const auto& hs : halfspaces) {
                    for (int i = 0; i < 4; ++i) out << (i ? " " : "") << fmt_g17(hs[i]);
                    out << "\n";
                }
                break;
        }
    }
    out << "[problem]\n";
    out << "n = " << n << "\n";
    out << "R = " << R_text << "\n";
    out << "S = " << S_text << "\n";
    if (lambda_sup) out << "Lambda = " << fmt_g17(*lambda_sup) << "\n";
    if (gamma_sup) out << "gamma = " << fmt_g17(*gamma_sup) << "\n";
    out << "c = " << fmt_g17(boundary_c) << "\n";
    if (lambda) out << "lambda = " << fmt_g17(*lambda) << "\n";
    out << "[run]\n";
    out << "mode = " << to_string(mode) << "\n";
    if (mesh_size > 0) out << "mesh_size = " << fmt_g17(mesh_size) << "\n";
    out << "tol = " << fmt_g17(tol) << "\n";
    out << "max_iter = " << max_iter << "\n";
    out << "seed = " << seed << "\n";
    if (!output_dir.empty()) out << "output_dir = " << output_dir << "\n";
    if (d > 0) out << "d = " << fmt_g17(d) << "\n";
    out << "iteration_coefficient = "
        << (grad_coef == picard::GradientCoefficient::Full ? "eq3" : "eq5") << "\n";
    out << "override_certificate = " << (override_certificate ? "true" : "false") << "\n";
    if (workers > 0) out << "workers = " << workers << "\n";
    if (fast) out << "fast = true\n";
    if (sweep_lambda.present)
        out << "sweep_lambda = " << fmt_g17(sweep_lambda.lo) << " " << fmt_g17(sweep_lambda.hi)
            << " " << sweep_lambda.count << "\n";
    if (sweep_d.present)
        out << "sweep_d = " << fmt_g17(sweep_d.lo) << " " << fmt_g17(sweep_d.hi) << " "
            << sweep_d.count << "\n";
    return out.str();
}

double estimate_sup_bound(const geom::Domain& domain, const Expression& e) {
    const int n = domain.dim();
    const Vec lo = domain.bbox_lo(), hi = domain.bbox_hi();
    const int probes_per_axis = n == 3 ? 64 : 12;
    double sup = 0;
    std::array<int, kMaxDim> m{};
    for (;;) {
        Vec p = Vec::zero(n);
        for (int a = 0; a < n; ++a)
            p[a] = lo[a] + (hi[a] - lo[a]) * m[a] / (probes_per_axis - 1);
        if (domain.signed_distance(p) <= 0) sup = std::max(sup, std::abs(e.eval(p)));
        int a = n - 1;
        while (a >= 0 && ++m[a] == probes_per_axis) m[a--] = 0;
        if (a < 0) break;
    }
    return 1.05 * sup;
}

}  // namespace yamabe::cli
