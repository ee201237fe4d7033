#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "runner.hpp"

using namespace yamabe;
using namespace yamabe::cli;
namespace fs = std::filesystem;

namespace {

const char* kMinimalSolve =
    "[domain]\n"
    "ball 0 0 0 0.05\n"
    "[problem]\n"
    "n = 3\n"
    "R = 1\n"
    "S = 0\n"
    "Lambda = 1\n"
    "gamma = 0\n"
    "[run]\n"
    "mode = solve\n"
    "mesh_size = 0.0125\n"
    "tol = 1e-9\n"
    "max_iter = 60\n"
    "seed = 7\n";

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("minimal solve config parses") {
    ExperimentConfig cfg = parse_config(kMinimalSolve);
    CHECK(cfg.mode == Mode::Solve);
    CHECK(cfg.kind == geom::DomainKind::Ball);
    CHECK(cfg.ball_radius == doctest::Approx(0.05));
    CHECK(cfg.mesh_size == doctest::Approx(0.0125));
    CHECK(cfg.R_text == "1");
    CHECK(*cfg.lambda_sup == doctest::Approx(1.0));
    CHECK(cfg.seed == 7);
    CHECK(cfg.make_domain()->dim() == 3);
}

TEST_CASE("missing mesh_size is reported by key name") {
    std::string text =
        "[domain]\nball 0 0 0 0.05\n[problem]\nR = 1\n[run]\nmode = solve\n";
    try {
        parse_config(text);
        FAIL("expected errors");
    } catch (const ConfigParseError& e) {
        bool found = false;
        for (const auto& err : e.errors())
            found = found || err.message.find("mesh_size") != std::string::npos;
        CHECK(found);
    }
}

TEST_CASE("all errors are collected with line numbers") {
    std::string text =
        "[domain]\n"            // 1
        "ball 0 0 0\n"          // 2: too few numbers
        "[problem]\n"           // 3
        "R = exp(\n"            // 4: bad expression (reported at line 0 summary)
        "bogus_key = 3\n"       // 5: unknown key
        "[run]\n"               // 6
        "mode = warp\n"         // 7: unknown mode
        "tol = frogs\n";        // 8: malformed number
    try {
        parse_config(text);
        FAIL("expected errors");
    } catch (const ConfigParseError& e) {
        CHECK(e.errors().size() >= 4);
        auto has = [&](int line, const std::string& frag) {
            for (const auto& err : e.errors())
                if (err.line == line && err.message.find(frag) != std::string::npos)
                    return true;
            return false;
        };
        CHECK(has(2, "ball"));
        CHECK(has(5, "bogus_key"));
        CHECK(has(7, "mode"));
        CHECK(has(8, "tol"));
    }
}

TEST_CASE("polytope literal") {
    std::string text =
        "[domain]\n"
        "polytope\n"
        "1 0 0 0.5\n"
        "-1 0 0 0.5\n"
        "0 1 0 0.5\n"
        "0 -1 0 0.5\n"
        "0 0 1 0.5\n"
        "0 0 -1 0.5\n"
        "[problem]\nR = 0\nS = 0\n"
        "[run]\nmode = certify\n";
    ExperimentConfig cfg = parse_config(text);
    CHECK(cfg.kind == geom::DomainKind::Polytope);
    CHECK(cfg.halfspaces.size() == 6);
    auto dom = cfg.make_domain();
    CHECK(dom->volume() == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("bound estimation from the probe grid") {
    // sup of exp(2x) on [0,1]^3 is e^2; the estimate adds 5%
    auto dom = std::make_shared<const geom::Domain>(
        geom::Domain::box(Vec{0, 0, 0}, Vec{1, 1, 1}));
    double est = estimate_sup_bound(*dom, Expression::parse("exp(2*x)"));
    CHECK(est == doctest::Approx(1.05 * std::exp(2.0)).epsilon(1e-6));
}

TEST_CASE("absent bounds are estimated and flagged in the summary") {
    std::string text =
        "[domain]\nball 0 0 0 0.05\n"
        "[problem]\nR = 0.5\nS = 0\n"  // no Lambda, no gamma
        "[run]\nmode = solve\nmesh_size = 0.0125\ntol = 1e-9\nmax_iter = 60\n";
    ExperimentConfig cfg = parse_config(text);
    fs::path dir = fs::temp_directory_path() / "yamabe_test_estimated";
    fs::remove_all(dir);
    RunOverrides ov;
    ov.output_dir = dir.string();
    auto out = run_experiment(cfg, ov);
    CHECK(out.exit_code == 0);
    nlohmann::json summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary["bounds_estimated"].get<bool>());
    CHECK(summary["lambda_sup"].get<double>() == doctest::Approx(1.05 * 0.5));
    fs::remove_all(dir);
}

TEST_CASE("canonical text round-trips") {
    ExperimentConfig cfg = parse_config(kMinimalSolve);
    ExperimentConfig again = parse_config(cfg.canonical_text());
    CHECK(again == cfg);
    CHECK(parse_config(again.canonical_text()) == again);
}

TEST_CASE("certify outcome and exit codes") {
    ExperimentConfig cfg = parse_config(kMinimalSolve);
    cfg.mode = Mode::Certify;
    auto out = run_experiment(cfg);
    CHECK(out.exit_code == 0);
    CHECK(out.report.find("\"passed\": true") != std::string::npos);

    cfg.ball_radius = 5.0;  // hopeless
    CHECK(run_experiment(cfg).exit_code == 2);
}

TEST_CASE("solve writes the artifact set") {
    fs::path dir = fs::temp_directory_path() / "yamabe_test_artifacts";
    fs::remove_all(dir);
    ExperimentConfig cfg = parse_config(kMinimalSolve);
    RunOverrides ov;
    ov.output_dir = dir.string();
    auto out = run_experiment(cfg, ov);
    CHECK(out.exit_code == 0);
    for (const char* name :
         {"trace.csv", "solution_f.csv", "solution_u.csv", "certificate.json", "summary.json"})
        CHECK(fs::exists(dir / name));

    std::string trace = slurp(dir / "trace.csv");
    CHECK(trace.rfind("k,sup_grad,diff_h10,ratio,residual", 0) == 0);

    nlohmann::json summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary["converged"].get<bool>());
    CHECK(summary["certificate"]["passed"].get<bool>());
    CHECK(summary.contains("wall_time_seconds"));
    // the echo reproduces the run as executed, output_dir override included
    ExperimentConfig expected = cfg;
    expected.output_dir = dir.string();
    ExperimentConfig echoed = parse_config(summary["config_echo"].get<std::string>());
    CHECK(echoed == expected);
    fs::remove_all(dir);
}

TEST_CASE("certificate failure maps to exit 2, non-convergence to 3") {
    ExperimentConfig cfg = parse_config(kMinimalSolve);
    cfg.ball_radius = 0.8;
    cfg.mesh_size = 0.2;
    CHECK(run_experiment(cfg).exit_code == 2);

    cfg.override_certificate = true;
    cfg.max_iter = 1;  // cannot reach tol in one step
    cfg.tol = 1e-14;
    auto out = run_experiment(cfg);
    CHECK(out.exit_code == 3);
}

TEST_CASE("sweep produces a deterministic csv over the parameter grid") {
    std::string text =
        "[domain]\n"
        "ball 0 0 0 1\n"
        "[problem]\n"
        "R = 0\nS = 0\n"
        "[run]\n"
        "mode = sweep\n"
        "mesh_size = 0.0125\n"
        "tol = 1e-9\n"
        "max_iter = 40\n"
        "seed = 3\n"
        "workers = 2\n"
        "sweep_lambda = -0.01 0.01 3\n"
        "sweep_d = 0.04 0.05 2\n";
    ExperimentConfig cfg = parse_config(text);
    fs::path dir = fs::temp_directory_path() / "yamabe_test_sweep";
    fs::remove_all(dir);
    RunOverrides ov;
    ov.output_dir = dir.string();
    auto out = run_experiment(cfg, ov);
    CHECK(out.exit_code == 0);
    std::string csv = slurp(dir / "sweep.csv");
    // header + 6 rows
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
    CHECK(fs::exists(dir / "rows/0000/summary.json"));
    CHECK(fs::exists(dir / "rows/0005/summary.json"));

    // determinism across repeated execution
    fs::path dir2 = fs::temp_directory_path() / "yamabe_test_sweep2";
    fs::remove_all(dir2);
    ov.output_dir = dir2.string();
    run_experiment(cfg, ov);
    CHECK(slurp(dir2 / "sweep.csv") == csv);
    fs::remove_all(dir);
    fs::remove_all(dir2);
}

TEST_CASE("estimate-green emits the table and summary") {
    std::string text = "[run]\nmode = estimate-green\n";
    ExperimentConfig cfg = parse_config(text);
    fs::path dir = fs::temp_directory_path() / "yamabe_test_green";
    fs::remove_all(dir);
    RunOverrides ov;
    ov.output_dir = dir.string();
    auto out = run_experiment(cfg, ov);
    CHECK(out.exit_code == 0);
    nlohmann::json j = nlohmann::json::parse(slurp(dir / "green_summary.json"));
    CHECK(j["n"].get<int>() == 3);
    CHECK(j["Cn"].get<double>() == doctest::Approx(0.75).epsilon(1e-2));
    CHECK(j["evans_bound"].get<double>() == doctest::Approx(16.459).epsilon(1e-3));
    std::string csv = slurp(dir / "green.csv");
    CHECK(csv.rfind("radius,gradient_integral", 0) == 0);
    fs::remove_all(dir);
}
