// yamabe command-line front end. Everything numerical lives behind the
// C API in libyamabe; this binary only parses arguments, reads the config
// file, and relays the outcome.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "yamabe.h"

namespace {

int run_mode(const std::string& mode, const std::string& config_path,
             const std::string& output_dir, bool has_seed, unsigned long long seed,
             bool override_cert, int workers, bool fast) {
    std::string text;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot read config file '" << config_path << "'\n";
            return 1;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    } else {
        text = "[run]\nmode = " + mode + "\n";
    }

    ym_experiment_options opts{};
    opts.mode = mode.c_str();
    opts.output_dir = output_dir.empty() ? nullptr : output_dir.c_str();
    opts.has_seed = has_seed ? 1 : 0;
    opts.seed = seed;
    opts.override_certificate = override_cert ? 1 : 0;
    opts.workers = workers;
    opts.fast = fast ? 1 : 0;

    char* report = nullptr;
    int exit_code = 1;
    ym_status st = ym_experiment_run(text.c_str(), &opts, &report, &exit_code);
    if (st != YM_OK && !report) {
        std::cerr << "error: " << ym_last_error() << "\n";
        return 1;
    }
    if (report) {
        std::cout << report << "\n";
        ym_string_free(report);
    }
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Picard solver for Dirichlet problems of the gradient-form "
                 "constant-curvature equation on small convex domains"};
    app.require_subcommand(1);
    app.fallthrough();  // accept --output-dir etc. after the subcommand too

    std::string config_path, output_dir;
    unsigned long long seed = 0;
    bool has_seed = false, override_cert = false, fast = false;
    int workers = 0;

    app.add_option("--output-dir", output_dir, "directory for run artifacts");
    app.add_option("--seed", seed, "random seed (Monte-Carlo volume, sweeps)")
        ->each([&](const std::string&) { has_seed = true; });
    app.add_flag("--override-certificate", override_cert,
                 "run even when the admissibility certificate fails (labeled uncertified)");
    app.add_option("--workers", workers, "worker threads (default: YAMABE_WORKERS or hardware)");

    const struct {
        const char* name;
        const char* help;
        bool needs_config;
    } subs[] = {
        {"certify", "evaluate the admissibility certificate without solving", true},
        {"solve", "run the Picard iteration for the configured problem", true},
        {"shifted", "solve with constant boundary value c and curvature parameter lambda", true},
        {"deform", "constant-curvature deformation of a scaled copy of the domain", true},
        {"sweep", "Cartesian parameter sweep with one sweep.csv", true},
        {"estimate-green", "tabulate the unit-ball Green gradient integral and its sup", false},
        {"verify", "run the built-in verification suite (exit 4 on failure)", false},
    };
    for (const auto& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        if (s.needs_config)
            sub->add_option("config", config_path, "experiment config file")->required();
        else
            sub->add_option("config", config_path, "optional config file");
        if (std::string(s.name) == "verify")
            sub->add_flag("--fast", fast, "reduced subset (completes in well under a minute)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;  // usage errors exit 1 by contract, --help exits 0
    }
    std::string mode = app.get_subcommands().front()->get_name();
    return run_mode(mode, config_path, output_dir, has_seed, seed, override_cert, workers, fast);
}
