#pragma once

#include <optional>
#include <string>

#include "config.hpp"

namespace yamabe::cli {

/// Command-line overrides applied on top of the parsed config.
struct RunOverrides {
    std::optional<std::string> output_dir;
    std::optional<std::uint64_t> seed;
    bool override_certificate = false;
    std::optional<int> workers;
};

struct ExperimentOutcome {
    int exit_code = 0;   ///< 0 ok, 2 certificate, 3 non-convergence, 4 verify failure
    std::string report;  ///< human-readable text for stdout
};

/// Dispatches the experiment. Artifacts (trace.csv, solution_f.csv,
/// solution_u.csv, certificate.json, summary.json, sweep.csv, ...) are
/// written when an output directory is configured. ConfigParseError and
/// InvalidInput propagate to the caller (usage errors, exit code 1).
ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const RunOverrides& ov = {});

}  // namespace yamabe::cli
