#pragma once

#include <optional>
#include <string>
#include <vector>

#include "picard.hpp"

namespace yamabe::cli {

enum class Mode { Solve, Shifted, Deform, Sweep, Certify, EstimateGreen, Verify };

std::string to_string(Mode m);

struct ConfigError {
    int line = 0;
    std::string message;
};

/// Aggregates every problem found in a config, not just the first.
class ConfigParseError : public std::runtime_error {
  public:
    explicit ConfigParseError(std::vector<ConfigError> errors);
    const std::vector<ConfigError>& errors() const { return errors_; }

  private:
    std::vector<ConfigError> errors_;
};

struct SweepRange {
    bool present = false;
    double lo = 0, hi = 0;
    int count = 0;
    std::vector<double> values() const;
    bool operator==(const SweepRange&) const = default;
};

/// Parsed experiment description: domain literal, coefficient expressions,
/// and run parameters. `key = value` lines under [domain], [problem], [run].
struct ExperimentConfig {
    // [domain]
    geom::DomainKind kind = geom::DomainKind::Ball;
    std::vector<double> ball_center;
    double ball_radius = 0;
    std::vector<double> box_lo, box_hi;
    std::vector<std::array<double, 4>> halfspaces;  // nx ny nz b
    bool domain_present = false;

    // [problem]
    int n = 3;
    std::string R_text = "0";
    std::string S_text = "0";
    std::optional<double> lambda_sup;  // estimated from a probe grid when absent
    std::optional<double> gamma_sup;
    double boundary_c = 0;
    std::optional<double> lambda;  // curvature parameter (shifted/deform/sweep)

    // [run]
    Mode mode = Mode::Solve;
    double mesh_size = 0;
    double tol = 1e-9;
    int max_iter = 200;
    std::uint64_t seed = 0;
    std::string output_dir;
    double d = 0;  // deform scale
    picard::GradientCoefficient grad_coef = picard::GradientCoefficient::Full;
    bool override_certificate = false;
    int workers = 0;  // 0 = hardware default
    bool fast = false;
    SweepRange sweep_lambda, sweep_d;

    std::shared_ptr<const geom::Domain> make_domain() const;
    std::string canonical_text() const;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Parses and validates; throws ConfigParseError listing all errors with
/// line numbers (unknown key, malformed value, missing mode field, ...).
ExperimentConfig parse_config(const std::string& text);

/// 1.05 x sampled sup |expr| over a 64^3 probe lattice spanning the
/// bounding box (closure points included). Used when Lambda/gamma are
/// absent from the config; results are flagged as estimated.
double estimate_sup_bound(const geom::Domain& domain, const Expression& e);

}  // namespace yamabe::cli
