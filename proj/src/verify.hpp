#pragma once

#include <string>
#include <vector>

namespace yamabe::verify {

struct Options {
    bool fast = false;  ///< reduced sample counts, skips the 64^3 timing run
    int workers = 2;
    std::uint64_t seed = 952041;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string details;
    double seconds = 0;
};

struct SuiteResult {
    std::vector<CheckResult> checks;
    bool all_passed = false;
    double seconds = 0;
};

/// Runs the acceptance criteria and the per-module invariant checks.
/// Every tolerance is pinned in the implementation.
SuiteResult run_suite(const Options& opts = {});

/// One "[PASS]/[FAIL] name - details" line per check plus a summary line.
std::string format_report(const SuiteResult& r);

/// Shared checker for empirical contraction ratios: every ratio from the
/// third step on must be < 1 and <= q + slack. Exposed so the suite can
/// probe its own slack sensitivity with synthetic traces.
bool contraction_ratios_ok(const std::vector<double>& ratios_from_k2, double q, double slack);

}  // namespace yamabe::verify
