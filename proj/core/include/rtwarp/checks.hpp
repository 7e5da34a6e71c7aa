#pragma once

#include <stdexcept>
#include <string>
#include <vector>

// Self-check suites: each module's declared invariants at desk scale,
// runnable from the CLI (`check` subcommand) on any build.

namespace rtwarp::checks {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;  ///< non-empty on failure
};

struct UnknownSuiteError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Valid suite names, "all" last.
std::vector<std::string> suite_names();

/// Run one suite ("geometry", "warp", "nnkernel", "metrics" or "all").
/// Throws UnknownSuiteError for anything else.
std::vector<CheckResult> run_suite(const std::string& suite);

}  // namespace rtwarp::checks
