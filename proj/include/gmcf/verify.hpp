#pragma once

// The acceptance suite: every checkable claim behind the library, as
// criterion functions returning structured pass/fail results. Used by the
// `verify` CLI subcommand and the acceptance test binary.

#include <json.hpp>

#include <string>
#include <vector>

namespace gmcf {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    double limit_seconds = 0.0;
    std::string detail;
    nlohmann::json data;
};

struct VerifyOptions {
    bool quick = false;       // coarse grids / reduced counts, looser bounds
    unsigned long long seed = 20260809ULL;
    std::vector<int> only;    // criterion ids; empty = all
};

/// Ordered (id, name) pairs of all criteria.
const std::vector<std::pair<int, std::string>>& acceptance_names();

/// Runs the requested criteria, timing each.
std::vector<CriterionResult> run_acceptance(const VerifyOptions& opts = {});

} // namespace gmcf
