#pragma once

#include "xmdp/milp/model.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace xmdp::cli {

/// Configuration shared by the subcommands; flags may be overridden from a
/// JSON config file.
struct RunConfig {
    std::string inputPath;
    std::string outDir = ".";
    std::optional<std::string> criterion;      // "total" | "average"
    std::map<std::string, double> deltas;      // per-QA improvement margins
    std::string penaltyShape = "quadratic";    // or "linear"
    double kPrimeRatio = 0.01;
    uint64_t seed = 0;
    int count = 48;
    int perProfile = 3;
    bool exportLp = false;
    bool emitDot = false;
    int verbosity = 0;
    std::string templatePath; // optional explanation template overrides
    milp::SolveLimits limits;
};

/// Exit codes: 0 success, 2 validation/input error, 3 solver failure,
/// 4 label mismatch (verify).
int cmd_plan(const RunConfig& config);
int cmd_explain(const RunConfig& config);
int cmd_scenarios(const RunConfig& config);
int cmd_verify(const RunConfig& config);
int cmd_export_lp(const RunConfig& config);

/// Applies settings from a JSON config file (flags win over file values,
/// so call this before applying parsed flags).
void apply_config_file(RunConfig& config, const std::string& path);

} // namespace xmdp::cli
