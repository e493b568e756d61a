#include "xmdp/cli.hpp"
#include "xmdp/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

/// "qa=value" pairs from repeated --delta flags.
int parse_deltas(const std::vector<std::string>& raw, std::map<std::string, double>& out) {
    for (const auto& item : raw) {
        size_t eq = item.find('=');
        if (eq == std::string::npos) {
            std::cerr << "error: --delta expects <qa>=<value>, got '" << item << "'\n";
            return 2;
        }
        try {
            out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
        } catch (const std::exception&) {
            std::cerr << "error: --delta value in '" << item << "' is not a number\n";
            return 2;
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-objective MDP planning with quality-attribute contrastive explanations"};
    app.require_subcommand(1);

    xmdp::cli::RunConfig config;
    std::string configPath;
    std::vector<std::string> rawDeltas;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", configPath, "JSON config file (flags win over file values)");
        cmd->add_option("--out", config.outDir, "output directory");
        cmd->add_flag("-v,--verbose", config.verbosity, "verbose progress on stderr");
        return cmd;
    };
    auto add_problem_opts = [&](CLI::App* cmd) {
        cmd->add_option("--input", config.inputPath, "problem JSON file")->required();
        cmd->add_option("--criterion", [&](const std::vector<std::string>& v) {
            config.criterion = v.front();
            return true;
        }, "expected criterion: total|average");
        return cmd;
    };
    auto add_explain_opts = [&](CLI::App* cmd) {
        cmd->add_option("--delta", rawDeltas, "per-QA improvement margin, <qa>=<value>");
        cmd->add_option("--penalty", config.penaltyShape, "soft-bound penalty: linear|quadratic");
        cmd->add_option("--kprime-ratio", config.kPrimeRatio,
                        "down-weight ratio for the improved QA");
        cmd->add_flag("--export-lp", config.exportLp, "write one LP file per attempted QA");
        cmd->add_flag("--dot", config.emitDot, "write GraphViz policy renderings");
        return cmd;
    };

    CLI::App* plan = add_problem_opts(add_common(app.add_subcommand(
        "plan", "solve the problem and write the policy and its valuation")));
    plan->add_flag("--dot", config.emitDot, "write a GraphViz policy rendering");
    CLI::App* explain = add_explain_opts(add_problem_opts(add_common(app.add_subcommand(
        "explain", "solve, compute per-QA improving alternatives and render the explanation"))));
    CLI::App* scenarios = add_common(app.add_subcommand(
        "scenarios", "generate user-study style navigation scenarios"));
    scenarios->add_option("--seed", config.seed, "generation seed");
    scenarios->add_option("--count", config.count, "number of question items");
    scenarios->add_option("--per-profile", config.perProfile, "scenarios per cost profile");
    CLI::App* verify = add_common(app.add_subcommand(
        "verify", "recompute scenario labels and compare against the stored ones"));
    verify->add_option("--input", config.inputPath, "scenario bundle: index.json, directory or file")
        ->required();
    CLI::App* exportLp = add_explain_opts(add_problem_opts(add_common(app.add_subcommand(
        "export-lp", "write the per-QA improvement MILPs in LP format"))));

    CLI11_PARSE(app, argc, argv);

    try {
        if (!configPath.empty()) {
            // flags win: reapply the parsed values on top of the file settings
            xmdp::cli::RunConfig fromFile = config;
            xmdp::cli::apply_config_file(fromFile, configPath);
            auto keep_if_set = [&](const CLI::App* cmd, const char* flag, auto member) {
                if (cmd->count(flag) > 0) fromFile.*member = config.*member;
            };
            const CLI::App* active = app.get_subcommands().front();
            keep_if_set(active, "--out", &xmdp::cli::RunConfig::outDir);
            keep_if_set(active, "--penalty", &xmdp::cli::RunConfig::penaltyShape);
            keep_if_set(active, "--kprime-ratio", &xmdp::cli::RunConfig::kPrimeRatio);
            if (active->count("--seed")) fromFile.seed = config.seed;
            if (active->count("--count")) fromFile.count = config.count;
            if (active->count("--per-profile")) fromFile.perProfile = config.perProfile;
            if (active->count("--input")) fromFile.inputPath = config.inputPath;
            if (active->count("--export-lp")) fromFile.exportLp = config.exportLp;
            if (active->count("--dot")) fromFile.emitDot = config.emitDot;
            if (config.criterion) fromFile.criterion = config.criterion;
            config = fromFile;
        }
    } catch (const xmdp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    if (int rc = parse_deltas(rawDeltas, config.deltas); rc != 0) return rc;

    if (app.got_subcommand(plan)) return xmdp::cli::cmd_plan(config);
    if (app.got_subcommand(explain)) return xmdp::cli::cmd_explain(config);
    if (app.got_subcommand(scenarios)) return xmdp::cli::cmd_scenarios(config);
    if (app.got_subcommand(verify)) return xmdp::cli::cmd_verify(config);
    if (app.got_subcommand(exportLp)) return xmdp::cli::cmd_export_lp(config);
    return 2;
}
