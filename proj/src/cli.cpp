#include "xmdp/cli.hpp"

#include "xmdp/evaluate.hpp"
#include "xmdp/explain.hpp"
#include "xmdp/json_io.hpp"
#include "xmdp/milp/lp_format.hpp"
#include "xmdp/robotnav.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace xmdp::cli {

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), Errc::InvalidArgument, "cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    require(out.good(), Errc::InvalidArgument, "cannot write '" + path.string() + "'");
    out << content;
}

int exit_code_for(const Error& e) { return is_validation_error(e.code()) ? 2 : 3; }

template <typename Fn> int guarded(const RunConfig& config, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    (void)config;
}

struct LoadedProblem {
    Problem problem;
    ExplicitMdp mdp;
};

LoadedProblem load_problem(const RunConfig& config) {
    LoadedProblem lp;
    lp.problem = problem_from_json(read_file(config.inputPath));
    if (config.criterion) {
        bool wantTotal = *config.criterion == "total";
        require(*config.criterion == "total" || *config.criterion == "average",
                Errc::InvalidArgument, "--criterion must be 'total' or 'average'");
        require(wantTotal == lp.problem.is_total_cost(), Errc::InvalidArgument,
                "problem file uses the " +
                    std::string(lp.problem.is_total_cost() ? "total" : "average") +
                    "-cost criterion, which contradicts --criterion " + *config.criterion);
    }
    lp.mdp = compile(lp.problem);
    return lp;
}

alt::GenerateOptions make_options(const RunConfig& config, const ExplicitMdp& mdp) {
    alt::GenerateOptions options;
    options.kPrimeRatio = config.kPrimeRatio;
    options.exportLp = config.exportLp;
    options.limits = config.limits;
    require(config.penaltyShape == "quadratic" || config.penaltyShape == "linear",
            Errc::InvalidArgument, "--penalty must be 'linear' or 'quadratic'");
    options.penaltyShape = config.penaltyShape == "linear" ? alt::PenaltySpec::Shape::Linear
                                                           : alt::PenaltySpec::Shape::Quadratic;
    for (const auto& [qaName, delta] : config.deltas) {
        int qi = mdp.problem->qa_index(qaName);
        require(qi >= 0, Errc::InvalidArgument, "--delta references unknown QA '" + qaName + "'");
        require(delta > 0.0, Errc::InvalidArgument, "--delta for '" + qaName + "' must be positive");
        options.deltas[qi] = delta;
    }
    return options;
}

expl::TemplateSet load_templates(const RunConfig& config) {
    if (config.templatePath.empty()) return expl::TemplateSet::defaults();
    return expl::TemplateSet::from_json(read_file(config.templatePath));
}

} // namespace

void apply_config_file(RunConfig& config, const std::string& path) {
    Json j;
    try {
        j = Json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        fail(Errc::ParseError, "config file: " + std::string(e.what()));
    }
    config.inputPath = j.value("input", config.inputPath);
    config.outDir = j.value("out", config.outDir);
    if (j.contains("criterion")) config.criterion = j.at("criterion").get<std::string>();
    if (j.contains("deltas"))
        for (const auto& [qa, v] : j.at("deltas").items()) config.deltas[qa] = v.get<double>();
    config.penaltyShape = j.value("penalty", config.penaltyShape);
    config.kPrimeRatio = j.value("kprimeRatio", config.kPrimeRatio);
    config.seed = j.value("seed", config.seed);
    config.count = j.value("count", config.count);
    config.perProfile = j.value("perProfile", config.perProfile);
    config.exportLp = j.value("exportLp", config.exportLp);
    config.emitDot = j.value("dot", config.emitDot);
    config.templatePath = j.value("templates", config.templatePath);
}

int cmd_plan(const RunConfig& config) {
    return guarded(config, [&] {
        LoadedProblem lp = load_problem(config);
        Policy policy = solve_optimal(lp.mdp);
        PolicyValuation valuation = evaluate_policy(lp.mdp, policy);
        fs::path out(config.outDir);
        write_file(out / "policy.json", policy_to_json_obj(lp.mdp, policy).dump(2) + "\n");
        write_file(out / "valuation.json",
                   valuation_to_json_obj(lp.mdp, valuation).dump(2) + "\n");
        if (config.emitDot)
            write_file(out / "solution.dot", expl::policy_dot(lp.mdp, policy, "solution"));
        if (config.verbosity > 0)
            std::cerr << "planned " << lp.problem.name << ": scalarized cost "
                      << valuation.scalarizedCost << "\n";
        return 0;
    });
}

int cmd_explain(const RunConfig& config) {
    return guarded(config, [&] {
        LoadedProblem lp = load_problem(config);
        Policy policy = solve_optimal(lp.mdp);
        PolicyValuation valuation = evaluate_policy(lp.mdp, policy);
        alt::GenerateOptions options = make_options(config, lp.mdp);
        alt::GenerateOutcome outcome = alt::generate_alternatives(lp.mdp, policy, valuation, options);
        for (const auto& warning : outcome.warnings) std::cerr << "warning: " << warning << "\n";

        expl::TemplateSet templates = load_templates(config);
        expl::Explanation explanation = expl::render_contrastive(
            lp.mdp, valuation, outcome.lowerBounds, outcome.alternatives,
            lp.problem.vocabulary, templates);

        fs::path out(config.outDir);
        write_file(out / "policy.json", policy_to_json_obj(lp.mdp, policy).dump(2) + "\n");
        write_file(out / "valuation.json",
                   valuation_to_json_obj(lp.mdp, valuation).dump(2) + "\n");
        write_file(out / "explanation.txt", explanation.text);
        Json bundle = explanation_to_json_obj(explanation);
        Json alternatives = Json::array();
        for (const auto& a : outcome.alternatives)
            alternatives.push_back(alternative_to_json_obj(lp.mdp, a));
        bundle["alternatives"] = alternatives;
        write_file(out / "explanation.json", bundle.dump(2) + "\n");
        for (const auto& a : outcome.alternatives) {
            const std::string& qaName = lp.mdp.problem->qas[static_cast<size_t>(a.targetQa)].name;
            write_file(out / ("alternative_" + qaName + ".json"),
                       alternative_to_json_obj(lp.mdp, a).dump(2) + "\n");
            if (config.emitDot)
                write_file(out / ("alternative_" + qaName + ".dot"),
                           expl::policy_dot(lp.mdp, a.policy, "alternative " + qaName));
        }
        if (config.exportLp)
            for (const auto& [qi, text] : outcome.lpTexts)
                write_file(out / (lp.mdp.problem->qas[static_cast<size_t>(qi)].name + ".lp"), text);
        if (config.emitDot)
            write_file(out / "solution.dot", expl::policy_dot(lp.mdp, policy, "solution"));
        std::cout << explanation.text;
        return 0;
    });
}

int cmd_scenarios(const RunConfig& config) {
    return guarded(config, [&] {
        robotnav::ScenarioConfig scenarioConfig;
        scenarioConfig.perProfile = config.perProfile;
        std::vector<robotnav::Scenario> scenarios =
            robotnav::generate_scenarios(config.seed, config.count, scenarioConfig);
        fs::path out(config.outDir);
        Json index;
        index["seed"] = config.seed;
        index["count"] = config.count;
        index["perProfile"] = config.perProfile;
        Json files = Json::array();
        for (const auto& sc : scenarios) {
            std::string file = sc.id + ".json";
            write_file(out / file, robotnav::scenario_to_json_obj(sc).dump(2) + "\n");
            files.push_back(Json{{"file", file},
                                 {"label", robotnav::to_string(sc.label)},
                                 {"alternatives", sc.alternativeCount}});
        }
        index["scenarios"] = files;
        write_file(out / "index.json", index.dump(2) + "\n");
        if (config.verbosity > 0)
            std::cerr << "wrote " << scenarios.size() << " scenarios to " << config.outDir << "\n";
        return 0;
    });
}

int cmd_verify(const RunConfig& config) {
    return guarded(config, [&] {
        std::vector<fs::path> files;
        fs::path input(config.inputPath);
        if (fs::is_directory(input)) input /= "index.json";
        if (input.filename() == "index.json") {
            Json index = Json::parse(read_file(input.string()));
            for (const auto& entry : index.at("scenarios"))
                files.push_back(input.parent_path() / entry.at("file").get<std::string>());
        } else {
            files.push_back(input);
        }
        robotnav::ScenarioConfig scenarioConfig;
        int mismatches = 0;
        for (const auto& file : files) {
            robotnav::Scenario sc =
                robotnav::scenario_from_json_obj(Json::parse(read_file(file.string())));
            robotnav::ScenarioLabel recomputed = oracle::verify_scenario(sc, scenarioConfig);
            if (recomputed != sc.label) {
                ++mismatches;
                std::cerr << "label mismatch in " << file.string() << ": stored "
                          << robotnav::to_string(sc.label) << ", recomputed "
                          << robotnav::to_string(recomputed) << "\n";
            } else if (config.verbosity > 0) {
                std::cerr << file.filename().string() << ": " << robotnav::to_string(sc.label)
                          << " confirmed\n";
            }
        }
        if (mismatches > 0) return 4;
        std::cout << "verified " << files.size() << " scenario(s)\n";
        return 0;
    });
}

int cmd_export_lp(const RunConfig& config) {
    return guarded(config, [&] {
        LoadedProblem lp = load_problem(config);
        Policy policy = solve_optimal(lp.mdp);
        PolicyValuation valuation = evaluate_policy(lp.mdp, policy);
        alt::GenerateOptions options = make_options(config, lp.mdp);
        options.exportLp = true;
        alt::GenerateOutcome outcome = alt::generate_alternatives(lp.mdp, policy, valuation, options);
        for (const auto& warning : outcome.warnings) std::cerr << "warning: " << warning << "\n";
        fs::path out(config.outDir);
        int written = 0;
        for (const auto& [qi, text] : outcome.lpTexts) {
            write_file(out / (lp.mdp.problem->qas[static_cast<size_t>(qi)].name + ".lp"), text);
            ++written;
        }
        std::cout << "wrote " << written << " LP file(s) to " << config.outDir << "\n";
        return 0;
    });
}

} // namespace xmdp::cli
