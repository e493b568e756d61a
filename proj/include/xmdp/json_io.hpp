#pragma once

#include "xmdp/alternatives.hpp"
#include "xmdp/explain.hpp"
#include "xmdp/problem.hpp"

#include <json.hpp>

#include <string>

namespace xmdp {

using Json = nlohmann::ordered_json;

/// Parses a problem document. Parse failures throw ParseError with
/// line/column diagnostics; structural violations throw their usual codes.
Problem problem_from_json(const std::string& text);
std::string problem_to_json(const Problem& problem);

Json problem_to_json_obj(const Problem& problem);
Problem problem_from_json_obj(const Json& j);

Json policy_to_json_obj(const ExplicitMdp& mdp, const Policy& policy);
Policy policy_from_json_obj(const ExplicitMdp& mdp, const Json& j);

Json valuation_to_json_obj(const ExplicitMdp& mdp, const PolicyValuation& valuation);
PolicyValuation valuation_from_json_obj(const ExplicitMdp& mdp, const Json& j);

Json explanation_to_json_obj(const expl::Explanation& explanation);

Json alternative_to_json_obj(const ExplicitMdp& mdp, const alt::AlternativeResult& alternative);

/// Line/column rendering for a byte offset into `text` (1-based).
std::string describe_position(const std::string& text, size_t byteOffset);

} // namespace xmdp
