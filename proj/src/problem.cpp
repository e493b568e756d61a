#include "xmdp/problem.hpp"

#include <cmath>
#include <set>

namespace xmdp {

namespace {

void check_assignment_vars(const Problem& p, const std::map<std::string, std::string>& assign,
                           const std::string& what) {
    for (const auto& [var, value] : assign) {
        int vi = p.variable_index(var);
        require(vi >= 0, Errc::InvalidArgument, what + " references unknown variable '" + var + "'");
        const auto& domain = p.variables[static_cast<size_t>(vi)].values;
        bool ok = false;
        for (const auto& v : domain) ok = ok || v == value;
        require(ok, Errc::InvalidArgument,
                what + " assigns '" + value + "' outside the domain of '" + var + "'");
    }
}

} // namespace

int Problem::variable_index(const std::string& n) const {
    for (size_t i = 0; i < variables.size(); ++i)
        if (variables[i].name == n) return static_cast<int>(i);
    return -1;
}

int Problem::qa_index(const std::string& n) const {
    for (size_t i = 0; i < qas.size(); ++i)
        if (qas[i].name == n) return static_cast<int>(i);
    return -1;
}

void Problem::validate() const {
    require(!variables.empty(), Errc::InvalidArgument, "problem has no state variables");
    require(!actions.empty(), Errc::InvalidArgument, "problem has no actions");
    require(!qas.empty(), Errc::InvalidArgument, "problem has no quality attributes");

    std::set<std::string> varNames;
    for (const auto& v : variables) {
        require(varNames.insert(v.name).second, Errc::InvalidArgument,
                "duplicate state variable '" + v.name + "'");
        require(!v.values.empty(), Errc::InvalidArgument, "variable '" + v.name + "' has empty domain");
        std::set<std::string> seen;
        for (const auto& val : v.values)
            require(seen.insert(val).second, Errc::InvalidArgument,
                    "duplicate domain value '" + val + "' in variable '" + v.name + "'");
        if (!v.type.empty()) {
            auto it = types.find(v.type);
            require(it != types.end(), Errc::InvalidArgument,
                    "variable '" + v.name + "' has unknown type '" + v.type + "'");
            // every attribute must cover the full domain
            for (const auto& [attr, perValue] : it->second.attributes)
                for (const auto& val : v.values)
                    require(perValue.count(val) > 0, Errc::UndefinedAttribute,
                            "type '" + v.type + "' attribute '" + attr + "' lacks a value for '" +
                                val + "'");
        }
    }

    std::set<std::string> actionNames;
    for (const auto& a : actions) {
        require(actionNames.insert(a.name).second, Errc::InvalidArgument,
                "duplicate action '" + a.name + "'");
        if (!a.type.empty()) {
            auto it = actionTypes.find(a.type);
            require(it != actionTypes.end(), Errc::InvalidArgument,
                    "action '" + a.name + "' has unknown type '" + a.type + "'");
            for (const auto& attr : it->second.attributes)
                require(a.attributes.count(attr) > 0, Errc::UndefinedAttribute,
                        "action '" + a.name + "' is missing attribute '" + attr + "' of type '" +
                            a.type + "'");
        }
        for (const auto& [var, allowed] : a.pre) {
            require(variable_index(var) >= 0, Errc::InvalidArgument,
                    "action '" + a.name + "' precondition references unknown variable '" + var + "'");
            require(!allowed.empty(), Errc::InvalidArgument,
                    "action '" + a.name + "' has an empty allowed-value list for '" + var + "'");
        }
        require(!a.outcomes.empty(), Errc::InvalidTransition,
                "action '" + a.name + "' has no outcomes");
        double total = 0.0;
        for (const auto& o : a.outcomes) {
            require(o.prob > 0.0, Errc::InvalidTransition,
                    "action '" + a.name + "' has a nonpositive outcome probability");
            check_assignment_vars(*this, o.assign, "action '" + a.name + "' outcome");
            total += o.prob;
        }
        require(std::abs(total - 1.0) <= 1e-9, Errc::InvalidTransition,
                "action '" + a.name + "' outcome probabilities sum to " + std::to_string(total));
    }

    std::set<std::string> qaNames;
    for (const auto& qa : qas) {
        require(qaNames.insert(qa.name).second, Errc::InvalidArgument,
                "duplicate QA '" + qa.name + "'");
        if (qa.kind == QaKind::NonStandard) {
            require(!qa.events.empty(), Errc::InvalidArgument,
                    "non-standard QA '" + qa.name + "' declares no events");
            double prev = -std::numeric_limits<double>::infinity();
            std::set<std::string> eventNames;
            for (const auto& e : qa.events) {
                require(eventNames.insert(e.name).second, Errc::InvalidArgument,
                        "duplicate event '" + e.name + "' in QA '" + qa.name + "'");
                require(e.penalty > prev, Errc::InvalidArgument,
                        "QA '" + qa.name + "' penalties must strictly increase with severity");
                require(e.penalty >= 0.0, Errc::InvalidArgument,
                        "QA '" + qa.name + "' has a negative penalty");
                prev = e.penalty;
            }
        }
        if (qa.kind == QaKind::EventCount)
            require(!qa.eventName.empty(), Errc::InvalidArgument,
                    "event-count QA '" + qa.name + "' has no event name");
    }

    for (const auto& qa : qas) {
        auto it = scalarization.weights.find(qa.name);
        require(it != scalarization.weights.end(), Errc::InvalidArgument,
                "no scalarization weight for QA '" + qa.name + "'");
        require(it->second > 0.0, Errc::InvalidArgument,
                "scalarization weight for QA '" + qa.name + "' must be positive");
        if (scalarization.mode == ScalarizationProfile::Mode::Explicit) {
            auto nit = scalarization.normalizers.find(qa.name);
            require(nit != scalarization.normalizers.end(), Errc::InvalidArgument,
                    "missing explicit normalizer for QA '" + qa.name + "'");
            require(nit->second.scale > 0.0, Errc::InvalidArgument,
                    "normalizer scale for QA '" + qa.name + "' must be positive");
        }
    }

    if (const auto* tc = std::get_if<TotalCostCriterion>(&criterion)) {
        require(!tc->goals.empty(), Errc::InvalidArgument, "total-cost criterion has no goal set");
        for (const auto& g : tc->goals) check_assignment_vars(*this, g, "goal condition");
        require(tc->initial.size() == variables.size(), Errc::InvalidArgument,
                "initial state must assign every variable");
        check_assignment_vars(*this, tc->initial, "initial state");
    } else {
        const auto& ac = std::get<AverageCostCriterion>(criterion);
        require(!ac.initial.empty(), Errc::InvalidArgument, "average-cost criterion has empty alpha");
        double total = 0.0;
        for (const auto& [assign, prob] : ac.initial) {
            require(prob > 0.0, Errc::InvalidArgument, "alpha entries must be positive");
            require(assign.size() == variables.size(), Errc::InvalidArgument,
                    "alpha states must assign every variable");
            check_assignment_vars(*this, assign, "alpha state");
            total += prob;
        }
        require(std::abs(total - 1.0) <= 1e-9, Errc::InvalidArgument,
                "alpha sums to " + std::to_string(total));
    }
}

} // namespace xmdp
