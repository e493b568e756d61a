#pragma once

#include "support/rng.hpp"
#include "xmdp/problem.hpp"

#include <string>
#include <vector>

namespace testsupport {

/// A flat-state problem skeleton: one variable "s" over n values with
/// per-(state, action) ground actions. Transitions and QA values are filled
/// by the callers.
inline xmdp::Problem flat_skeleton(int n, const std::string& name) {
    xmdp::Problem p;
    p.name = name;
    xmdp::StateVariable v;
    v.name = "s";
    for (int i = 0; i < n; ++i) v.values.push_back("s" + std::to_string(i));
    p.variables.push_back(std::move(v));
    return p;
}

inline std::string sname(int i) { return "s" + std::to_string(i); }

/// Adds one ground action at state `from` with the given outcome targets and
/// constant QA values (one per declared QA).
inline void add_flat_action(xmdp::Problem& p, int from, int slotLabel,
                            const std::vector<std::pair<int, double>>& outcomes,
                            const std::vector<double>& qaValues) {
    const std::string actionName = "a" + std::to_string(slotLabel) + "@" + sname(from);
    xmdp::GroundAction a;
    a.name = actionName;
    a.pre["s"] = {sname(from)};
    for (const auto& [t, prob] : outcomes) {
        xmdp::Outcome o;
        o.prob = prob;
        o.assign["s"] = sname(t);
        a.outcomes.push_back(std::move(o));
    }
    p.actions.push_back(std::move(a));
    // register QA rows for this action as table entries (QAs beyond the
    // provided values, e.g. event-based ones, keep their own functions)
    for (size_t qi = 0; qi < p.qas.size() && qi < qaValues.size(); ++qi) {
        xmdp::TableRow row;
        row.when.push_back({"action.name", {xmdp::AttrValue(actionName)}});
        row.value = xmdp::Expr::parse(std::to_string(qaValues[qi]));
        auto& qa = p.qas[qi];
        std::vector<xmdp::TableRow> rows = qa.value.rows();
        double fallback = qa.value.kind() == xmdp::ValueFn::Kind::Table ? qa.value.fallback() : 0.0;
        rows.push_back(std::move(row));
        qa.value = xmdp::ValueFn::table(std::move(rows), fallback);
    }
}

inline void declare_standard_qas(xmdp::Problem& p, int count, Rng* rng = nullptr) {
    for (int qi = 0; qi < count; ++qi) {
        const std::string qaName = "qa" + std::to_string(qi);
        xmdp::QaSpec qa;
        qa.name = qaName;
        qa.kind = xmdp::QaKind::Standard;
        qa.unit = {"unit", "units"};
        qa.value = xmdp::ValueFn::table({}, 0.0);
        p.qas.push_back(std::move(qa));
        p.scalarization.weights[qaName] = rng ? rng->uniform(0.2, 2.0) : 1.0;
    }
    p.scalarization.mode = xmdp::ScalarizationProfile::Mode::Identity;
}

/// Random total-cost instance: <= maxStates states, <= maxActs actions per
/// state, 2-3 standard QAs. State n-1 is the absorbing goal; action 0 always
/// moves one step toward it so the whole chain is reachable and some proper
/// policy exists.
inline xmdp::Problem random_total_cost_problem(uint64_t seed, int maxStates = 6, int maxActs = 3,
                                               bool allowZeroCosts = true) {
    Rng rng(seed);
    int n = rng.uniform_int(3, maxStates);
    int m = rng.uniform_int(1, maxActs);
    xmdp::Problem p = flat_skeleton(n, "random-tc-" + std::to_string(seed));
    declare_standard_qas(p, rng.uniform_int(2, 3), &rng);

    auto qa_row = [&](int) {
        std::vector<double> vals;
        for (size_t qi = 0; qi < p.qas.size(); ++qi) {
            double v = rng.uniform(0.0, 5.0);
            if (allowZeroCosts && rng.chance(0.15)) v = 0.0;
            vals.push_back(v);
        }
        return vals;
    };

    for (int s = 0; s < n - 1; ++s) {
        for (int j = 0; j < m; ++j) {
            std::vector<std::pair<int, double>> outcomes;
            if (j == 0) {
                // goal-directed: step forward with high probability
                double pf = 0.6 + 0.4 * rng.uniform();
                outcomes.emplace_back(s + 1, pf);
                outcomes.emplace_back(rng.uniform_int(0, n - 1), 1.0 - pf);
                if (outcomes[1].first == s + 1) outcomes[1].first = s; // keep targets distinct
            } else {
                int k = rng.uniform_int(1, 2);
                double w0 = rng.uniform(0.2, 1.0);
                double w1 = k == 2 ? rng.uniform(0.2, 1.0) : 0.0;
                double total = w0 + w1;
                outcomes.emplace_back(rng.uniform_int(0, n - 1), w0 / total);
                if (k == 2) {
                    int t1 = rng.uniform_int(0, n - 1);
                    if (t1 == outcomes[0].first) t1 = (t1 + 1) % n;
                    outcomes.emplace_back(t1, w1 / total);
                }
            }
            add_flat_action(p, s, j, outcomes, qa_row(s));
        }
    }
    xmdp::TotalCostCriterion crit;
    crit.goals.push_back({{"s", sname(n - 1)}});
    crit.initial = {{"s", sname(0)}};
    p.criterion = crit;
    return p;
}

/// Random average-cost instance that is unichain under every policy: each
/// action reaches state 0 with probability at least 0.1.
inline xmdp::Problem random_unichain_problem(uint64_t seed, int maxStates = 5, int maxActs = 3) {
    Rng rng(seed);
    int n = rng.uniform_int(2, maxStates);
    int m = rng.uniform_int(1, maxActs);
    xmdp::Problem p = flat_skeleton(n, "random-avg-" + std::to_string(seed));
    declare_standard_qas(p, rng.uniform_int(2, 3), &rng);

    for (int s = 0; s < n; ++s) {
        for (int j = 0; j < m; ++j) {
            double toZero = rng.uniform(0.1, 0.5);
            int other = rng.uniform_int(0, n - 1);
            std::vector<std::pair<int, double>> outcomes;
            if (other == 0) {
                outcomes.emplace_back(0, 1.0);
            } else {
                outcomes.emplace_back(0, toZero);
                outcomes.emplace_back(other, 1.0 - toZero);
            }
            std::vector<double> vals;
            for (size_t qi = 0; qi < p.qas.size(); ++qi) vals.push_back(rng.uniform(0.0, 5.0));
            add_flat_action(p, s, j, outcomes, vals);
        }
    }
    xmdp::AverageCostCriterion crit;
    crit.initial.push_back({{{"s", sname(0)}}, 1.0});
    p.criterion = crit;
    return p;
}

} // namespace testsupport
