#include "xmdp/alternatives.hpp"

#include "xmdp/milp/lp_format.hpp"
#include "xmdp/milp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace xmdp::alt {

namespace {

constexpr double kMeasureTol = 1e-9; // support threshold for recovery

std::string state_tag(const ExplicitMdp& mdp, int s) {
    (void)mdp;
    return "s" + std::to_string(s);
}

/// Objective coefficient sum_{j != i} k_j C_j(s,a) + kPrime C_i(s,a) with the
/// normalized per-epoch costs C_j = scale_j QA_j + offset_j.
double reweighted_cost(const ExplicitMdp& mdp, const ExplicitAction& ea, int targetQa,
                       double kPrime) {
    double c = 0.0;
    for (int j = 0; j < mdp.qa_count(); ++j) {
        double weight = j == targetQa ? kPrime : mdp.scal.weight[static_cast<size_t>(j)];
        c += weight * (mdp.scal.scale[static_cast<size_t>(j)] * ea.qa[static_cast<size_t>(j)] +
                       mdp.scal.offset[static_cast<size_t>(j)]);
    }
    return c;
}

void check_nonnegative_costs(const milp::MilpModel& model) {
    for (double c : model.objective)
        require(c >= -1e-12, Errc::InvalidArgument,
                "per-epoch normalized costs must be nonnegative for the occupation-measure MILP");
}

} // namespace

void PenaltySpec::validate() const {
    require(violationUpperBound > 0.0, Errc::InvalidArgument,
            "penalty violation upper bound must be positive");
    switch (shape) {
    case Shape::Linear:
        require(slope >= 0.0, Errc::NonconvexPenalty,
                "a decreasing linear penalty rewards violation");
        break;
    case Shape::Quadratic:
        require(segments >= 1, Errc::InvalidArgument, "quadratic penalty needs >= 1 segment");
        require(coefficient >= 0.0, Errc::NonconvexPenalty,
                "a negative quadratic coefficient makes segment slopes decrease");
        break;
    }
}

void AlternativeQuery::validate(const ExplicitMdp& mdp) const {
    require(qa >= 0 && qa < mdp.qa_count(), Errc::InvalidArgument, "query QA index out of range");
    require(delta > 0.0, Errc::InvalidArgument, "improvement margin delta must be positive");
    require(theta < solutionValue, Errc::InvalidArgument,
            "theta must lie strictly below the solution value");
    double k = mdp.scal.weight[static_cast<size_t>(qa)];
    require(kPrime > 0.0 && kPrime < k, Errc::InvalidArgument,
            "kPrime must be positive and smaller than the original weight");
    require(flowBound > 0.0, Errc::InvalidArgument, "flow bound X must be positive");
    if (penalty) penalty->validate();
}

milp::MilpModel build_total_cost_milp(const ExplicitMdp& mdp, const AlternativeQuery& query) {
    require(mdp.totalCost, Errc::InvalidArgument, "Eqn-1 model needs a total-cost criterion");
    query.validate(mdp);

    milp::MilpModel model;
    model.name = mdp.problem->name + " improve " +
                 mdp.problem->qas[static_cast<size_t>(query.qa)].name;

    int n = mdp.state_count();
    // x_sa in state-major order, then the matching binaries
    std::vector<std::vector<int>> xVar(static_cast<size_t>(n));
    for (int s = 0; s < n; ++s) {
        const auto& as = mdp.acts[static_cast<size_t>(s)];
        xVar[static_cast<size_t>(s)].resize(as.size(), -1);
        for (size_t slot = 0; slot < as.size(); ++slot) {
            milp::VarTag tag{milp::VarTag::Role::FlowX, s, static_cast<int>(slot)};
            xVar[static_cast<size_t>(s)][slot] = model.add_var(
                "x_" + state_tag(mdp, s) + "_a" + std::to_string(slot), 0.0, milp::kInfinity,
                milp::VarKind::Continuous, reweighted_cost(mdp, as[slot], query.qa, query.kPrime),
                tag);
        }
    }
    std::vector<std::vector<int>> dVar(static_cast<size_t>(n));
    for (int s = 0; s < n; ++s) {
        const auto& as = mdp.acts[static_cast<size_t>(s)];
        dVar[static_cast<size_t>(s)].resize(as.size(), -1);
        for (size_t slot = 0; slot < as.size(); ++slot) {
            milp::VarTag tag{milp::VarTag::Role::PickX, s, static_cast<int>(slot)};
            dVar[static_cast<size_t>(s)][slot] =
                model.add_var("dx_" + state_tag(mdp, s) + "_a" + std::to_string(slot), 0.0, 1.0,
                              milp::VarKind::Binary, 0.0, tag);
        }
    }
    check_nonnegative_costs(model);

    // inflow terms per target state: in(s) = sum_{s',a} x_{s'a} P(s|s',a)
    std::vector<std::vector<std::pair<int, double>>> inflow(static_cast<size_t>(n));
    for (int s = 0; s < n; ++s) {
        const auto& as = mdp.acts[static_cast<size_t>(s)];
        for (size_t slot = 0; slot < as.size(); ++slot)
            for (const auto& [t, prob] : as[slot].succ)
                if (prob > 0.0)
                    inflow[static_cast<size_t>(t)].emplace_back(xVar[static_cast<size_t>(s)][slot],
                                                                prob);
    }
    auto conservation_terms = [&](int s) {
        std::vector<std::pair<int, double>> terms;
        for (int j : xVar[static_cast<size_t>(s)]) terms.emplace_back(j, 1.0);
        for (const auto& [j, p] : inflow[static_cast<size_t>(s)]) terms.emplace_back(j, -p);
        return terms;
    };

    // flow conservation outside G and s0
    for (int s = 0; s < n; ++s) {
        if (s == mdp.s0 || mdp.goal[static_cast<size_t>(s)]) continue;
        model.add_constraint("flow_" + state_tag(mdp, s), conservation_terms(s), milp::Sense::Eq,
                             0.0);
    }
    // unit source
    model.add_constraint("src", conservation_terms(mdp.s0), milp::Sense::Eq,
                         mdp.goal[static_cast<size_t>(mdp.s0)] ? 0.0 : 1.0);
    // unit goal inflow
    {
        std::vector<std::pair<int, double>> terms;
        for (int g = 0; g < n; ++g)
            if (mdp.goal[static_cast<size_t>(g)])
                for (const auto& [j, p] : inflow[static_cast<size_t>(g)]) terms.emplace_back(j, p);
        model.add_constraint("goal_in", std::move(terms), milp::Sense::Eq, 1.0);
    }
    // at most one action per state
    for (int s = 0; s < n; ++s) {
        if (mdp.acts[static_cast<size_t>(s)].empty()) continue;
        std::vector<std::pair<int, double>> terms;
        for (int j : dVar[static_cast<size_t>(s)]) terms.emplace_back(j, 1.0);
        model.add_constraint("pick_" + state_tag(mdp, s), std::move(terms), milp::Sense::Le, 1.0);
    }
    // linking x/X <= Delta
    for (int s = 0; s < n; ++s)
        for (size_t slot = 0; slot < mdp.acts[static_cast<size_t>(s)].size(); ++slot)
            model.add_constraint(
                "link_" + state_tag(mdp, s) + "_a" + std::to_string(slot),
                {{xVar[static_cast<size_t>(s)][slot], 1.0 / query.flowBound},
                 {dVar[static_cast<size_t>(s)][slot], -1.0}},
                milp::Sense::Le, 0.0);
    // QA-i cap
    {
        std::vector<std::pair<int, double>> terms;
        for (int s = 0; s < n; ++s) {
            const auto& as = mdp.acts[static_cast<size_t>(s)];
            for (size_t slot = 0; slot < as.size(); ++slot) {
                double q = as[slot].qa[static_cast<size_t>(query.qa)];
                if (q != 0.0) terms.emplace_back(xVar[static_cast<size_t>(s)][slot], q);
            }
        }
        model.add_constraint("qa_cap", std::move(terms), milp::Sense::Le, query.theta);
    }
    if (query.penalty) apply_soft_constraint(model, query);
    return model;
}

milp::MilpModel build_average_cost_milp(const ExplicitMdp& mdp, const AlternativeQuery& query) {
    require(!mdp.totalCost, Errc::InvalidArgument, "Eqn-2 model needs an average-cost criterion");
    query.validate(mdp);
    const double X = 1.0, Y = 1.0;

    milp::MilpModel model;
    model.name = mdp.problem->name + " improve " +
                 mdp.problem->qas[static_cast<size_t>(query.qa)].name;

    int n = mdp.state_count();
    std::vector<std::vector<int>> xVar(static_cast<size_t>(n)), yVar(static_cast<size_t>(n)),
        dxVar(static_cast<size_t>(n)), dyVar(static_cast<size_t>(n));
    for (int s = 0; s < n; ++s) {
        const auto& as = mdp.acts[static_cast<size_t>(s)];
        for (size_t slot = 0; slot < as.size(); ++slot)
            xVar[static_cast<size_t>(s)].push_back(model.add_var(
                "x_" + state_tag(mdp, s) + "_a" + std::to_string(slot), 0.0, milp::kInfinity,
                milp::VarKind::Continuous, reweighted_cost(mdp, as[slot], query.qa, query.kPrime),
                {milp::VarTag::Role::FlowX, s, static_cast<int>(slot)}));
    }
    for (int s = 0; s < n; ++s) {
        const auto& as = mdp.acts[static_cast<size_t>(s)];
        for (size_t slot = 0; slot < as.size(); ++slot)
            yVar[static_cast<size_t>(s)].push_back(
                model.add_var("y_" + state_tag(mdp, s) + "_a" + std::to_string(slot), 0.0,
                              milp::kInfinity, milp::VarKind::Continuous, 0.0,
                              {milp::VarTag::Role::FlowY, s, static_cast<int>(slot)}));
    }
    for (int s = 0; s < n; ++s)
        for (size_t slot = 0; slot < mdp.acts[static_cast<size_t>(s)].size(); ++slot)
            dxVar[static_cast<size_t>(s)].push_back(
                model.add_var("dx_" + state_tag(mdp, s) + "_a" + std::to_string(slot), 0.0, 1.0,
                              milp::VarKind::Binary, 0.0,
                              {milp::VarTag::Role::PickX, s, static_cast<int>(slot)}));
    for (int s = 0; s < n; ++s)
        for (size_t slot = 0; slot < mdp.acts[static_cast<size_t>(s)].size(); ++slot)
            dyVar[static_cast<size_t>(s)].push_back(
                model.add_var("dy_" + state_tag(mdp, s) + "_a" + std::to_string(slot), 0.0, 1.0,
                              milp::VarKind::Binary, 0.0,
                              {milp::VarTag::Role::PickY, s, static_cast<int>(slot)}));
    check_nonnegative_costs(model);

    auto inflow_terms = [&](const std::vector<std::vector<int>>& family, int target) {
        std::vector<std::pair<int, double>> terms;
        for (int s = 0; s < n; ++s) {
            const auto& as = mdp.acts[static_cast<size_t>(s)];
            for (size_t slot = 0; slot < as.size(); ++slot)
                for (const auto& [t, prob] : as[slot].succ)
                    if (t == target && prob > 0.0)
                        terms.emplace_back(family[static_cast<size_t>(s)][slot], prob);
        }
        return terms;
    };

    // out_x(s) - in_x(s) = 0
    for (int s = 0; s < n; ++s) {
        std::vector<std::pair<int, double>> terms;
        for (int j : xVar[static_cast<size_t>(s)]) terms.emplace_back(j, 1.0);
        for (const auto& [j, p] : inflow_terms(xVar, s)) terms.emplace_back(j, -p);
        model.add_constraint("xflow_" + state_tag(mdp, s), std::move(terms), milp::Sense::Eq, 0.0);
    }
    // out_x(s) + out_y(s) - in_y(s) = alpha_s
    for (int s = 0; s < n; ++s) {
        std::vector<std::pair<int, double>> terms;
        for (int j : xVar[static_cast<size_t>(s)]) terms.emplace_back(j, 1.0);
        for (int j : yVar[static_cast<size_t>(s)]) terms.emplace_back(j, 1.0);
        for (const auto& [j, p] : inflow_terms(yVar, s)) terms.emplace_back(j, -p);
        model.add_constraint("alpha_" + state_tag(mdp, s), std::move(terms), milp::Sense::Eq,
                             mdp.alpha[static_cast<size_t>(s)]);
    }
    auto add_pick_link = [&](const char* pickPrefix, const char* linkPrefix,
                             const std::vector<std::vector<int>>& flow,
                             const std::vector<std::vector<int>>& pick, double bound) {
        for (int s = 0; s < n; ++s) {
            if (mdp.acts[static_cast<size_t>(s)].empty()) continue;
            std::vector<std::pair<int, double>> terms;
            for (int j : pick[static_cast<size_t>(s)]) terms.emplace_back(j, 1.0);
            model.add_constraint(pickPrefix + state_tag(mdp, s), std::move(terms), milp::Sense::Le,
                                 1.0);
        }
        for (int s = 0; s < n; ++s)
            for (size_t slot = 0; slot < mdp.acts[static_cast<size_t>(s)].size(); ++slot)
                model.add_constraint(linkPrefix + state_tag(mdp, s) + "_a" + std::to_string(slot),
                                     {{flow[static_cast<size_t>(s)][slot], 1.0 / bound},
                                      {pick[static_cast<size_t>(s)][slot], -1.0}},
                                     milp::Sense::Le, 0.0);
    };
    add_pick_link("pickx_", "linkx_", xVar, dxVar, X);
    add_pick_link("picky_", "linky_", yVar, dyVar, Y);

    // QA-i cap on the recurrent measure
    {
        std::vector<std::pair<int, double>> terms;
        for (int s = 0; s < n; ++s) {
            const auto& as = mdp.acts[static_cast<size_t>(s)];
            for (size_t slot = 0; slot < as.size(); ++slot) {
                double q = as[slot].qa[static_cast<size_t>(query.qa)];
                if (q != 0.0) terms.emplace_back(xVar[static_cast<size_t>(s)][slot], q);
            }
        }
        model.add_constraint("qa_cap", std::move(terms), milp::Sense::Le, query.theta);
    }
    if (query.penalty) apply_soft_constraint(model, query);
    return model;
}

void apply_soft_constraint(milp::MilpModel& model, const AlternativeQuery& query) {
    require(query.penalty.has_value(), Errc::InvalidArgument, "soft constraint needs a penalty spec");
    const PenaltySpec& spec = *query.penalty;
    spec.validate();

    int capIdx = model.constraint_index("qa_cap");
    require(capIdx >= 0, Errc::InvalidArgument, "model has no QA cap row to soften");
    std::vector<std::pair<int, double>> qaTerms = model.cons[static_cast<size_t>(capIdx)].terms;
    double theta = model.cons[static_cast<size_t>(capIdx)].rhs;

    double vmax = spec.violationUpperBound;
    int v = model.add_var("v_qa" + std::to_string(query.qa), 0.0, vmax, milp::VarKind::Continuous,
                          spec.shape == PenaltySpec::Shape::Linear ? spec.slope : 0.0,
                          {milp::VarTag::Role::Violation, -1, -1});

    // replace the hard cap by the soft triple, keeping its position
    std::vector<milp::Constraint> rebuilt;
    for (int i = 0; i < static_cast<int>(model.cons.size()); ++i) {
        if (i != capIdx) {
            rebuilt.push_back(std::move(model.cons[static_cast<size_t>(i)]));
            continue;
        }
        milp::Constraint capD;
        capD.name = "qa_cap_d";
        capD.terms = qaTerms;
        capD.sense = milp::Sense::Le;
        capD.rhs = query.solutionValue;
        rebuilt.push_back(std::move(capD));

        milp::Constraint capSoft;
        capSoft.name = "qa_cap_soft";
        capSoft.terms = qaTerms;
        capSoft.terms.emplace_back(v, -1.0);
        capSoft.sense = milp::Sense::Le;
        capSoft.rhs = theta;
        rebuilt.push_back(std::move(capSoft));

        milp::Constraint vNonneg;
        vNonneg.name = "v_nonneg";
        vNonneg.terms = {{v, -1.0}};
        vNonneg.sense = milp::Sense::Le;
        vNonneg.rhs = 0.0;
        rebuilt.push_back(std::move(vNonneg));
    }
    model.cons = std::move(rebuilt);

    if (spec.shape == PenaltySpec::Shape::Quadratic) {
        // v = sum of segments; secant slopes of c v^2 are increasing, so the
        // LP fills the segments in order and the sum reproduces the quadratic
        // at the segment ends
        double h = vmax / spec.segments;
        std::vector<std::pair<int, double>> defTerms{{v, 1.0}};
        for (int k = 0; k < spec.segments; ++k) {
            double slope = spec.coefficient * h * (2 * k + 1);
            int w = model.add_var("w" + std::to_string(k) + "_qa" + std::to_string(query.qa), 0.0,
                                  h, milp::VarKind::Continuous, slope,
                                  {milp::VarTag::Role::PenaltySegment, -1, k});
            defTerms.emplace_back(w, -1.0);
        }
        model.add_constraint("v_def_qa" + std::to_string(query.qa), std::move(defTerms),
                             milp::Sense::Eq, 0.0);
    }
}

void strip_unreachable_flow(const milp::MilpModel& model, const ExplicitMdp& mdp,
                            milp::MilpSolution& solution) {
    require(mdp.totalCost, Errc::InvalidArgument, "flow stripping applies to Eqn-1 solutions");
    if (solution.status != milp::SolveStatus::Optimal) return;
    int n = mdp.state_count();
    std::vector<std::vector<int>> xVar(static_cast<size_t>(n));
    for (size_t j = 0; j < model.vars.size(); ++j) {
        const milp::VarTag& tag = model.vars[j].tag;
        if (tag.role != milp::VarTag::Role::FlowX) continue;
        auto& slots = xVar[static_cast<size_t>(tag.state)];
        if (slots.size() <= static_cast<size_t>(tag.actionSlot))
            slots.resize(static_cast<size_t>(tag.actionSlot) + 1, -1);
        slots[static_cast<size_t>(tag.actionSlot)] = static_cast<int>(j);
    }
    std::vector<char> seen(static_cast<size_t>(n), 0);
    std::deque<int> queue{mdp.s0};
    seen[static_cast<size_t>(mdp.s0)] = 1;
    while (!queue.empty()) {
        int s = queue.front();
        queue.pop_front();
        for (size_t slot = 0; slot < xVar[static_cast<size_t>(s)].size(); ++slot) {
            int j = xVar[static_cast<size_t>(s)][slot];
            if (j < 0 || solution.x[static_cast<size_t>(j)] <= kMeasureTol) continue;
            for (const auto& [t, prob] : mdp.acts[static_cast<size_t>(s)][slot].succ)
                if (prob > 0.0 && !seen[static_cast<size_t>(t)]) {
                    seen[static_cast<size_t>(t)] = 1;
                    queue.push_back(t);
                }
        }
    }
    for (int s = 0; s < n; ++s) {
        if (seen[static_cast<size_t>(s)]) continue;
        for (int j : xVar[static_cast<size_t>(s)])
            if (j >= 0) solution.x[static_cast<size_t>(j)] = 0.0;
    }
}

Policy recover_policy(const milp::MilpSolution& solution, const milp::MilpModel& model,
                      const ExplicitMdp& mdp) {
    require(solution.status == milp::SolveStatus::Optimal, Errc::InvalidArgument,
            "policy recovery needs an Optimal solution");
    int n = mdp.state_count();
    std::vector<int> fromX(static_cast<size_t>(n), -1), fromY(static_cast<size_t>(n), -1);

    auto scan = [&](milp::VarTag::Role role, std::vector<int>& out) {
        for (size_t j = 0; j < model.vars.size(); ++j) {
            const milp::VarTag& tag = model.vars[j].tag;
            if (tag.role != role) continue;
            if (solution.x[j] <= kMeasureTol) continue;
            int s = tag.state;
            require(out[static_cast<size_t>(s)] < 0 || out[static_cast<size_t>(s)] == tag.actionSlot,
                    Errc::AmbiguousRecovery,
                    "two actions carry measure at state " + mdp.stateKeys[static_cast<size_t>(s)] +
                        " (MILP integrality failure)");
            out[static_cast<size_t>(s)] = tag.actionSlot;
        }
    };
    scan(milp::VarTag::Role::FlowX, fromX);
    if (!mdp.totalCost) scan(milp::VarTag::Role::FlowY, fromY);

    std::vector<int> choice(static_cast<size_t>(n), -1);
    for (int s = 0; s < n; ++s) {
        if (mdp.acts[static_cast<size_t>(s)].empty()) continue;
        if (mdp.totalCost && mdp.goal[static_cast<size_t>(s)]) continue;
        if (fromX[static_cast<size_t>(s)] >= 0)
            choice[static_cast<size_t>(s)] = fromX[static_cast<size_t>(s)]; // recurrent / on-path
        else if (fromY[static_cast<size_t>(s)] >= 0)
            choice[static_cast<size_t>(s)] = fromY[static_cast<size_t>(s)]; // transient
        else
            choice[static_cast<size_t>(s)] = 0; // no measure: canonical fallback
    }
    Policy p = make_policy(mdp, std::move(choice), Policy::Provenance::MilpAlternative);
    return p;
}

GenerateOutcome generate_alternatives(const ExplicitMdp& mdp, const Policy& solutionPolicy,
                                      const PolicyValuation& solutionValuation,
                                      const GenerateOptions& options) {
    GenerateOutcome out;
    int nq = mdp.qa_count();
    out.lowerBounds.resize(static_cast<size_t>(nq));
    for (int qi = 0; qi < nq; ++qi) out.lowerBounds[static_cast<size_t>(qi)] = per_qa_lower_bound(mdp, qi);

    // X >= every x_sa of any candidate flow; also covers the solution policy's
    // own measure so the soft model always admits it
    double flowBound = 1.0;
    if (mdp.totalCost) {
        flowBound = static_cast<double>(mdp.state_count()) / mdp.min_positive_prob();
        std::vector<double> nu = visit_counts(mdp, solutionPolicy);
        double peak = 0.0;
        for (double v : nu) peak = std::max(peak, v);
        flowBound = std::max(flowBound, 2.0 * peak);
    }

    for (int qi = 0; qi < nq; ++qi) {
        double D = solutionValuation.qaValue[static_cast<size_t>(qi)];
        double bound = out.lowerBounds[static_cast<size_t>(qi)];
        if (D - bound <= 1e-9) continue; // already best possible

        AlternativeQuery query;
        query.qa = qi;
        query.solutionValue = D;
        auto it = options.deltas.find(qi);
        query.delta = it != options.deltas.end() ? it->second
                                                 : std::max(0.1 * (D - bound), 1e-6);
        query.theta = D - query.delta;
        double k = mdp.scal.weight[static_cast<size_t>(qi)];
        query.kPrime = options.kPrimeRatio * k;
        double scale = mdp.scal.scale[static_cast<size_t>(qi)];
        PenaltySpec penalty;
        penalty.shape = options.penaltyShape;
        penalty.violationUpperBound = query.delta;
        if (penalty.shape == PenaltySpec::Shape::Quadratic) {
            penalty.coefficient = 10.0 * k * scale * scale;
            penalty.segments = 8;
        } else {
            penalty.slope = 10.0 * k * scale;
        }
        query.penalty = penalty;
        query.flowBound = flowBound;

        const std::string qaName = mdp.problem->qas[static_cast<size_t>(qi)].name;
        try {
            milp::MilpModel model;
            milp::MilpSolution solution;
            bool solved = false;
            for (int attempt = 0; attempt < 8 && !solved; ++attempt) {
                model = mdp.totalCost ? build_total_cost_milp(mdp, query)
                                      : build_average_cost_milp(mdp, query);
                solution = milp::solve(model, options.limits);
                if (solution.status != milp::SolveStatus::Optimal) break;
                // a binding flow bound X means the bound was too tight
                bool binding = false;
                if (mdp.totalCost) {
                    for (size_t j = 0; j < model.vars.size(); ++j)
                        if (model.vars[j].tag.role == milp::VarTag::Role::FlowX &&
                            solution.x[j] >= query.flowBound * (1.0 - 1e-6))
                            binding = true;
                }
                if (binding) {
                    query.flowBound *= 2.0;
                    continue;
                }
                solved = true;
            }
            if (options.exportLp) out.lpTexts[qi] = milp::export_lp(model);
            if (!solved || solution.status != milp::SolveStatus::Optimal) {
                out.warnings.push_back("QA '" + qaName + "': solver returned " +
                                       milp::to_string(solution.status));
                continue;
            }
            if (mdp.totalCost) strip_unreachable_flow(model, mdp, solution);
            Policy policy = recover_policy(solution, model, mdp);
            policy.targetQa = qi;
            if (policy.same_decisions(mdp, solutionPolicy)) continue;
            PolicyValuation valuation = evaluate_policy(mdp, policy);
            if (valuation.qaValue[static_cast<size_t>(qi)] >= D - 1e-9) continue;

            AlternativeResult result;
            result.targetQa = qi;
            result.policy = std::move(policy);
            result.valuation = std::move(valuation);
            int vIdx = model.var_index("v_qa" + std::to_string(qi));
            result.violation = vIdx >= 0 ? solution.x[static_cast<size_t>(vIdx)] : 0.0;
            for (int j = 0; j < nq; ++j) {
                double diff = solutionValuation.qaValue[static_cast<size_t>(j)] -
                              result.valuation.qaValue[static_cast<size_t>(j)];
                if (diff > 1e-9)
                    result.gains.push_back({j, diff});
                else if (diff < -1e-9)
                    result.losses.push_back({j, -diff});
            }
            if (options.exportLp) result.lpText = milp::export_lp(model);
            out.alternatives.push_back(std::move(result));
        } catch (const Error& e) {
            out.warnings.push_back("QA '" + qaName + "': " + e.what());
        }
    }
    return out;
}

} // namespace xmdp::alt
