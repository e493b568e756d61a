#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "xmdp/alternatives.hpp"
#include "xmdp/milp/solver.hpp"
#include "xmdp/oracle.hpp"

#include "support/instances.hpp"

#include <cmath>

using namespace xmdp;
using namespace xmdp::alt;
using testsupport::add_flat_action;
using testsupport::declare_standard_qas;
using testsupport::flat_skeleton;
using testsupport::sname;

namespace {

/// 3-state total-cost instance with 2 actions everywhere (the goal keeps two
/// absorbing self-loops so every state carries the full action count).
Problem three_state_two_action() {
    Problem p = flat_skeleton(3, "count-example");
    declare_standard_qas(p, 2);
    add_flat_action(p, 0, 0, {{1, 1.0}}, {1.0, 2.0});
    add_flat_action(p, 0, 1, {{2, 1.0}}, {4.0, 1.0});
    add_flat_action(p, 1, 0, {{2, 1.0}}, {1.0, 2.0});
    add_flat_action(p, 1, 1, {{2, 1.0}}, {2.0, 0.5});
    add_flat_action(p, 2, 0, {{2, 1.0}}, {0.0, 0.0});
    add_flat_action(p, 2, 1, {{2, 1.0}}, {0.0, 0.0});
    TotalCostCriterion crit;
    crit.goals.push_back({{"s", sname(2)}});
    crit.initial = {{"s", sname(0)}};
    p.criterion = crit;
    return p;
}

AlternativeQuery basic_query(const ExplicitMdp& mdp, int qa, double D, double delta,
                             bool soft = false) {
    AlternativeQuery q;
    q.qa = qa;
    q.solutionValue = D;
    q.delta = delta;
    q.theta = D - delta;
    q.kPrime = 0.01 * mdp.scal.weight[static_cast<size_t>(qa)];
    q.flowBound = 100.0;
    if (soft) {
        PenaltySpec spec;
        spec.shape = PenaltySpec::Shape::Quadratic;
        spec.coefficient = 10.0 * mdp.scal.weight[static_cast<size_t>(qa)];
        spec.segments = 8;
        spec.violationUpperBound = delta;
        q.penalty = spec;
    }
    return q;
}

double goal_inflow(const milp::MilpModel& model, const milp::MilpSolution& sol,
                   const ExplicitMdp& mdp) {
    double inflow = 0.0;
    for (size_t j = 0; j < model.vars.size(); ++j) {
        const milp::VarTag& tag = model.vars[j].tag;
        if (tag.role != milp::VarTag::Role::FlowX) continue;
        for (const auto& [t, prob] :
             mdp.acts[static_cast<size_t>(tag.state)][static_cast<size_t>(tag.actionSlot)].succ)
            if (mdp.goal[static_cast<size_t>(t)]) inflow += sol.x[j] * prob;
    }
    return inflow;
}

} // namespace

TEST_CASE("Eqn-1 model has the documented variable and constraint counts") {
    ExplicitMdp mdp = compile(three_state_two_action());
    AlternativeQuery q = basic_query(mdp, 0, 2.0, 0.5);
    milp::MilpModel model = build_total_cost_milp(mdp, q);

    int continuous = 0, binary = 0;
    for (const auto& v : model.vars)
        (v.kind == milp::VarKind::Binary ? binary : continuous) += 1;
    CHECK(continuous == 6);
    CHECK(binary == 6);
    // (|S| - |G u {s0}|) + 1 + 1 + |S| + |S||A| + 1 = 1+1+1+3+6+1
    CHECK(model.cons.size() == 13);
}

TEST_CASE("solved Eqn-1 flow equals the recovered policy's visit counts") {
    for (uint64_t seed = 1; seed <= 15; ++seed) {
        Problem p = testsupport::random_total_cost_problem(seed);
        ExplicitMdp mdp = compile(p);
        Policy solution = solve_optimal(mdp);
        PolicyValuation val = evaluate_policy(mdp, solution);
        int qa = static_cast<int>(seed) % mdp.qa_count();
        double D = val.qaValue[static_cast<size_t>(qa)];
        double bound = per_qa_lower_bound(mdp, qa);
        if (D - bound <= 1e-9) continue;

        AlternativeQuery q = basic_query(mdp, qa, D, 0.1 * (D - bound), /*soft=*/true);
        q.flowBound = mdp.state_count() / mdp.min_positive_prob();
        milp::MilpModel model = build_total_cost_milp(mdp, q);
        milp::MilpSolution sol = milp::solve(model);
        REQUIRE(sol.status == milp::SolveStatus::Optimal);
        strip_unreachable_flow(model, mdp, sol);

        // goal inflow is exactly one
        CHECK(goal_inflow(model, sol, mdp) == doctest::Approx(1.0).epsilon(1e-9));

        Policy rec = recover_policy(sol, model, mdp);
        std::vector<double> nu = visit_counts(mdp, rec);
        std::vector<double> xPerState(static_cast<size_t>(mdp.state_count()), 0.0);
        for (size_t j = 0; j < model.vars.size(); ++j)
            if (model.vars[j].tag.role == milp::VarTag::Role::FlowX)
                xPerState[static_cast<size_t>(model.vars[j].tag.state)] += sol.x[j];
        for (int s = 0; s < mdp.state_count(); ++s) {
            if (mdp.goal[static_cast<size_t>(s)]) continue;
            INFO("seed ", seed, " state ", s);
            CHECK(xPerState[static_cast<size_t>(s)] ==
                  doctest::Approx(nu[static_cast<size_t>(s)]).epsilon(1e-6).scale(1.0));
        }

        // MILP/evaluator consistency on every QA
        PolicyValuation recVal = evaluate_policy(mdp, rec);
        for (int j = 0; j < mdp.qa_count(); ++j) {
            double viaX = 0.0;
            for (size_t vi = 0; vi < model.vars.size(); ++vi) {
                const milp::VarTag& tag = model.vars[vi].tag;
                if (tag.role != milp::VarTag::Role::FlowX) continue;
                viaX += sol.x[vi] * mdp.acts[static_cast<size_t>(tag.state)]
                                        [static_cast<size_t>(tag.actionSlot)]
                                            .qa[static_cast<size_t>(j)];
            }
            CHECK(viaX == doctest::Approx(recVal.qaValue[static_cast<size_t>(j)]).epsilon(1e-6));
        }
    }
}

TEST_CASE("at every state at most one action carries positive measure") {
    ExplicitMdp mdp = compile(three_state_two_action());
    AlternativeQuery q = basic_query(mdp, 1, 2.0, 0.4, /*soft=*/true);
    milp::MilpModel model = build_total_cost_milp(mdp, q);
    milp::MilpSolution sol = milp::solve(model);
    REQUIRE(sol.status == milp::SolveStatus::Optimal);
    std::vector<int> positives(static_cast<size_t>(mdp.state_count()), 0);
    for (size_t j = 0; j < model.vars.size(); ++j)
        if (model.vars[j].tag.role == milp::VarTag::Role::FlowX && sol.x[j] > 1e-9)
            positives[static_cast<size_t>(model.vars[j].tag.state)] += 1;
    for (int c : positives) CHECK(c <= 1);
    (void)recover_policy(sol, model, mdp); // must not throw AmbiguousRecovery
}

TEST_CASE("ambiguous measure is surfaced loudly") {
    ExplicitMdp mdp = compile(three_state_two_action());
    AlternativeQuery q = basic_query(mdp, 0, 2.0, 0.5);
    milp::MilpModel model = build_total_cost_milp(mdp, q);
    milp::MilpSolution fake;
    fake.status = milp::SolveStatus::Optimal;
    fake.x.assign(model.vars.size(), 0.0);
    fake.x[0] = 0.5; // x_s0_a0
    fake.x[1] = 0.5; // x_s0_a1
    try {
        (void)recover_policy(fake, model, mdp);
        FAIL("expected AmbiguousRecovery");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::AmbiguousRecovery);
    }
}

TEST_CASE("Eqn-2 model: alpha rows, unit recurrent mass, gain consistency") {
    // 2-state uniform alpha: right-hand sides are 0.5
    Problem p = flat_skeleton(2, "avg2");
    declare_standard_qas(p, 2);
    add_flat_action(p, 0, 0, {{1, 1.0}}, {1.0, 2.0});
    add_flat_action(p, 0, 1, {{0, 1.0}}, {3.0, 0.5});
    add_flat_action(p, 1, 0, {{0, 1.0}}, {2.0, 1.0});
    AverageCostCriterion crit;
    crit.initial.push_back({{{"s", sname(0)}}, 0.5});
    crit.initial.push_back({{{"s", sname(1)}}, 0.5});
    p.criterion = crit;
    ExplicitMdp mdp = compile(p);

    Policy solution = solve_optimal(mdp);
    PolicyValuation val = evaluate_policy(mdp, solution);
    AlternativeQuery q = basic_query(mdp, 0, val.qaValue[0] + 1.0, 0.5, /*soft=*/true);
    q.flowBound = 1.0;
    milp::MilpModel model = build_average_cost_milp(mdp, q);
    int a0 = model.constraint_index("alpha_s0");
    int a1 = model.constraint_index("alpha_s1");
    REQUIRE(a0 >= 0);
    REQUIRE(a1 >= 0);
    CHECK(model.cons[static_cast<size_t>(a0)].rhs == doctest::Approx(0.5));
    CHECK(model.cons[static_cast<size_t>(a1)].rhs == doctest::Approx(0.5));

    milp::MilpSolution sol = milp::solve(model);
    REQUIRE(sol.status == milp::SolveStatus::Optimal);
    double xTotal = 0.0;
    for (size_t j = 0; j < model.vars.size(); ++j)
        if (model.vars[j].tag.role == milp::VarTag::Role::FlowX) xTotal += sol.x[j];
    CHECK(xTotal == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("Eqn-2 recovery reads transient states from y and matches the gain") {
    Problem p = flat_skeleton(3, "avg-transient");
    declare_standard_qas(p, 2);
    add_flat_action(p, 0, 0, {{1, 1.0}}, {1.0, 1.0}); // transient exits
    add_flat_action(p, 0, 1, {{2, 1.0}}, {2.0, 2.0});
    add_flat_action(p, 1, 0, {{2, 1.0}}, {1.0, 3.0}); // 2-cycle
    add_flat_action(p, 2, 0, {{1, 1.0}}, {3.0, 1.0});
    AverageCostCriterion crit;
    crit.initial.push_back({{{"s", sname(0)}}, 1.0});
    p.criterion = crit;
    ExplicitMdp mdp = compile(p);

    AlternativeQuery q = basic_query(mdp, 0, 10.0, 1.0, /*soft=*/true);
    q.flowBound = 1.0;
    milp::MilpModel model = build_average_cost_milp(mdp, q);
    milp::MilpSolution sol = milp::solve(model);
    REQUIRE(sol.status == milp::SolveStatus::Optimal);
    Policy rec = recover_policy(sol, model, mdp);

    // the start state is transient: its choice must come from the y family
    int s0 = mdp.find_state({{"s", "s0"}});
    REQUIRE(s0 >= 0);
    double xAtS0 = 0.0, yAtChoice = 0.0;
    for (size_t j = 0; j < model.vars.size(); ++j) {
        const milp::VarTag& tag = model.vars[j].tag;
        if (tag.state != s0) continue;
        if (tag.role == milp::VarTag::Role::FlowX) xAtS0 += sol.x[j];
        if (tag.role == milp::VarTag::Role::FlowY &&
            tag.actionSlot == rec.choice[static_cast<size_t>(s0)])
            yAtChoice = sol.x[j];
    }
    CHECK(xAtS0 <= 1e-9);
    CHECK(yAtChoice > 1e-9);

    // x-measure gain equals the recovered policy's evaluated gain
    for (int qi = 0; qi < mdp.qa_count(); ++qi) {
        double viaX = 0.0;
        for (size_t j = 0; j < model.vars.size(); ++j) {
            const milp::VarTag& tag = model.vars[j].tag;
            if (tag.role != milp::VarTag::Role::FlowX) continue;
            viaX += sol.x[j] *
                    mdp.acts[static_cast<size_t>(tag.state)][static_cast<size_t>(tag.actionSlot)]
                        .qa[static_cast<size_t>(qi)];
        }
        CHECK(viaX == doctest::Approx(evaluate_average_cost(mdp, rec, qi)).epsilon(1e-6));
    }
}

TEST_CASE("soft constraint: zero slope leaves violation free up to D - theta") {
    ExplicitMdp mdp = compile(three_state_two_action());
    Policy solution = solve_optimal(mdp);
    PolicyValuation val = evaluate_policy(mdp, solution);
    // theta below the best achievable qa0 value makes the bound unattainable
    double D = val.qaValue[0];
    AlternativeQuery q = basic_query(mdp, 0, D + 1.0, D + 1.0, /*soft=*/false);
    PenaltySpec linear;
    linear.shape = PenaltySpec::Shape::Linear;
    linear.slope = 0.0;
    linear.violationUpperBound = q.delta;
    q.penalty = linear;
    milp::MilpModel model = build_total_cost_milp(mdp, q);
    milp::MilpSolution sol = milp::solve(model);
    REQUIRE(sol.status == milp::SolveStatus::Optimal); // the <= D row keeps it feasible
    int v = model.var_index("v_qa0");
    REQUIRE(v >= 0);
    CHECK(sol.x[static_cast<size_t>(v)] <= q.delta + 1e-9);
}

TEST_CASE("soft constraint: optimal violation equals max(0, achieved - theta)") {
    for (uint64_t seed = 40; seed <= 52; ++seed) {
        Problem p = testsupport::random_total_cost_problem(seed);
        ExplicitMdp mdp = compile(p);
        Policy solution = solve_optimal(mdp);
        PolicyValuation val = evaluate_policy(mdp, solution);
        int qa = 0;
        double D = val.qaValue[0];
        double bound = per_qa_lower_bound(mdp, qa);
        double delta = (D - bound) + 0.5; // theta strictly below the best value
        if (delta <= 0.5 + 1e-9) continue;
        AlternativeQuery q = basic_query(mdp, qa, D, delta, /*soft=*/true);
        q.flowBound = mdp.state_count() / mdp.min_positive_prob();
        milp::MilpModel model = build_total_cost_milp(mdp, q);
        milp::MilpSolution sol = milp::solve(model);
        REQUIRE(sol.status == milp::SolveStatus::Optimal);
        strip_unreachable_flow(model, mdp, sol);

        double achieved = 0.0;
        for (size_t j = 0; j < model.vars.size(); ++j) {
            const milp::VarTag& tag = model.vars[j].tag;
            if (tag.role != milp::VarTag::Role::FlowX) continue;
            achieved += sol.x[j] *
                        mdp.acts[static_cast<size_t>(tag.state)][static_cast<size_t>(tag.actionSlot)]
                            .qa[0];
        }
        int v = model.var_index("v_qa0");
        REQUIRE(v >= 0);
        INFO("seed ", seed);
        CHECK(sol.x[static_cast<size_t>(v)] ==
              doctest::Approx(std::max(0.0, achieved - q.theta)).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("nonconvex penalties are rejected") {
    PenaltySpec bad;
    bad.shape = PenaltySpec::Shape::Quadratic;
    bad.coefficient = -1.0;
    bad.violationUpperBound = 1.0;
    try {
        bad.validate();
        FAIL("expected NonconvexPenalty");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NonconvexPenalty);
    }
}

TEST_CASE("generate_alternatives: bound-optimal solutions yield no alternatives") {
    // a single path: the solution is best possible in every QA
    Problem p = flat_skeleton(3, "forced");
    declare_standard_qas(p, 2);
    add_flat_action(p, 0, 0, {{1, 1.0}}, {1.0, 1.0});
    add_flat_action(p, 1, 0, {{2, 1.0}}, {1.0, 1.0});
    TotalCostCriterion crit;
    crit.goals.push_back({{"s", sname(2)}});
    crit.initial = {{"s", sname(0)}};
    p.criterion = crit;
    ExplicitMdp mdp = compile(p);
    Policy solution = solve_optimal(mdp);
    GenerateOutcome out = generate_alternatives(mdp, solution, evaluate_policy(mdp, solution));
    CHECK(out.alternatives.empty());
    CHECK(out.warnings.empty());
}

TEST_CASE("alternatives strictly improve their target and sit on the Pareto front") {
    int produced = 0;
    for (uint64_t seed = 60; seed <= 75; ++seed) {
        Problem p = testsupport::random_total_cost_problem(seed);
        ExplicitMdp mdp = compile(p);
        Policy solution = solve_optimal(mdp);
        PolicyValuation val = evaluate_policy(mdp, solution);
        // generous margins put real pressure on the soft bound
        GenerateOptions opts;
        for (int qi = 0; qi < mdp.qa_count(); ++qi) {
            double gap = val.qaValue[static_cast<size_t>(qi)] - per_qa_lower_bound(mdp, qi);
            if (gap > 1e-9) opts.deltas[qi] = 0.6 * gap;
        }
        GenerateOutcome out = generate_alternatives(mdp, solution, val, opts);
        CHECK(out.alternatives.size() <= static_cast<size_t>(mdp.qa_count()));
        oracle::ParetoFront front = oracle::pareto_front(mdp);
        for (const auto& a : out.alternatives) {
            ++produced;
            INFO("seed ", seed, " qa ", a.targetQa);
            CHECK(a.valuation.qaValue[static_cast<size_t>(a.targetQa)] <
                  val.qaValue[static_cast<size_t>(a.targetQa)] - 1e-9);
            // independent oracle valuation of the recovered policy
            oracle::OracleValuation ov = oracle::evaluate_choice(mdp, a.policy.choice);
            REQUIRE(ov.valid);
            CHECK(front.admits(ov.qa));
            // gains/losses mirror the two valuations
            for (const auto& g : a.gains)
                CHECK(val.qaValue[static_cast<size_t>(g.qa)] -
                          a.valuation.qaValue[static_cast<size_t>(g.qa)] ==
                      doctest::Approx(g.amount).epsilon(1e-6));
            for (const auto& l : a.losses)
                CHECK(a.valuation.qaValue[static_cast<size_t>(l.qa)] -
                          val.qaValue[static_cast<size_t>(l.qa)] ==
                      doctest::Approx(l.amount).epsilon(1e-6));
        }
    }
    CHECK(produced > 0);
}

TEST_CASE("average-cost alternatives are consistent with their x-measure") {
    for (uint64_t seed = 90; seed <= 99; ++seed) {
        Problem p = testsupport::random_unichain_problem(seed);
        ExplicitMdp mdp = compile(p);
        Policy solution = solve_optimal(mdp);
        PolicyValuation val = evaluate_policy(mdp, solution);
        GenerateOutcome out = generate_alternatives(mdp, solution, val);
        for (const auto& a : out.alternatives) {
            CHECK(a.valuation.qaValue[static_cast<size_t>(a.targetQa)] <
                  val.qaValue[static_cast<size_t>(a.targetQa)] - 1e-9);
            oracle::OracleValuation ov = oracle::evaluate_choice(mdp, a.policy.choice);
            REQUIRE(ov.valid);
            for (int qi = 0; qi < mdp.qa_count(); ++qi)
                CHECK(ov.qa[static_cast<size_t>(qi)] ==
                      doctest::Approx(a.valuation.qaValue[static_cast<size_t>(qi)]).epsilon(1e-6));
        }
    }
}
