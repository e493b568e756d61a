#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "xmdp/evaluate.hpp"
#include "xmdp/oracle.hpp"

#include "support/instances.hpp"

#include <algorithm>
#include <cmath>

using namespace xmdp;
using testsupport::add_flat_action;
using testsupport::declare_standard_qas;
using testsupport::flat_skeleton;
using testsupport::sname;

namespace {

Problem grid_average_problem(int states, int actions) {
    Problem p = flat_skeleton(states, "avg-grid");
    declare_standard_qas(p, 2);
    testsupport::Rng rng(7);
    for (int s = 0; s < states; ++s)
        for (int a = 0; a < actions; ++a) {
            int target = (s + a + 1) % states;
            std::vector<std::pair<int, double>> outs;
            if (target == 0)
                outs = {{0, 1.0}};
            else
                outs = {{0, 0.2}, {target, 0.8}};
            add_flat_action(p, s, a, outs, {rng.uniform(0, 4), rng.uniform(0, 4)});
        }
    AverageCostCriterion crit;
    crit.initial.push_back({{{"s", sname(0)}}, 1.0});
    p.criterion = crit;
    return p;
}

} // namespace

TEST_CASE("policy counting: 2x2 -> 4, 6x3 -> 729, single action -> 1") {
    Problem p1 = grid_average_problem(2, 2);
    ExplicitMdp m1 = compile(p1);
    CHECK(oracle::policy_space_size(m1) == 4.0L);
    long seen = 0;
    oracle::for_each_policy(m1, 100, [&](const std::vector<int>&) { ++seen; });
    CHECK(seen == 4);

    Problem p2 = grid_average_problem(6, 3);
    ExplicitMdp m2 = compile(p2);
    CHECK(oracle::policy_space_size(m2) == 729.0L);

    Problem p3 = grid_average_problem(3, 1);
    ExplicitMdp m3 = compile(p3);
    CHECK(oracle::policy_space_size(m3) == 1.0L);

    // the cap is enforced
    CHECK_THROWS_AS(oracle::for_each_policy(m2, 10, [](const std::vector<int>&) {}), Error);
}

TEST_CASE("oracle valuations agree with the valuation module") {
    // two independent code paths must agree on every enumerated policy
    for (uint64_t seed = 1; seed <= 12; ++seed) {
        Problem p = testsupport::random_total_cost_problem(seed);
        ExplicitMdp mdp = compile(p);
        oracle::for_each_policy(mdp, 1000000, [&](const std::vector<int>& choice) {
            oracle::OracleValuation ov = oracle::evaluate_choice(mdp, choice);
            Policy pi = make_policy(mdp, choice);
            if (!ov.valid) {
                CHECK_THROWS_AS((void)evaluate_policy(mdp, pi), Error);
                return;
            }
            PolicyValuation val = evaluate_policy(mdp, pi);
            for (int qi = 0; qi < mdp.qa_count(); ++qi)
                CHECK(val.qaValue[static_cast<size_t>(qi)] ==
                      doctest::Approx(ov.qa[static_cast<size_t>(qi)]).epsilon(1e-6));
            for (const auto& [event, count] : ov.eventCounts)
                CHECK(val.eventCounts.at(event) == doctest::Approx(count).epsilon(1e-6));
        });
    }
    for (uint64_t seed = 100; seed <= 106; ++seed) {
        Problem p = testsupport::random_unichain_problem(seed);
        ExplicitMdp mdp = compile(p);
        oracle::for_each_policy(mdp, 1000000, [&](const std::vector<int>& choice) {
            oracle::OracleValuation ov = oracle::evaluate_choice(mdp, choice);
            REQUIRE(ov.valid); // unichain by construction
            Policy pi = make_policy(mdp, choice);
            PolicyValuation val = evaluate_policy(mdp, pi);
            for (int qi = 0; qi < mdp.qa_count(); ++qi)
                CHECK(val.qaValue[static_cast<size_t>(qi)] ==
                      doctest::Approx(ov.qa[static_cast<size_t>(qi)]).epsilon(1e-6));
        });
    }
}

TEST_CASE("pareto front: scalar minimum, duplicates, weighted-sum membership") {
    // one QA: the front is exactly the set of minimum-value policies
    Problem p = flat_skeleton(2, "scalar");
    declare_standard_qas(p, 1);
    add_flat_action(p, 0, 0, {{1, 1.0}}, {3.0});
    add_flat_action(p, 0, 1, {{1, 1.0}}, {1.0});
    add_flat_action(p, 0, 2, {{1, 1.0}}, {1.0}); // duplicate value vector
    TotalCostCriterion crit;
    crit.goals.push_back({{"s", sname(1)}});
    crit.initial = {{"s", sname(0)}};
    p.criterion = crit;
    ExplicitMdp mdp = compile(p);
    oracle::ParetoFront front = oracle::pareto_front(mdp);
    REQUIRE(front.entries.size() == 1); // one representative per distinct vector
    CHECK(front.entries[0].qa[0] == doctest::Approx(1.0));

    // weighted-sum optima with positive weights always sit on the front
    for (uint64_t seed = 20; seed <= 32; ++seed) {
        Problem q = testsupport::random_total_cost_problem(seed);
        ExplicitMdp m = compile(q);
        oracle::ParetoFront f = oracle::pareto_front(m);
        Policy pi = solve_optimal(m);
        PolicyValuation val = evaluate_policy(m, pi);
        INFO("seed ", seed);
        CHECK(f.admits(val.qaValue));
    }
}

TEST_CASE("front membership is order-independent") {
    Problem p = testsupport::random_total_cost_problem(9);
    ExplicitMdp mdp = compile(p);

    std::vector<std::vector<double>> vectors;
    oracle::for_each_policy(mdp, 1000000, [&](const std::vector<int>& choice) {
        oracle::OracleValuation v = oracle::evaluate_choice(mdp, choice);
        if (v.valid) vectors.push_back(v.qa);
    });
    auto filter = [&](const std::vector<std::vector<double>>& pool) {
        std::vector<std::vector<double>> front;
        for (const auto& u : pool) {
            bool dominated = false;
            for (const auto& w : pool)
                if (oracle::dominates(w, u)) {
                    dominated = true;
                    break;
                }
            if (!dominated) front.push_back(u);
        }
        std::sort(front.begin(), front.end());
        front.erase(std::unique(front.begin(), front.end()), front.end());
        return front;
    };
    std::vector<std::vector<double>> forward = filter(vectors);
    std::reverse(vectors.begin(), vectors.end());
    std::vector<std::vector<double>> backward = filter(vectors);
    CHECK(forward == backward);

    oracle::ParetoFront front = oracle::pareto_front(mdp);
    for (const auto& e : front.entries) CHECK(front.admits(e.qa));
}

TEST_CASE("dominance respects the 1e-9 tolerance") {
    std::vector<double> a{1.0, 2.0};
    std::vector<double> b{1.0 + 5e-10, 2.0 + 5e-10};
    CHECK(!oracle::dominates(a, b)); // differences below tolerance are ties
    std::vector<double> c{1.0, 3.0};
    CHECK(oracle::dominates(a, c));
    CHECK(!oracle::dominates(c, a));
}

TEST_CASE("shortest-path oracle equals enumeration on deterministic instances") {
    // deterministic-transition total-cost instance comparable both ways
    Problem p = flat_skeleton(5, "det");
    declare_standard_qas(p, 2);
    testsupport::Rng rng(11);
    for (int s = 0; s < 4; ++s) {
        add_flat_action(p, s, 0, {{s + 1, 1.0}}, {rng.uniform(0, 3), rng.uniform(0, 3)});
        int skip = std::min(4, s + 2);
        add_flat_action(p, s, 1, {{skip, 1.0}}, {rng.uniform(0, 5), rng.uniform(0, 5)});
    }
    TotalCostCriterion crit;
    crit.goals.push_back({{"s", sname(4)}});
    crit.initial = {{"s", sname(0)}};
    p.criterion = crit;
    ExplicitMdp mdp = compile(p);

    std::vector<double> w{mdp.scal.weight[0], mdp.scal.weight[1]};
    oracle::PathOptimum opt = oracle::shortest_path_optimum(mdp, w);

    double best = std::numeric_limits<double>::infinity();
    oracle::for_each_policy(mdp, 1000000, [&](const std::vector<int>& choice) {
        oracle::OracleValuation v = oracle::evaluate_choice(mdp, choice);
        if (!v.valid) return;
        best = std::min(best, w[0] * v.qa[0] + w[1] * v.qa[1]);
    });
    CHECK(opt.cost == doctest::Approx(best).epsilon(1e-9));
    CHECK(oracle::best_weighted_value(mdp, w) == doctest::Approx(best).epsilon(1e-9));

    // the recovered choice is a proper policy achieving the optimum
    Policy pi = make_policy(mdp, opt.choice);
    PolicyValuation val = evaluate_policy(mdp, pi);
    CHECK(w[0] * val.qaValue[0] + w[1] * val.qaValue[1] == doctest::Approx(best).epsilon(1e-9));
}
