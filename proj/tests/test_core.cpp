#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "xmdp/explicit_mdp.hpp"

#include "support/instances.hpp"

using namespace xmdp;
using testsupport::add_flat_action;
using testsupport::declare_standard_qas;
using testsupport::flat_skeleton;
using testsupport::sname;

namespace {

/// Two-variable problem in the motivating shape: location x speed, speed
/// toggling, travel time = distance / speed.rate.
Problem location_speed_problem(int locations) {
    Problem p;
    p.name = "loc-speed";
    StateVariable loc;
    loc.name = "location";
    for (int i = 0; i < locations; ++i) loc.values.push_back("L" + std::to_string(i));
    StateVariable speed;
    speed.name = "speed";
    speed.values = {"full", "half"};
    speed.type = "Speed";
    p.variables = {loc, speed};

    StateVarType speedType;
    speedType.name = "Speed";
    speedType.attributes["rate"] = {{"full", 1.0}, {"half", 0.5}};
    p.types["Speed"] = speedType;

    p.actionTypes["MoveTo"] = {"MoveTo", {"distance"}};
    for (int i = 0; i + 1 < locations; ++i) {
        GroundAction move;
        move.name = "move_" + std::to_string(i) + "_" + std::to_string(i + 1);
        move.type = "MoveTo";
        move.attributes["distance"] = 10.0;
        move.pre["location"] = {"L" + std::to_string(i)};
        Outcome o;
        o.prob = 1.0;
        o.assign["location"] = "L" + std::to_string(i + 1);
        move.outcomes.push_back(o);
        p.actions.push_back(move);
    }
    for (const char* target : {"full", "half"}) {
        GroundAction sw;
        sw.name = std::string("set_") + target;
        sw.pre["speed"] = {target == std::string("full") ? "half" : "full"};
        std::vector<std::string> notGoal;
        for (int i = 0; i + 1 < locations; ++i) notGoal.push_back("L" + std::to_string(i));
        sw.pre["location"] = notGoal;
        Outcome o;
        o.prob = 1.0;
        o.assign["speed"] = target;
        sw.outcomes.push_back(o);
        p.actions.push_back(sw);
    }

    QaSpec time;
    time.name = "travelTime";
    time.kind = QaKind::Standard;
    time.unit = {"second", "seconds"};
    TableRow moveRow;
    moveRow.when.push_back({"action.type", {AttrValue(std::string("MoveTo"))}});
    moveRow.value = Expr::parse("distance / speed.rate");
    time.value = ValueFn::table({moveRow}, 1.0); // switching costs one second
    p.qas.push_back(time);
    p.scalarization.mode = ScalarizationProfile::Mode::Identity;
    p.scalarization.weights["travelTime"] = 1.0;

    TotalCostCriterion crit;
    crit.goals.push_back({{"location", "L" + std::to_string(locations - 1)}});
    crit.initial = {{"location", "L0"}, {"speed", "full"}};
    p.criterion = crit;
    return p;
}

} // namespace

TEST_CASE("scalarized cost: identity, zero and weighted examples") {
    ResolvedScalarization s;
    s.weight = {1.0};
    s.scale = {1.0};
    s.offset = {0.0};
    std::vector<double> q{7.0};
    CHECK(scalarized_cost(s, q) == doctest::Approx(7.0));

    s.weight = {2.0, 3.0};
    s.scale = {1.0, 1.0};
    s.offset = {0.0, 0.0};
    std::vector<double> q2{1.0, 1.0};
    CHECK(scalarized_cost(s, q2) == doctest::Approx(5.0));

    std::vector<double> zeros{0.0, 0.0};
    CHECK(scalarized_cost(s, zeros) == doctest::Approx(0.0));

    std::vector<double> wrong{1.0};
    CHECK_THROWS_AS((void)scalarized_cost(s, wrong), Error);
}

TEST_CASE("scalarized cost is strictly monotone in every QA value") {
    testsupport::Rng rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        int nq = rng.uniform_int(1, 4);
        ResolvedScalarization s;
        std::vector<double> q;
        for (int i = 0; i < nq; ++i) {
            s.weight.push_back(rng.uniform(0.1, 3.0));
            s.scale.push_back(rng.uniform(0.1, 2.0));
            s.offset.push_back(rng.uniform(-1.0, 1.0));
            q.push_back(rng.uniform(0.0, 10.0));
        }
        double base = scalarized_cost(s, q);
        int bump = rng.uniform_int(0, nq - 1);
        q[static_cast<size_t>(bump)] += rng.uniform(0.01, 1.0);
        CHECK(scalarized_cost(s, q) > base);
    }
}

TEST_CASE("location x speed model grounds to at most 2L states") {
    Problem p = location_speed_problem(4);
    ExplicitMdp mdp = compile(p);
    CHECK(mdp.state_count() <= 8);
    CHECK(mdp.state_count() == 8); // everything reachable here

    // travel time at full speed is distance / 1.0
    int s0 = mdp.s0;
    bool sawMove = false;
    for (const auto& ea : mdp.acts[static_cast<size_t>(s0)]) {
        const std::string& name = mdp.problem->actions[static_cast<size_t>(ea.actionId)].name;
        if (name == "move_0_1") {
            CHECK(ea.qa[0] == doctest::Approx(10.0));
            sawMove = true;
        }
    }
    CHECK(sawMove);

    // at half speed the same move takes twice as long
    int halfState = mdp.find_state({{"location", "L0"}, {"speed", "half"}});
    REQUIRE(halfState >= 0);
    for (const auto& ea : mdp.acts[static_cast<size_t>(halfState)]) {
        const std::string& name = mdp.problem->actions[static_cast<size_t>(ea.actionId)].name;
        if (name == "move_0_1") CHECK(ea.qa[0] == doctest::Approx(20.0));
    }
}

TEST_CASE("transition rows must sum to one") {
    Problem p = flat_skeleton(3, "bad-row");
    declare_standard_qas(p, 2);
    add_flat_action(p, 0, 0, {{1, 0.6}, {2, 0.35}}, {1.0, 1.0}); // sums to 0.95
    TotalCostCriterion crit;
    crit.goals.push_back({{"s", sname(2)}});
    crit.initial = {{"s", sname(0)}};
    p.criterion = crit;
    try {
        (void)compile(p);
        FAIL("expected InvalidTransition");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InvalidTransition);
        CHECK(std::string(e.what()).find("0.95") != std::string::npos);
    }
}

TEST_CASE("unreachable goal is rejected at compile") {
    Problem p = flat_skeleton(3, "no-goal");
    declare_standard_qas(p, 2);
    add_flat_action(p, 0, 0, {{1, 1.0}}, {1.0, 1.0});
    add_flat_action(p, 1, 0, {{0, 1.0}}, {1.0, 1.0});
    TotalCostCriterion crit;
    crit.goals.push_back({{"s", sname(2)}}); // s2 never entered
    crit.initial = {{"s", sname(0)}};
    p.criterion = crit;
    try {
        (void)compile(p);
        FAIL("expected UnreachableGoal");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::UnreachableGoal);
    }
}

TEST_CASE("goal states must be absorbing") {
    Problem p = flat_skeleton(3, "leaky-goal");
    declare_standard_qas(p, 2);
    add_flat_action(p, 0, 0, {{2, 1.0}}, {1.0, 1.0});
    add_flat_action(p, 2, 0, {{0, 1.0}}, {1.0, 1.0}); // escapes the goal
    TotalCostCriterion crit;
    crit.goals.push_back({{"s", sname(2)}});
    crit.initial = {{"s", sname(0)}};
    p.criterion = crit;
    try {
        (void)compile(p);
        FAIL("expected GoalNotAbsorbing");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::GoalNotAbsorbing);
    }
}

TEST_CASE("QA functions referencing unknown attributes are rejected") {
    Problem p = flat_skeleton(2, "bad-attr");
    declare_standard_qas(p, 1);
    add_flat_action(p, 0, 0, {{1, 1.0}}, {1.0});
    p.qas[0].value = ValueFn::expression("nonexistent.attr + 1");
    TotalCostCriterion crit;
    crit.goals.push_back({{"s", sname(1)}});
    crit.initial = {{"s", sname(0)}};
    p.criterion = crit;
    try {
        (void)compile(p);
        FAIL("expected UndefinedAttribute");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::UndefinedAttribute);
    }
}

TEST_CASE("states unreachable from the start are pruned") {
    Problem p = flat_skeleton(4, "pruned");
    declare_standard_qas(p, 2);
    add_flat_action(p, 0, 0, {{3, 1.0}}, {1.0, 1.0});
    add_flat_action(p, 1, 0, {{2, 1.0}}, {1.0, 1.0}); // s1, s2 unreachable
    add_flat_action(p, 2, 0, {{3, 1.0}}, {1.0, 1.0});
    TotalCostCriterion crit;
    crit.goals.push_back({{"s", sname(3)}});
    crit.initial = {{"s", sname(0)}};
    p.criterion = crit;
    ExplicitMdp mdp = compile(p);
    CHECK(mdp.state_count() == 2);
    CHECK(mdp.find_state({{"s", "s1"}}) == -1);
}

TEST_CASE("compilation is deterministic with canonical state order") {
    Problem p = testsupport::random_total_cost_problem(5);
    ExplicitMdp a = compile(p);
    ExplicitMdp b = compile(p);
    REQUIRE(a.state_count() == b.state_count());
    for (int s = 0; s < a.state_count(); ++s) {
        CHECK(a.stateKeys[static_cast<size_t>(s)] == b.stateKeys[static_cast<size_t>(s)]);
        REQUIRE(a.acts[static_cast<size_t>(s)].size() == b.acts[static_cast<size_t>(s)].size());
        for (size_t i = 0; i < a.acts[static_cast<size_t>(s)].size(); ++i) {
            CHECK(a.acts[static_cast<size_t>(s)][i].actionId == b.acts[static_cast<size_t>(s)][i].actionId);
            CHECK(a.acts[static_cast<size_t>(s)][i].qa == b.acts[static_cast<size_t>(s)][i].qa);
        }
    }
    // lexicographic order over the flat variable
    for (int s = 0; s + 1 < a.state_count(); ++s)
        CHECK(a.stateValues[static_cast<size_t>(s)][0] < a.stateValues[static_cast<size_t>(s) + 1][0]);
}

TEST_CASE("inapplicable pairs are absent from the explicit model") {
    Problem p = flat_skeleton(3, "applicability");
    declare_standard_qas(p, 1);
    add_flat_action(p, 0, 0, {{1, 1.0}}, {1.0});
    add_flat_action(p, 1, 0, {{2, 1.0}}, {1.0});
    TotalCostCriterion crit;
    crit.goals.push_back({{"s", sname(2)}});
    crit.initial = {{"s", sname(0)}};
    p.criterion = crit;
    ExplicitMdp mdp = compile(p);
    int s0 = mdp.find_state({{"s", "s0"}});
    int s1 = mdp.find_state({{"s", "s1"}});
    CHECK(mdp.acts[static_cast<size_t>(s0)].size() == 1);
    CHECK(mdp.acts[static_cast<size_t>(s1)].size() == 1);
    CHECK(mdp.problem->actions[static_cast<size_t>(mdp.acts[static_cast<size_t>(s0)][0].actionId)].name ==
          "a0@s0");
}

TEST_CASE("min-max normalization maps grounded QA ranges onto [0,1]") {
    Problem p = flat_skeleton(3, "minmax");
    declare_standard_qas(p, 2);
    add_flat_action(p, 0, 0, {{1, 1.0}}, {2.0, 4.0});
    add_flat_action(p, 1, 0, {{2, 1.0}}, {6.0, 4.0}); // qa1 is constant
    TotalCostCriterion crit;
    crit.goals.push_back({{"s", sname(2)}});
    crit.initial = {{"s", sname(0)}};
    p.criterion = crit;
    p.scalarization.mode = ScalarizationProfile::Mode::MinMax;
    ExplicitMdp mdp = compile(p);
    // qa0 range [2,6]: scale 1/4, offset -1/2
    CHECK(mdp.scal.scale[0] == doctest::Approx(0.25));
    CHECK(mdp.scal.offset[0] == doctest::Approx(-0.5));
    // constant qa1 falls back to identity
    CHECK(mdp.scal.scale[1] == doctest::Approx(1.0));
    CHECK(mdp.scal.offset[1] == doctest::Approx(0.0));
    CHECK(mdp.scal.scale[0] * 2.0 + mdp.scal.offset[0] == doctest::Approx(0.0));
    CHECK(mdp.scal.scale[0] * 6.0 + mdp.scal.offset[0] == doctest::Approx(1.0));
}

TEST_CASE("expression parser handles arithmetic, precedence and errors") {
    AttrContext ctx;
    ctx.set_action("MoveTo", "m");
    ctx.set_action_attr("distance", 12.0);
    ctx.set_var("speed", "half");
    ctx.set_var_attr("speed", "rate", 0.5);

    CHECK(Expr::parse("distance / speed.rate").eval(ctx) == doctest::Approx(24.0));
    CHECK(Expr::parse("1 + 2 * 3").eval(ctx) == doctest::Approx(7.0));
    CHECK(Expr::parse("(1 + 2) * 3").eval(ctx) == doctest::Approx(9.0));
    CHECK(Expr::parse("-distance + 2").eval(ctx) == doctest::Approx(-10.0));
    CHECK_THROWS_AS((void)Expr::parse("1 + "), Error);
    CHECK_THROWS_AS((void)Expr::parse("2 ** 3"), Error);
    CHECK_THROWS_AS((void)Expr::parse("distance / zero").eval(ctx), Error);
}
