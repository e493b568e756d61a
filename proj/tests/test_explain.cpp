#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "xmdp/explain.hpp"

#include "support/instances.hpp"

using namespace xmdp;
using namespace xmdp::expl;
using testsupport::add_flat_action;
using testsupport::flat_skeleton;
using testsupport::sname;

namespace {

std::vector<QaSpec> table_one_qas() {
    QaSpec coll;
    coll.name = "collisions";
    coll.kind = QaKind::EventCount;
    coll.eventName = "collision";
    QaSpec time;
    time.name = "travelTime";
    time.kind = QaKind::Standard;
    time.unit = {"minute", "minutes"};
    QaSpec intr;
    intr.name = "intrusiveness";
    intr.kind = QaKind::NonStandard;
    intr.events = {{"non-intrusive", "non-intrusive", 0.0, ValueFn::constant(0.0)},
                   {"somewhat-intrusive", "somewhat intrusive", 1.0, ValueFn::constant(0.0)},
                   {"very-intrusive", "very intrusive", 3.0, ValueFn::constant(0.0)}};
    return {coll, time, intr};
}

Vocabulary table_one_vocab() {
    Vocabulary v;
    v["collisions"].eventNoun = {"collision", "collisions"};
    v["travelTime"].noun = "travel time";
    v["travelTime"].unit = {"minute", "minutes"};
    v["intrusiveness"].noun = "intrusiveness";
    v["intrusiveness"].subject = "the robot";
    v["intrusiveness"].placeNoun = {"location", "locations"};
    return v;
}

PolicyValuation table_one_valuation() {
    PolicyValuation val;
    val.qaValue = {0.8, 10.0, 2.0};
    val.eventCounts = {{"collision", 0.8},
                       {"non-intrusive", 5.0},
                       {"somewhat-intrusive", 2.0},
                       {"very-intrusive", 0.0}};
    val.scalarizedCost = 0.0;
    return val;
}

/// Two-route instance whose time-improving alternative is 5 minutes faster
/// with 0.4 more expected collisions.
Problem two_route_problem() {
    Problem p = flat_skeleton(2, "two-route");
    QaSpec time;
    time.name = "travelTime";
    time.kind = QaKind::Standard;
    time.unit = {"minute", "minutes"};
    time.value = ValueFn::table({}, 0.0);
    QaSpec coll;
    coll.name = "collisions";
    coll.kind = QaKind::EventCount;
    coll.eventName = "collision";
    coll.value = ValueFn::table({}, 0.0);
    p.qas = {time, coll};
    p.scalarization.mode = ScalarizationProfile::Mode::Identity;
    p.scalarization.weights = {{"travelTime", 1.0}, {"collisions", 20.0}};
    add_flat_action(p, 0, 0, {{1, 1.0}}, {5.0, 0.4});  // fast but risky
    add_flat_action(p, 0, 1, {{1, 1.0}}, {10.0, 0.0}); // slow and safe
    TotalCostCriterion crit;
    crit.goals.push_back({{"s", sname(1)}});
    crit.initial = {{"s", sname(0)}};
    p.criterion = crit;
    p.vocabulary["travelTime"].noun = "travel time";
    p.vocabulary["travelTime"].unit = {"minute", "minutes"};
    p.vocabulary["collisions"].eventNoun = {"collision", "collisions"};
    return p;
}

} // namespace

TEST_CASE("objective lines match the published wording") {
    std::vector<std::string> lines = describe_objectives(table_one_qas(), table_one_vocab());
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "minimize the expected number of collisions");
    CHECK(lines[1] == "minimize the expected travel time");
    CHECK(lines[2] == "minimize the expected intrusiveness");
}

TEST_CASE("valuation lines match the published wording byte for byte") {
    std::vector<std::string> lines =
        describe_valuation(table_one_qas(), table_one_valuation(), table_one_vocab());
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "the expected number of collisions is 0.8");
    CHECK(lines[1] == "the expected travel time is 10 minutes");
    CHECK(lines[2] == "the robot is expected to be non-intrusive at 5 locations and somewhat "
                      "intrusive at 2 locations");
}

TEST_CASE("zero-count labels are omitted; all-zero falls back to one item") {
    PolicyValuation val = table_one_valuation();
    val.eventCounts["somewhat-intrusive"] = 0.04; // rounds to zero
    std::vector<std::string> lines =
        describe_valuation(table_one_qas(), val, table_one_vocab());
    CHECK(lines[2] == "the robot is expected to be non-intrusive at 5 locations");

    val.eventCounts["non-intrusive"] = 0.0;
    lines = describe_valuation(table_one_qas(), val, table_one_vocab());
    CHECK(lines[2] == "the robot is expected to be non-intrusive at 0 locations");
}

TEST_CASE("missing vocabulary is an error") {
    Vocabulary v = table_one_vocab();
    v.erase("travelTime");
    try {
        (void)describe_objectives(table_one_qas(), v);
        FAIL("expected MissingVocabulary");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::MissingVocabulary);
    }
}

TEST_CASE("quantities format at one decimal with trimmed zeros") {
    CHECK(format_quantity(0.8) == "0.8");
    CHECK(format_quantity(10.0) == "10");
    CHECK(format_quantity(4.999999) == "5");
    CHECK(format_quantity(0.04) == "0");
    CHECK(format_quantity(-0.0) == "0");
    CHECK(format_quantity(2.25) == "2.3");
}

TEST_CASE("contrastive paragraph carries the gains and losses quantitatively") {
    Problem p = two_route_problem();
    ExplicitMdp mdp = compile(p);
    Policy solution = solve_optimal(mdp);
    PolicyValuation val = evaluate_policy(mdp, solution);
    CHECK(val.qaValue[0] == doctest::Approx(10.0)); // the slow route wins

    alt::GenerateOptions opts;
    opts.deltas[0] = 5.0; // ask for the full improvement
    alt::GenerateOutcome out = alt::generate_alternatives(mdp, solution, val, opts);
    REQUIRE(out.alternatives.size() == 1);
    CHECK(out.alternatives[0].targetQa == 0);

    Explanation ex = render_contrastive(mdp, val, out.lowerBounds, out.alternatives,
                                        p.vocabulary);
    REQUIRE(ex.tradeoffs.size() == 1);
    const TradeoffRecord& record = ex.tradeoffs[0];
    REQUIRE(record.improved.size() == 1);
    REQUIRE(record.worsened.size() == 1);
    CHECK(record.improved[0].amount == doctest::Approx(5.0));
    CHECK(record.worsened[0].amount == doctest::Approx(0.4));
    CHECK(record.paragraph ==
          "I could reduce the expected travel time by 5 minutes, by carrying out the alternative "
          "policy shown below instead. However, this would increase the expected number of "
          "collisions by 0.4. I decided not to do that because improving travel time by 5 minutes "
          "is not worth worsening collisions by 0.4.");

    // verdict bookkeeping: one verdict per QA, collision verdict is best
    // possible and never listed as improved anywhere
    REQUIRE(ex.verdicts.size() == 2);
    CHECK(ex.verdicts[0].kind == VerdictKind::TradedOff);
    CHECK(ex.verdicts[0].altIndex == 0);
    CHECK(ex.verdicts[1].kind == VerdictKind::BestPossible);
    for (const auto& t : ex.tradeoffs)
        for (const auto& g : t.improved) CHECK(g.qa != ex.verdicts[1].qa);

    // every rendered amount round-trips through the structured record
    for (const auto& g : record.improved)
        CHECK(record.paragraph.find(format_quantity(g.amount)) != std::string::npos);
    for (const auto& l : record.worsened)
        CHECK(record.paragraph.find(format_quantity(l.amount)) != std::string::npos);

    // rendering is deterministic
    Explanation again = render_contrastive(mdp, val, out.lowerBounds, out.alternatives,
                                           p.vocabulary);
    CHECK(again.text == ex.text);
}

TEST_CASE("all QAs at their bounds render only best-possible sentences") {
    Problem p = flat_skeleton(3, "forced-route");
    QaSpec intr;
    intr.name = "intrusiveness";
    intr.kind = QaKind::NonStandard;
    intr.events = {{"non-intrusive", "non-intrusive", 0.0, ValueFn::constant(1.0)},
                   {"somewhat-intrusive", "somewhat intrusive", 1.0, ValueFn::constant(0.0)},
                   {"very-intrusive", "very intrusive", 3.0, ValueFn::constant(0.0)}};
    p.qas = {intr};
    p.scalarization.mode = ScalarizationProfile::Mode::Identity;
    p.scalarization.weights = {{"intrusiveness", 1.0}};
    add_flat_action(p, 0, 0, {{1, 1.0}}, {});
    add_flat_action(p, 1, 0, {{2, 1.0}}, {});
    TotalCostCriterion crit;
    crit.goals.push_back({{"s", sname(2)}});
    crit.initial = {{"s", sname(0)}};
    p.criterion = crit;
    p.vocabulary["intrusiveness"].noun = "intrusiveness";
    p.vocabulary["intrusiveness"].bestPossible = "is already the least intrusive navigation route";

    ExplicitMdp mdp = compile(p);
    Policy solution = solve_optimal(mdp);
    PolicyValuation val = evaluate_policy(mdp, solution);
    alt::GenerateOutcome out = alt::generate_alternatives(mdp, solution, val);
    CHECK(out.alternatives.empty());
    Explanation ex = render_contrastive(mdp, val, out.lowerBounds, out.alternatives,
                                        p.vocabulary);
    REQUIRE(ex.verdicts.size() == 1);
    CHECK(ex.verdicts[0].kind == VerdictKind::BestPossible);
    CHECK(ex.verdicts[0].sentence == "My plan is already the least intrusive navigation route.");
    CHECK(ex.tradeoffs.empty());
}

TEST_CASE("template files override the defaults") {
    TemplateSet t = TemplateSet::from_json(R"({"objective.standard": "keep the {noun} low"})");
    QaSpec time;
    time.name = "t";
    time.kind = QaKind::Standard;
    time.unit = {"second", "seconds"};
    Vocabulary v;
    v["t"].noun = "driving time";
    v["t"].unit = {"second", "seconds"};
    std::vector<std::string> lines = describe_objectives({time}, v, t);
    CHECK(lines[0] == "keep the driving time low");
    // unrelated templates keep their defaults
    CHECK(t.at("value.standard") == TemplateSet::defaults().at("value.standard"));
}

TEST_CASE("policy DOT output names reachable transitions") {
    Problem p = two_route_problem();
    ExplicitMdp mdp = compile(p);
    Policy solution = solve_optimal(mdp);
    std::string dot = policy_dot(mdp, solution, "solution");
    CHECK(dot.find("digraph \"solution\"") != std::string::npos);
    CHECK(dot.find("\"s=s0\" -> \"s=s1\"") != std::string::npos);
    CHECK(dot.find("a1@s0") != std::string::npos); // the slow route's action
}
