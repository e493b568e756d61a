#include "xmdp/robotnav.hpp"

#include "xmdp/evaluate.hpp"
#include "xmdp/explain.hpp"
#include "xmdp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <set>

namespace xmdp::robotnav {

namespace {

constexpr const char* kTimeQa = "travelTime";
constexpr const char* kCollisionQa = "collisions";
constexpr const char* kIntrusiveQa = "intrusiveness";

/// Deterministic uniform helpers on top of mt19937_64 raw output.
struct Rng {
    std::mt19937_64 engine;
    explicit Rng(uint64_t seed) : engine(seed) {}
    double uniform() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
    int pick(int n) { return static_cast<int>(engine() % static_cast<uint64_t>(n)); }
};

} // namespace

const char* to_string(Area a) {
    switch (a) {
    case Area::Public: return "public";
    case Area::SemiPrivate: return "semi-private";
    case Area::Private: return "private";
    }
    return "public";
}

const char* to_string(Obstacle o) {
    switch (o) {
    case Obstacle::None: return "none";
    case Obstacle::Sparse: return "sparse";
    case Obstacle::Dense: return "dense";
    }
    return "none";
}

namespace {

Area area_from(const std::string& s) {
    if (s == "public") return Area::Public;
    if (s == "semi-private") return Area::SemiPrivate;
    if (s == "private") return Area::Private;
    fail(Errc::ParseError, "unknown area '" + s + "'");
}

Obstacle obstacle_from(const std::string& s) {
    if (s == "none") return Obstacle::None;
    if (s == "sparse") return Obstacle::Sparse;
    if (s == "dense") return Obstacle::Dense;
    fail(Errc::ParseError, "unknown obstacle density '" + s + "'");
}

} // namespace

const Location* BuildingMap::find(const std::string& id) const {
    for (const auto& loc : locations)
        if (loc.id == id) return &loc;
    return nullptr;
}

void BuildingMap::validate() const {
    require(!locations.empty(), Errc::InvalidArgument, "map has no locations");
    std::set<std::string> ids;
    for (const auto& loc : locations)
        require(ids.insert(loc.id).second, Errc::InvalidArgument,
                "duplicate location id '" + loc.id + "'");
    for (const auto& e : edges) {
        require(e.distance > 0.0, Errc::InvalidArgument,
                "edge " + e.from + "-" + e.to + " has nonpositive distance");
        require(ids.count(e.from) && ids.count(e.to), Errc::UnknownLocation,
                "edge " + e.from + "-" + e.to + " references an undeclared location");
    }
    // connectivity over the undirected graph
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& e : edges) {
        adj[e.from].push_back(e.to);
        adj[e.to].push_back(e.from);
    }
    std::set<std::string> seen{locations.front().id};
    std::deque<std::string> queue{locations.front().id};
    while (!queue.empty()) {
        std::string u = queue.front();
        queue.pop_front();
        for (const auto& v : adj[u])
            if (seen.insert(v).second) queue.push_back(v);
    }
    require(seen.size() == locations.size(), Errc::InvalidArgument, "map graph is not connected");
}

Json nav_tables_to_json_obj(const NavTables& t) {
    return Json{{"fullSpeed", t.fullSpeed},
                {"halfSpeed", t.halfSpeed},
                {"speedSwitchSeconds", t.speedSwitchSeconds},
                {"collisionFullSparse", t.collisionFullSparse},
                {"collisionFullDense", t.collisionFullDense},
                {"penaltyPublic", t.penaltyPublic},
                {"penaltySemiPrivate", t.penaltySemiPrivate},
                {"penaltyPrivate", t.penaltyPrivate}};
}

NavTables nav_tables_from_json_obj(const Json& j) {
    NavTables t;
    t.fullSpeed = j.value("fullSpeed", t.fullSpeed);
    t.halfSpeed = j.value("halfSpeed", t.halfSpeed);
    t.speedSwitchSeconds = j.value("speedSwitchSeconds", t.speedSwitchSeconds);
    t.collisionFullSparse = j.value("collisionFullSparse", t.collisionFullSparse);
    t.collisionFullDense = j.value("collisionFullDense", t.collisionFullDense);
    t.penaltyPublic = j.value("penaltyPublic", t.penaltyPublic);
    t.penaltySemiPrivate = j.value("penaltySemiPrivate", t.penaltySemiPrivate);
    t.penaltyPrivate = j.value("penaltyPrivate", t.penaltyPrivate);
    return t;
}

std::map<std::string, double> profile_weights(const CostProfile& profile) {
    return {{kTimeQa, profile.perSecond},
            {kCollisionQa, profile.perCollision},
            {kIntrusiveQa, profile.perPenaltyUnit}};
}

Problem build_problem(const BuildingMap& map, const std::string& start, const std::string& goal,
                      const NavTables& tables, const std::map<std::string, double>& weights) {
    map.validate();
    require(map.find(start) != nullptr, Errc::UnknownLocation, "unknown start location '" + start + "'");
    require(map.find(goal) != nullptr, Errc::UnknownLocation, "unknown goal location '" + goal + "'");

    // goal must be reachable in the map graph before grounding
    {
        std::map<std::string, std::vector<std::string>> adj;
        for (const auto& e : map.edges) {
            adj[e.from].push_back(e.to);
            adj[e.to].push_back(e.from);
        }
        std::set<std::string> seen{start};
        std::deque<std::string> queue{start};
        while (!queue.empty()) {
            std::string u = queue.front();
            queue.pop_front();
            for (const auto& v : adj[u])
                if (seen.insert(v).second) queue.push_back(v);
        }
        require(seen.count(goal) > 0, Errc::DisconnectedGoal,
                "goal '" + goal + "' is not connected to start '" + start + "'");
    }

    Problem p;
    p.name = "robotnav";

    StateVariable location;
    location.name = "location";
    location.type = "Location";
    for (const auto& loc : map.locations) location.values.push_back(loc.id);
    StateVariable speed;
    speed.name = "speed";
    speed.type = "Speed";
    speed.values = {"full", "half"};
    p.variables = {location, speed};

    StateVarType locType;
    locType.name = "Location";
    for (const auto& loc : map.locations)
        locType.attributes["area"][loc.id] = std::string(to_string(loc.area));
    p.types["Location"] = locType;
    StateVarType speedType;
    speedType.name = "Speed";
    speedType.attributes["rate"] = {{"full", tables.fullSpeed}, {"half", tables.halfSpeed}};
    p.types["Speed"] = speedType;

    p.actionTypes["MoveTo"] = {"MoveTo", {"distance", "obstacle", "destArea"}};
    p.actionTypes["SetSpeed"] = {"SetSpeed", {"targetSpeed", "switchSeconds"}};

    std::vector<std::string> nonGoal;
    for (const auto& loc : map.locations)
        if (loc.id != goal) nonGoal.push_back(loc.id);

    auto add_move = [&](const std::string& from, const std::string& to, const Edge& e) {
        if (from == goal) return; // the goal is absorbing
        GroundAction a;
        a.name = "move_" + from + "_" + to;
        a.type = "MoveTo";
        a.attributes["distance"] = e.distance;
        a.attributes["obstacle"] = std::string(to_string(e.obstacle));
        a.attributes["destArea"] = std::string(to_string(map.find(to)->area));
        a.pre["location"] = {from};
        Outcome o;
        o.prob = 1.0;
        o.assign["location"] = to;
        a.outcomes.push_back(std::move(o));
        p.actions.push_back(std::move(a));
    };
    for (const auto& e : map.edges) {
        add_move(e.from, e.to, e);
        add_move(e.to, e.from, e);
    }
    for (const char* target : {"full", "half"}) {
        GroundAction a;
        a.name = std::string("set_speed_") + target;
        a.type = "SetSpeed";
        a.attributes["targetSpeed"] =
            target == std::string("full") ? tables.fullSpeed : tables.halfSpeed;
        a.attributes["switchSeconds"] = tables.speedSwitchSeconds;
        a.pre["speed"] = {target == std::string("full") ? "half" : "full"};
        a.pre["location"] = nonGoal;
        Outcome o;
        o.prob = 1.0;
        o.assign["speed"] = target;
        a.outcomes.push_back(std::move(o));
        p.actions.push_back(std::move(a));
    }

    QaSpec time;
    time.name = kTimeQa;
    time.kind = QaKind::Standard;
    time.unit = {"second", "seconds"};
    {
        TableRow moveRow;
        moveRow.when.push_back({"action.type", {AttrValue(std::string("MoveTo"))}});
        moveRow.value = Expr::parse("distance / speed.rate");
        TableRow switchRow;
        switchRow.when.push_back({"action.type", {AttrValue(std::string("SetSpeed"))}});
        switchRow.value = Expr::parse("switchSeconds");
        time.value = ValueFn::table({moveRow, switchRow}, 0.0);
    }
    QaSpec collisions;
    collisions.name = kCollisionQa;
    collisions.kind = QaKind::EventCount;
    collisions.eventName = "collision";
    {
        auto row = [&](const char* density, double prob) {
            TableRow r;
            r.when.push_back({"action.type", {AttrValue(std::string("MoveTo"))}});
            r.when.push_back({"obstacle", {AttrValue(std::string(density))}});
            r.when.push_back({"speed", {AttrValue(std::string("full"))}});
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", prob);
            r.value = Expr::parse(buf);
            return r;
        };
        collisions.value = ValueFn::table(
            {row("sparse", tables.collisionFullSparse), row("dense", tables.collisionFullDense)},
            0.0);
    }
    QaSpec intrusive;
    intrusive.name = kIntrusiveQa;
    intrusive.kind = QaKind::NonStandard;
    {
        auto arrival = [&](const char* area) {
            TableRow r;
            r.when.push_back({"action.type", {AttrValue(std::string("MoveTo"))}});
            r.when.push_back({"destArea", {AttrValue(std::string(area))}});
            r.value = Expr::parse("1");
            return ValueFn::table({r}, 0.0);
        };
        intrusive.events = {
            {"non-intrusive", "non-intrusive", tables.penaltyPublic, arrival("public")},
            {"somewhat-intrusive", "somewhat intrusive", tables.penaltySemiPrivate,
             arrival("semi-private")},
            {"very-intrusive", "very intrusive", tables.penaltyPrivate, arrival("private")},
        };
    }
    p.qas = {time, collisions, intrusive};

    p.scalarization.mode = ScalarizationProfile::Mode::Identity;
    p.scalarization.weights = weights;

    TotalCostCriterion crit;
    crit.goals.push_back({{"location", goal}});
    crit.initial = {{"location", start}, {"speed", "full"}};
    p.criterion = crit;

    p.vocabulary[kTimeQa].noun = "travel time";
    p.vocabulary[kTimeQa].unit = {"second", "seconds"};
    p.vocabulary[kCollisionQa].eventNoun = {"collision", "collisions"};
    p.vocabulary[kIntrusiveQa].noun = "intrusiveness";
    p.vocabulary[kIntrusiveQa].subject = "the robot";
    p.vocabulary[kIntrusiveQa].placeNoun = {"location", "locations"};
    p.vocabulary[kIntrusiveQa].bestPossible = "is already the least intrusive navigation route";
    return p;
}

BuildingMap figure1_map() {
    BuildingMap m;
    auto loc = [&](const char* id, Area a, double x, double y) {
        m.locations.push_back({id, a, x, y});
    };
    // direct corridor S - A - B - G through occupied, cluttered areas
    loc("S", Area::Public, 0, 0);
    loc("A", Area::SemiPrivate, 20, 7);
    loc("B", Area::Private, 40, 14);
    loc("G", Area::Public, 60, 21);
    // clean public perimeter
    loc("P1", Area::Public, 5, 25);
    loc("P2", Area::Public, 25, 30);
    loc("P3", Area::Public, 45, 28);
    // side rooms off both routes
    loc("R1", Area::Private, 5, 35);
    loc("R2", Area::Private, 25, 40);
    loc("R3", Area::Private, 45, 38);
    loc("R4", Area::Private, 22, -3);
    loc("R5", Area::Private, 42, 4);
    loc("R6", Area::SemiPrivate, -6, 6);
    loc("R7", Area::SemiPrivate, 50, 34);
    loc("R8", Area::Private, -2, 30);

    auto edge = [&](const char* a, const char* b, double d, Obstacle o) {
        m.edges.push_back({a, b, d, o});
    };
    edge("S", "A", 20, Obstacle::Sparse);
    edge("A", "B", 20, Obstacle::Dense);
    edge("B", "G", 20, Obstacle::Sparse);
    edge("S", "P1", 25, Obstacle::None);
    edge("P1", "P2", 25, Obstacle::None);
    edge("P2", "P3", 25, Obstacle::None);
    edge("P3", "G", 25, Obstacle::None);
    edge("R1", "P1", 6, Obstacle::None);
    edge("R2", "P2", 6, Obstacle::None);
    edge("R3", "P3", 6, Obstacle::None);
    edge("R4", "A", 6, Obstacle::None);
    edge("R5", "B", 6, Obstacle::None);
    edge("R6", "S", 6, Obstacle::None);
    edge("R7", "P3", 6, Obstacle::None);
    edge("R8", "P1", 6, Obstacle::None);
    return m;
}

std::map<std::string, double> figure1_weights() {
    return {{kTimeQa, 1.0}, {kCollisionQa, 150.0}, {kIntrusiveQa, 10.0}};
}

Problem figure1_instance() {
    Problem p = build_problem(figure1_map(), "S", "G", NavTables{}, figure1_weights());
    p.name = "figure1";
    return p;
}

const char* to_string(ScenarioLabel label) {
    switch (label) {
    case ScenarioLabel::Aligned: return "aligned";
    case ScenarioLabel::Misaligned: return "misaligned";
    case ScenarioLabel::EasyUndominated: return "easy-undominated";
    case ScenarioLabel::EasySuboptimal: return "easy-suboptimal";
    }
    return "aligned";
}

ScenarioLabel scenario_label_from(const std::string& s) {
    if (s == "aligned") return ScenarioLabel::Aligned;
    if (s == "misaligned") return ScenarioLabel::Misaligned;
    if (s == "easy-undominated") return ScenarioLabel::EasyUndominated;
    if (s == "easy-suboptimal") return ScenarioLabel::EasySuboptimal;
    fail(Errc::ParseError, "unknown scenario label '" + s + "'");
}

namespace {

/// Fixed study topology: a 5x3 grid with two horizontal corridors (top and
/// bottom rows) and vertical connectors at every column. Start bottom-left,
/// goal top-right.
struct Topology {
    std::vector<std::string> ids;
    std::vector<std::pair<std::string, std::string>> edges;
    std::vector<double> distances;
    std::string start, goal;
};

Topology study_topology() {
    Topology t;
    auto id = [](int r, int c) { return "r" + std::to_string(r) + "c" + std::to_string(c); };
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 5; ++c) t.ids.push_back(id(r, c));
    for (int r : {0, 2})
        for (int c = 0; c + 1 < 5; ++c) {
            t.edges.emplace_back(id(r, c), id(r, c + 1));
            t.distances.push_back(20.0);
        }
    for (int c = 0; c < 5; ++c)
        for (int r = 0; r + 1 < 3; ++r) {
            t.edges.emplace_back(id(r, c), id(r + 1, c));
            t.distances.push_back(16.0);
        }
    t.start = id(2, 0);
    t.goal = id(0, 4);
    return t;
}

BuildingMap sample_map(Rng& rng, const Topology& topo) {
    BuildingMap m;
    for (size_t i = 0; i < topo.ids.size(); ++i) {
        double u = rng.uniform();
        Area area = u < 0.5 ? Area::Public : (u < 0.8 ? Area::SemiPrivate : Area::Private);
        int col = static_cast<int>(i % 5);
        int row = static_cast<int>(i / 5);
        m.locations.push_back({topo.ids[i], area, 20.0 * col, 16.0 * (2 - row)});
    }
    for (size_t i = 0; i < topo.edges.size(); ++i) {
        double u = rng.uniform();
        Obstacle o = u < 0.5 ? Obstacle::None : (u < 0.8 ? Obstacle::Sparse : Obstacle::Dense);
        m.edges.push_back({topo.edges[i].first, topo.edges[i].second, topo.distances[i], o});
    }
    // endpoints stay public so arrival penalties come from the route interior
    for (auto& loc : m.locations)
        if (loc.id == topo.start || loc.id == topo.goal) loc.area = Area::Public;
    return m;
}

CostProfile sample_profile(Rng& rng) {
    CostProfile p;
    p.perSecond = rng.uniform(0.5, 2.0);
    p.perCollision = rng.log_uniform(30.0, 300.0);
    p.perPenaltyUnit = rng.log_uniform(3.0, 30.0);
    return p;
}

std::vector<double> weight_vector(const ExplicitMdp& mdp, const std::map<std::string, double>& w) {
    std::vector<double> out(static_cast<size_t>(mdp.qa_count()), 0.0);
    for (int qi = 0; qi < mdp.qa_count(); ++qi)
        out[static_cast<size_t>(qi)] = w.at(mdp.problem->qas[static_cast<size_t>(qi)].name);
    return out;
}

double user_cost(const std::vector<double>& weights, const PolicyValuation& val) {
    double c = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) c += weights[i] * val.qaValue[i];
    return c;
}

/// Everything the bundles need for one solved problem. Planning is cheap;
/// the alternatives MILPs are not, so they run only once the cheap
/// plan-level acceptance checks have passed.
struct Solved {
    ExplicitMdp mdp;
    Policy policy;
    PolicyValuation valuation;
    alt::GenerateOutcome alternatives;
    expl::Explanation explanation;
};

Solved plan_only(const Problem& problem) {
    Solved s;
    s.mdp = compile(problem);
    s.policy = solve_optimal(s.mdp);
    s.valuation = evaluate_policy(s.mdp, s.policy);
    return s;
}

void explain_into(Solved& s, const Problem& problem) {
    s.alternatives = alt::generate_alternatives(s.mdp, s.policy, s.valuation);
    s.explanation = expl::render_contrastive(s.mdp, s.valuation, s.alternatives.lowerBounds,
                                             s.alternatives.alternatives, problem.vocabulary);
}

void fill_bundles(Scenario& sc, const Solved& solved) {
    sc.planTable = policy_table(solved.mdp, solved.policy);
    sc.planValuation = solved.valuation;
    sc.alternativeCount = static_cast<int>(solved.alternatives.alternatives.size());

    Json plan = policy_to_json_obj(solved.mdp, solved.policy);
    Json valuation = valuation_to_json_obj(solved.mdp, solved.valuation);
    sc.control = Json{{"plan", plan}, {"valuation", valuation}};
    Json alternatives = Json::array();
    for (const auto& a : solved.alternatives.alternatives)
        alternatives.push_back(alternative_to_json_obj(solved.mdp, a));
    sc.treatment = Json{{"plan", plan},
                        {"valuation", valuation},
                        {"explanation", explanation_to_json_obj(solved.explanation)},
                        {"alternatives", alternatives}};
}

} // namespace

std::vector<Scenario> generate_scenarios(uint64_t seed, int count, const ScenarioConfig& config) {
    require(count >= 2, Errc::InvalidArgument, "scenario generation needs count >= 2");
    Rng rng(seed);
    Topology topo = study_topology();
    std::vector<Scenario> out;

    CostProfile profile;
    for (int k = 0; k < count; ++k) {
        if (k % config.perProfile == 0) profile = sample_profile(rng);
        bool wantAligned = k % 2 == 0; // alternates: halves balance to +-1
        std::map<std::string, double> userWeights = profile_weights(profile);

        bool done = false;
        for (int attempt = 0; attempt < config.retryCap && !done; ++attempt) {
            BuildingMap map = sample_map(rng, topo);
            Problem userProblem =
                build_problem(map, topo.start, topo.goal, config.tables, userWeights);
            ExplicitMdp userMdp = compile(userProblem);
            std::vector<double> w = weight_vector(userMdp, userWeights);
            Policy userOptimal = solve_optimal(userMdp);
            PolicyValuation userVal = evaluate_policy(userMdp, userOptimal);
            double optCost = user_cost(w, userVal);

            // reject maps whose user optimum already meets every per-QA bound:
            // those have a single undominated plan (the "easy" shape)
            bool singleFront = true;
            for (int qi = 0; qi < userMdp.qa_count() && singleFront; ++qi)
                if (userVal.qaValue[static_cast<size_t>(qi)] >
                    oracle::shortest_path_optimum(
                        userMdp, std::vector<double>{qi == 0 ? 1.0 : 0.0, qi == 1 ? 1.0 : 0.0,
                                                     qi == 2 ? 1.0 : 0.0})
                            .cost +
                        1e-9)
                    singleFront = false;
            if (singleFront) continue;

            Scenario sc;
            sc.index = k;
            sc.id = "scenario_" + std::to_string(k);
            sc.map = map;
            sc.start = topo.start;
            sc.goal = topo.goal;
            sc.tables = config.tables;
            sc.userProfile = profile;

            if (wantAligned) {
                sc.label = ScenarioLabel::Aligned;
                sc.robotWeights = userWeights;
                sc.problem = userProblem;
                Solved solved;
                solved.mdp = std::move(userMdp);
                solved.policy = userOptimal;
                solved.valuation = userVal;
                explain_into(solved, sc.problem);
                if (solved.alternatives.alternatives.empty() ||
                    solved.alternatives.alternatives.size() > 3)
                    continue;
                fill_bundles(sc, solved);
            } else {
                bool found = false;
                for (int resample = 0; resample < 20 && !found; ++resample) {
                    std::map<std::string, double> robotWeights;
                    for (const auto& [qa, value] : userWeights)
                        robotWeights[qa] = value * rng.log_uniform(0.1, 10.0);
                    Problem robotProblem =
                        build_problem(map, topo.start, topo.goal, config.tables, robotWeights);
                    Solved solved = plan_only(robotProblem);
                    double planCost = user_cost(w, solved.valuation);
                    // strictly suboptimal but not severely so
                    if (planCost <= optCost * (1.0 + 1e-6)) continue;
                    if (planCost >= optCost * config.severityRatio) continue;
                    explain_into(solved, robotProblem);
                    if (solved.alternatives.alternatives.empty() ||
                        solved.alternatives.alternatives.size() > 3)
                        continue;
                    sc.label = ScenarioLabel::Misaligned;
                    sc.robotWeights = robotWeights;
                    sc.problem = robotProblem;
                    fill_bundles(sc, solved);
                    found = true;
                }
                if (!found) continue;
            }

            require(oracle::verify_scenario(sc, config) == sc.label, Errc::SolverFailure,
                    "generated scenario failed its own oracle verification");
            out.push_back(std::move(sc));
            done = true;
        }
        require(done, Errc::SamplingExhausted,
                "could not realize scenario " + std::to_string(k) + " within " +
                    std::to_string(config.retryCap) + " map samples");
    }
    return out;
}

Scenario generate_easy_scenario(uint64_t seed, ScenarioLabel kind, const ScenarioConfig& config) {
    require(kind == ScenarioLabel::EasyUndominated || kind == ScenarioLabel::EasySuboptimal,
            Errc::InvalidArgument, "easy scenarios are easy-undominated or easy-suboptimal");
    Rng rng(seed);
    Topology topo = study_topology();
    CostProfile profile = sample_profile(rng);
    std::map<std::string, double> userWeights = profile_weights(profile);

    if (kind == ScenarioLabel::EasyUndominated) {
        // one clean corridor dominates: everything else is cluttered/private
        BuildingMap map = sample_map(rng, topo);
        std::set<std::string> onRoute = {"r2c0", "r1c0", "r0c0", "r0c1", "r0c2", "r0c3", "r0c4"};
        for (auto& loc : map.locations)
            loc.area = onRoute.count(loc.id) ? Area::Public : Area::Private;
        for (auto& e : map.edges) {
            bool routeEdge = onRoute.count(e.from) && onRoute.count(e.to);
            e.obstacle = routeEdge ? Obstacle::None : Obstacle::Dense;
        }
        Scenario sc;
        sc.index = 0;
        sc.id = "easy_undominated";
        sc.map = map;
        sc.start = topo.start;
        sc.goal = topo.goal;
        sc.tables = config.tables;
        sc.userProfile = profile;
        sc.robotWeights = userWeights;
        sc.label = ScenarioLabel::EasyUndominated;
        sc.problem = build_problem(map, topo.start, topo.goal, config.tables, userWeights);
        Solved solved = plan_only(sc.problem);
        explain_into(solved, sc.problem);
        fill_bundles(sc, solved);
        require(oracle::verify_scenario(sc, config) == sc.label, Errc::SamplingExhausted,
                "easy-undominated construction failed verification");
        return sc;
    }

    // easy-suboptimal: a cluttered shortcut against a slightly longer clean
    // corridor; a time-only robot takes the shortcut, which is severely
    // expensive under safety- or privacy-heavy user profiles
    for (int attempt = 0; attempt < config.retryCap; ++attempt) {
        BuildingMap map = sample_map(rng, topo);
        std::set<std::string> clean = {"r2c0", "r1c0", "r0c0", "r0c1", "r0c2", "r0c3", "r0c4"};
        for (auto& loc : map.locations)
            loc.area = clean.count(loc.id) ? Area::Public : Area::Private;
        for (auto& e : map.edges) {
            bool cleanEdge = clean.count(e.from) && clean.count(e.to);
            e.obstacle = cleanEdge ? Obstacle::None : Obstacle::Dense;
            if (cleanEdge) e.distance *= 1.25; // the clean way is a detour
        }
        std::map<std::string, double> robotWeights = {
            {kTimeQa, 1.0}, {kCollisionQa, 1e-3}, {kIntrusiveQa, 1e-3}};
        Problem userProblem = build_problem(map, topo.start, topo.goal, config.tables, userWeights);
        ExplicitMdp userMdp = compile(userProblem);
        std::vector<double> w = weight_vector(userMdp, userWeights);
        double optCost = user_cost(w, evaluate_policy(userMdp, solve_optimal(userMdp)));
        Problem robotProblem =
            build_problem(map, topo.start, topo.goal, config.tables, robotWeights);
        Solved solved = plan_only(robotProblem);
        double planCost = user_cost(w, solved.valuation);
        if (planCost < optCost * config.severityRatio) {
            profile = sample_profile(rng); // try a more safety-sensitive user
            userWeights = profile_weights(profile);
            continue;
        }
        explain_into(solved, robotProblem);
        Scenario sc;
        sc.index = 0;
        sc.id = "easy_suboptimal";
        sc.map = map;
        sc.start = topo.start;
        sc.goal = topo.goal;
        sc.tables = config.tables;
        sc.userProfile = profile;
        sc.robotWeights = robotWeights;
        sc.label = ScenarioLabel::EasySuboptimal;
        sc.problem = robotProblem;
        fill_bundles(sc, solved);
        if (oracle::verify_scenario(sc, config) != sc.label) continue;
        return sc;
    }
    fail(Errc::SamplingExhausted, "could not realize an easy-suboptimal scenario");
}

Json scenario_to_json_obj(const Scenario& sc) {
    Json map;
    map["locations"] = Json::array();
    for (const auto& loc : sc.map.locations)
        map["locations"].push_back(Json{{"id", loc.id},
                                        {"area", to_string(loc.area)},
                                        {"x", loc.x},
                                        {"y", loc.y}});
    map["edges"] = Json::array();
    for (const auto& e : sc.map.edges)
        map["edges"].push_back(Json{{"from", e.from},
                                    {"to", e.to},
                                    {"distance", e.distance},
                                    {"obstacle", to_string(e.obstacle)}});
    Json weights = Json::object();
    for (const auto& [qa, w] : sc.robotWeights) weights[qa] = w;
    return Json{{"id", sc.id},
                {"index", sc.index},
                {"label", to_string(sc.label)},
                {"map", map},
                {"start", sc.start},
                {"goal", sc.goal},
                {"tables", nav_tables_to_json_obj(sc.tables)},
                {"userProfile",
                 Json{{"perSecond", sc.userProfile.perSecond},
                      {"perCollision", sc.userProfile.perCollision},
                      {"perPenaltyUnit", sc.userProfile.perPenaltyUnit}}},
                {"robotWeights", weights},
                {"problem", problem_to_json_obj(sc.problem)},
                {"control", sc.control},
                {"treatment", sc.treatment},
                {"alternativeCount", sc.alternativeCount}};
}

Scenario scenario_from_json_obj(const Json& j) {
    Scenario sc;
    sc.id = j.value("id", "scenario");
    sc.index = j.value("index", 0);
    sc.label = scenario_label_from(j.at("label").get<std::string>());
    for (const auto& loc : j.at("map").at("locations"))
        sc.map.locations.push_back({loc.at("id").get<std::string>(),
                                    area_from(loc.at("area").get<std::string>()),
                                    loc.value("x", 0.0), loc.value("y", 0.0)});
    for (const auto& e : j.at("map").at("edges"))
        sc.map.edges.push_back({e.at("from").get<std::string>(), e.at("to").get<std::string>(),
                                e.at("distance").get<double>(),
                                obstacle_from(e.at("obstacle").get<std::string>())});
    sc.start = j.at("start").get<std::string>();
    sc.goal = j.at("goal").get<std::string>();
    sc.tables = nav_tables_from_json_obj(j.at("tables"));
    sc.userProfile.perSecond = j.at("userProfile").at("perSecond").get<double>();
    sc.userProfile.perCollision = j.at("userProfile").at("perCollision").get<double>();
    sc.userProfile.perPenaltyUnit = j.at("userProfile").at("perPenaltyUnit").get<double>();
    for (const auto& [qa, w] : j.at("robotWeights").items()) sc.robotWeights[qa] = w.get<double>();
    sc.problem = problem_from_json_obj(j.at("problem"));
    sc.control = j.value("control", Json::object());
    sc.treatment = j.value("treatment", Json::object());
    sc.alternativeCount = j.value("alternativeCount", 0);
    // rebuild the plan table from the control bundle
    if (sc.control.contains("plan"))
        for (const auto& entry : sc.control.at("plan").at("choices"))
            sc.planTable.emplace_back(entry.at("state").get<std::string>(),
                                      entry.at("action").get<std::string>());
    return sc;
}

} // namespace xmdp::robotnav

namespace xmdp::oracle {

robotnav::ScenarioLabel verify_scenario(const robotnav::Scenario& scenario,
                                        const robotnav::ScenarioConfig& config) {
    ExplicitMdp mdp = compile(scenario.problem);
    std::vector<double> w(static_cast<size_t>(mdp.qa_count()), 0.0);
    {
        auto weights = robotnav::profile_weights(scenario.userProfile);
        for (int qi = 0; qi < mdp.qa_count(); ++qi)
            w[static_cast<size_t>(qi)] = weights.at(mdp.problem->qas[static_cast<size_t>(qi)].name);
    }

    Policy plan = policy_from_table(mdp, scenario.planTable);
    OracleValuation planVal = evaluate_choice(mdp, plan.choice);
    require(planVal.valid, Errc::ImproperPolicy, "scenario plan is not evaluable");
    double planCost = 0.0;
    for (size_t i = 0; i < w.size(); ++i) planCost += w[i] * planVal.qa[i];

    double optCost;
    std::vector<double> optQa;
    constexpr long kCap = 1000000;
    if (policy_space_size(mdp) <= static_cast<long double>(kCap)) {
        optCost = std::numeric_limits<double>::infinity();
        for_each_policy(mdp, kCap, [&](const std::vector<int>& choice) {
            OracleValuation v = evaluate_choice(mdp, choice);
            if (!v.valid) return;
            double c = 0.0;
            for (size_t i = 0; i < w.size(); ++i) c += w[i] * v.qa[i];
            if (c < optCost - 1e-12) {
                optCost = c;
                optQa = v.qa;
            }
        });
    } else {
        require(mdp.totalCost && mdp.deterministic_transitions(), Errc::CapExceeded,
                "scenario instance is neither enumerable nor deterministic");
        PathOptimum opt = shortest_path_optimum(mdp, w);
        optCost = opt.cost;
        optQa = evaluate_choice(mdp, opt.choice).qa;
    }

    double tol = 1e-9 + 1e-6 * std::abs(optCost);
    if (planCost <= optCost + tol) {
        // single undominated plan: the optimum achieves every per-QA bound
        bool singleFront = true;
        for (int qi = 0; qi < mdp.qa_count() && singleFront; ++qi) {
            std::vector<double> unit(static_cast<size_t>(mdp.qa_count()), 0.0);
            unit[static_cast<size_t>(qi)] = 1.0;
            double bound;
            if (policy_space_size(mdp) <= static_cast<long double>(kCap))
                bound = best_weighted_value(mdp, unit, kCap);
            else
                bound = shortest_path_optimum(mdp, unit).cost;
            if (optQa[static_cast<size_t>(qi)] > bound + 1e-9) singleFront = false;
        }
        return singleFront ? robotnav::ScenarioLabel::EasyUndominated
                           : robotnav::ScenarioLabel::Aligned;
    }
    return planCost >= optCost * config.severityRatio ? robotnav::ScenarioLabel::EasySuboptimal
                                                      : robotnav::ScenarioLabel::Misaligned;
}

} // namespace xmdp::oracle
