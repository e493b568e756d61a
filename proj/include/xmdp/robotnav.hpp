#pragma once

#include "xmdp/json_io.hpp"
#include "xmdp/problem.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace xmdp::robotnav {

enum class Area { Public, SemiPrivate, Private };
enum class Obstacle { None, Sparse, Dense };

const char* to_string(Area a);
const char* to_string(Obstacle o);

struct Location {
    std::string id;
    Area area = Area::Public;
    double x = 0.0, y = 0.0; // for rendering only
};

struct Edge {
    std::string from, to;
    double distance = 1.0;
    Obstacle obstacle = Obstacle::None;
};

struct BuildingMap {
    std::vector<Location> locations;
    std::vector<Edge> edges;

    const Location* find(const std::string& id) const;
    /// Unique ids, positive distances, endpoints declared, connected graph.
    void validate() const;
};

/// All numeric domain constants live here; the planning model reads nothing
/// else.
struct NavTables {
    double fullSpeed = 1.0;          // m/s
    double halfSpeed = 0.5;          // m/s
    double speedSwitchSeconds = 1.0; // time cost of toggling the setting
    double collisionFullSparse = 0.2;
    double collisionFullDense = 0.4; // half speed is collision-free
    double penaltyPublic = 0.0;
    double penaltySemiPrivate = 1.0;
    double penaltyPrivate = 3.0;
};

Json nav_tables_to_json_obj(const NavTables& t);
NavTables nav_tables_from_json_obj(const Json& j);

/// Hypothetical user preference: a dollar amount per unit of each QA.
struct CostProfile {
    double perSecond = 1.0;
    double perCollision = 100.0;
    double perPenaltyUnit = 10.0;
};

/// QA-name keyed weight map equivalent to the profile.
std::map<std::string, double> profile_weights(const CostProfile& profile);

/// Grounds the navigation planning problem: states are location x speed,
/// actions are moves along edges plus speed toggles; travel time, expected
/// collisions and intrusiveness QAs come from the tables. Throws
/// UnknownLocation / DisconnectedGoal on bad endpoints.
Problem build_problem(const BuildingMap& map, const std::string& start, const std::string& goal,
                      const NavTables& tables, const std::map<std::string, double>& weights);

/// The bundled two-route tradeoff instance: a short direct corridor through
/// obstacle-laden private areas against a clean public perimeter. The default
/// weights select the perimeter; the direct corridor survives as the
/// time-improving alternative.
Problem figure1_instance();
BuildingMap figure1_map();
std::map<std::string, double> figure1_weights();

enum class ScenarioLabel { Aligned, Misaligned, EasyUndominated, EasySuboptimal };
const char* to_string(ScenarioLabel label);
ScenarioLabel scenario_label_from(const std::string& s);

struct Scenario {
    int index = 0;
    std::string id;
    BuildingMap map;
    std::string start, goal;
    NavTables tables;
    CostProfile userProfile;
    std::map<std::string, double> robotWeights;
    ScenarioLabel label = ScenarioLabel::Aligned;
    Problem problem; // the robot's planning problem (robot weights)
    std::vector<std::pair<std::string, std::string>> planTable;
    PolicyValuation planValuation;
    int alternativeCount = 0;
    Json control;   // what the control group sees: plan + valuation
    Json treatment; // control plus the contrastive explanation bundle
};

struct ScenarioConfig {
    int perProfile = 3;      // scenarios sharing one cost profile
    int retryCap = 80;       // map resamples per scenario before giving up
    double severityRatio = 2.0; // user-cost ratio that makes misalignment "easy"
    NavTables tables;
};

/// Deterministic study-scenario generation: `count` scenarios over fixed
/// topology with random obstacle and area placement, alternating aligned and
/// misaligned, every label oracle-verified and every treatment bundle
/// carrying one to three alternatives. Throws SamplingExhausted when a
/// scenario cannot be realized within the retry cap.
std::vector<Scenario> generate_scenarios(uint64_t seed, int count,
                                         const ScenarioConfig& config = {});

/// Validation-style extra scenarios (the "easy problem" kinds).
Scenario generate_easy_scenario(uint64_t seed, ScenarioLabel kind,
                                const ScenarioConfig& config = {});

Json scenario_to_json_obj(const Scenario& scenario);
Scenario scenario_from_json_obj(const Json& j);

} // namespace xmdp::robotnav

namespace xmdp::oracle {

/// Recomputes a scenario's alignment label from scratch: exhaustive policy
/// enumeration when the instance fits the cap, otherwise the exact
/// shortest-path oracle for deterministic instances.
robotnav::ScenarioLabel verify_scenario(const robotnav::Scenario& scenario,
                                        const robotnav::ScenarioConfig& config = {});

} // namespace xmdp::oracle
