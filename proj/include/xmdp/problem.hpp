#pragma once

#include "xmdp/expr.hpp"

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace xmdp {

/// A state-variable type: named attributes with one value per member of the
/// variable's domain (e.g. type Location with attribute "area").
struct StateVarType {
    std::string name;
    // attribute name -> (domain value -> attribute value)
    std::map<std::string, std::map<std::string, AttrValue>> attributes;
};

struct ActionType {
    std::string name;
    std::vector<std::string> attributes; // declared attribute names
};

struct StateVariable {
    std::string name;
    std::string type;                // key into Problem::types, may be empty
    std::vector<std::string> values; // finite domain, canonical order
};

/// One probabilistic outcome of a ground action: a partial assignment
/// applied to the current state.
struct Outcome {
    double prob = 1.0;
    std::map<std::string, std::string> assign;
};

struct GroundAction {
    std::string name;
    std::string type; // key into Problem::actionTypes, may be empty
    std::map<std::string, AttrValue> attributes;
    // applicability: variable -> allowed values (conjunction over variables;
    // a variable absent from the map is unconstrained)
    std::map<std::string, std::vector<std::string>> pre;
    std::vector<Outcome> outcomes;
};

enum class QaKind { EventCount, Standard, NonStandard };

struct UnitText {
    std::string singular;
    std::string plural;
};

/// One named event of a non-standard QA, with its severity penalty and a
/// per-epoch occurrence probability.
struct QaEvent {
    std::string name;
    std::string label; // display text, e.g. "somewhat intrusive"
    double penalty = 0.0;
    ValueFn prob;
};

struct QaSpec {
    std::string name;
    QaKind kind = QaKind::Standard;
    // Standard: value + unit. EventCount: value = per-epoch event probability.
    ValueFn value;
    UnitText unit;
    std::string eventName; // EventCount only
    // NonStandard: the QA value is the penalty-weighted sum of event probs.
    std::vector<QaEvent> events;
};

struct Normalizer {
    double scale = 1.0;
    double offset = 0.0;
};

struct ScalarizationProfile {
    enum class Mode { Identity, MinMax, Explicit };
    Mode mode = Mode::MinMax;
    std::map<std::string, double> weights;          // QA name -> k > 0
    std::map<std::string, Normalizer> normalizers;  // Explicit mode only
};

/// Condition on a state: conjunction of variable = value.
using PartialState = std::map<std::string, std::string>;
/// Complete assignment: every variable present.
using StateAssignment = std::map<std::string, std::string>;

struct TotalCostCriterion {
    std::vector<PartialState> goals; // a state is a goal if it matches any entry
    StateAssignment initial;
};

struct AverageCostCriterion {
    std::vector<std::pair<StateAssignment, double>> initial; // support of alpha
};

using Criterion = std::variant<TotalCostCriterion, AverageCostCriterion>;

/// Domain vocabulary used by the explanation renderer.
struct QaVocabulary {
    std::string noun;                           // "travel time", "intrusiveness"
    UnitText unit;                              // standard QAs
    UnitText eventNoun;                         // event-count QAs: "collision(s)"
    std::string subject = "the robot";          // non-standard sentence subject
    UnitText placeNoun = {"location", "locations"};
    std::string bestPossible;                   // optional override phrase
};

using Vocabulary = std::map<std::string, QaVocabulary>;

/// The full planning problem: a factored, QA-annotated multi-objective MDP.
struct Problem {
    std::string name;
    std::vector<StateVariable> variables;
    std::map<std::string, StateVarType> types;
    std::map<std::string, ActionType> actionTypes;
    std::vector<GroundAction> actions;
    Criterion criterion;
    std::vector<QaSpec> qas;
    ScalarizationProfile scalarization;
    Vocabulary vocabulary;

    bool is_total_cost() const { return std::holds_alternative<TotalCostCriterion>(criterion); }

    /// Structural validation: domains nonempty and duplicate-free, outcome
    /// probabilities summing to one, positive weights, penalty ordering,
    /// attribute references resolvable at grounding time.
    void validate() const;

    int variable_index(const std::string& name) const; // -1 if absent
    int qa_index(const std::string& name) const;       // -1 if absent
};

} // namespace xmdp
