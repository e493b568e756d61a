#pragma once

#include "xmdp/problem.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace xmdp {

/// One grounded action at one state.
struct ExplicitAction {
    int actionId = -1; // index into Problem::actions
    std::vector<std::pair<int, double>> succ; // (state index, probability), merged duplicates
    std::vector<double> qa;       // per QA, order of Problem::qas
    std::vector<double> eventProb; // per ExplicitMdp::events entry
    double cost = 0.0;            // scalarized cost under the resolved profile
};

/// Flattened event table across all QA specs. Event-count QAs contribute a
/// single event with penalty 1 so that penalty-weighted counts reproduce the
/// QA value uniformly.
struct FlatEvent {
    int qa = -1;
    std::string name;
    std::string label;
    double penalty = 1.0;
};

/// Per-QA linear transforms C_i = scale_i * QA_i + offset_i and weights k_i.
struct ResolvedScalarization {
    std::vector<double> weight;
    std::vector<double> scale;
    std::vector<double> offset;
};

/// Weighted sum of normalized QA values: sum_i k_i (scale_i q_i + offset_i).
double scalarized_cost(const ResolvedScalarization& s, std::span<const double> qaValues);

/// Grounded model: states reachable from the start (or the support of alpha),
/// enumerated in canonical lexicographic order over the variable domains
/// (first declared variable most significant). Immutable after compile.
struct ExplicitMdp {
    std::shared_ptr<const Problem> problem;
    bool totalCost = true;

    std::vector<std::vector<int>> stateValues; // per state: value index per variable
    std::vector<std::string> stateKeys;        // "var=value,..." in declaration order
    std::vector<char> goal;                    // total-cost criterion
    int s0 = -1;                               // total-cost criterion
    std::vector<double> alpha;                 // average-cost criterion, per state

    std::vector<std::vector<ExplicitAction>> acts; // per state
    std::vector<FlatEvent> events;
    ResolvedScalarization scal;

    int state_count() const { return static_cast<int>(stateKeys.size()); }
    int qa_count() const { return static_cast<int>(problem->qas.size()); }
    int event_count() const { return static_cast<int>(events.size()); }

    /// Initial states (start state, or support of alpha).
    std::vector<int> initial_states() const;

    /// Total number of grounded (state, action) pairs.
    long pair_count() const;

    /// Smallest positive transition probability over all grounded pairs.
    double min_positive_prob() const;

    const std::string& variable_value(int state, int var) const;
    int find_state(const StateAssignment& assign) const; // -1 if absent / pruned
    std::string action_name(int state, int actionSlot) const;

    /// True when every grounded action has exactly one successor.
    bool deterministic_transitions() const;
};

/// Grounds and validates a problem. Throws InvalidTransition, UnreachableGoal,
/// GoalNotAbsorbing or UndefinedAttribute on contract violations.
ExplicitMdp compile(const Problem& problem);

} // namespace xmdp
