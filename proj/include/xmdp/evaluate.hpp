#pragma once

#include "xmdp/policy.hpp"

#include <map>
#include <string>
#include <vector>

namespace xmdp {

/// Throws ImproperPolicy unless the policy reaches the goal set with
/// probability one from the start state (total-cost models only).
void check_proper(const ExplicitMdp& mdp, const Policy& policy);

/// Per-state expected total QA-i cost-to-goal under the policy. Goal states
/// have value zero; solves the policy's linear system to residual <= 1e-9.
std::vector<double> evaluate_total_cost(const ExplicitMdp& mdp, const Policy& policy, int qaIndex);

/// Long-run average QA-i cost (gain) of the policy's chain. Requires a single
/// recurrent class reachable from the support of alpha; otherwise throws
/// Multichain.
double evaluate_average_cost(const ExplicitMdp& mdp, const Policy& policy, int qaIndex);

/// Expected number of visits to each state before goal absorption (total-cost).
std::vector<double> visit_counts(const ExplicitMdp& mdp, const Policy& policy);

/// Stationary distribution of the policy's chain (average-cost, unichain).
std::vector<double> stationary_distribution(const ExplicitMdp& mdp, const Policy& policy);

/// Recurrent classes of the policy's chain that are reachable from the
/// initial states (each class is a sorted state list). With fromAllStates the
/// whole chain is analyzed regardless of reachability.
std::vector<std::vector<int>> recurrent_classes(const ExplicitMdp& mdp, const Policy& policy,
                                                bool fromAllStates = false);

/// Expected count (total-cost) or long-run rate (average-cost) of every
/// declared event under the policy.
std::map<std::string, double> event_counts(const ExplicitMdp& mdp, const Policy& policy);

/// Full valuation: per-QA values, event counts and scalarized cost.
PolicyValuation evaluate_policy(const ExplicitMdp& mdp, const Policy& policy);

/// Deterministic policy minimizing the scalarized objective: value iteration
/// to Bellman residual 1e-9 for total cost, policy iteration for average
/// cost. Throws NoProperPolicy when no policy reaches the goal set.
Policy solve_optimal(const ExplicitMdp& mdp);

/// Optimal policy for a single QA in isolation (unit weight, no normalizer).
Policy solve_single_qa(const ExplicitMdp& mdp, int qaIndex);

/// Best achievable QA-i value over all deterministic policies.
double per_qa_lower_bound(const ExplicitMdp& mdp, int qaIndex);

/// States from which the goal set can be reached almost surely under some
/// policy, together with the per-state actions that stay inside that region.
struct ProperRegion {
    std::vector<char> inRegion;
    std::vector<std::vector<int>> safeActions; // slots into mdp.acts[s]
};
ProperRegion proper_region(const ExplicitMdp& mdp);

} // namespace xmdp
