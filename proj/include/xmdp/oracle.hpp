#pragma once

#include "xmdp/explicit_mdp.hpp"
#include "xmdp/policy.hpp"

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace xmdp::oracle {

/// Product of per-state action counts over states that have actions.
long double policy_space_size(const ExplicitMdp& mdp);

/// Enumerates every deterministic stationary policy in canonical (odometer)
/// order, lowest state index fastest. Throws CapExceeded when the policy
/// space exceeds `cap`.
void for_each_policy(const ExplicitMdp& mdp, long cap,
                     const std::function<void(const std::vector<int>&)>& fn);

/// Ground-truth valuation of one choice vector, computed independently of the
/// valuation module (own reachability walk, own dense elimination).
struct OracleValuation {
    bool valid = false; // proper (total-cost) / unichain (average-cost)
    std::vector<double> qa;
    double scalarized = 0.0;
    std::map<std::string, double> eventCounts;
};
OracleValuation evaluate_choice(const ExplicitMdp& mdp, const std::vector<int>& choice);

/// Dominance with tolerance: a is everywhere <= b + tol and somewhere
/// < b - tol.
bool dominates(std::span<const double> a, std::span<const double> b, double tol = 1e-9);

struct FrontEntry {
    std::vector<int> choice; // representative policy
    std::vector<double> qa;
};

struct ParetoFront {
    std::vector<FrontEntry> entries;

    /// True when no front member strictly dominates the vector; membership in
    /// the exact front up to the dominance tolerance.
    bool admits(std::span<const double> qa, double tol = 1e-9) const;
};

/// Exact front over valid deterministic policies by pairwise dominance
/// filtering; one representative per distinct value vector.
ParetoFront pareto_front(const ExplicitMdp& mdp, long cap = 1000000);

/// Exact optimum of sum_i w_i * D_i over deterministic policies for
/// total-cost models with deterministic transitions, via Dijkstra over the
/// state graph (requires nonnegative edge costs).
struct PathOptimum {
    double cost = 0.0;
    std::vector<int> choice; // -1 off the optimal path
};
PathOptimum shortest_path_optimum(const ExplicitMdp& mdp, std::span<const double> qaWeights);

/// Best achievable weighted QA value over deterministic policies: policy
/// enumeration when the space fits the cap, the Dijkstra oracle for larger
/// deterministic models; CapExceeded otherwise.
double best_weighted_value(const ExplicitMdp& mdp, std::span<const double> qaWeights,
                           long cap = 1000000);

} // namespace xmdp::oracle
