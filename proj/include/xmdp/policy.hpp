#pragma once

#include "xmdp/explicit_mdp.hpp"

#include <map>
#include <string>
#include <vector>

namespace xmdp {

/// Deterministic stationary policy over an ExplicitMdp. `choice[s]` is a slot
/// into `mdp.acts[s]` (-1 where undefined, e.g. goal or unreached states).
struct Policy {
    enum class Provenance { Planner, MilpAlternative, External };

    std::vector<int> choice;
    std::vector<char> reachable; // reachable from the initial state(s) under this policy
    Provenance provenance = Provenance::External;
    int targetQa = -1; // MilpAlternative only

    /// Decision equality on the union of both reachability sets. Choices at
    /// unreached states are arbitrary and do not count.
    bool same_decisions(const ExplicitMdp& mdp, const Policy& other) const;
};

/// Expected per-QA values, expected event counts (rates under average cost)
/// and the scalarized cost of one policy.
struct PolicyValuation {
    std::vector<double> qaValue; // D_i
    std::map<std::string, double> eventCounts;
    double scalarizedCost = 0.0;
};

/// Marks the states reachable from the initial state(s) along the policy's
/// own choices. Undefined choices stop the walk.
std::vector<char> reachable_under(const ExplicitMdp& mdp, const Policy& policy);

/// Builds a policy from explicit action slots, computing reachability.
Policy make_policy(const ExplicitMdp& mdp, std::vector<int> choice,
                   Policy::Provenance prov = Policy::Provenance::External);

/// Serializable form: state key -> action name, in canonical state order.
std::vector<std::pair<std::string, std::string>> policy_table(const ExplicitMdp& mdp,
                                                              const Policy& policy);
Policy policy_from_table(const ExplicitMdp& mdp,
                         const std::vector<std::pair<std::string, std::string>>& table,
                         Policy::Provenance prov = Policy::Provenance::External);

} // namespace xmdp
