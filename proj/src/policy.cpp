#include "xmdp/policy.hpp"

#include <deque>

namespace xmdp {

std::vector<char> reachable_under(const ExplicitMdp& mdp, const Policy& policy) {
    std::vector<char> seen(static_cast<size_t>(mdp.state_count()), 0);
    std::deque<int> queue;
    for (int s : mdp.initial_states()) {
        if (!seen[static_cast<size_t>(s)]) {
            seen[static_cast<size_t>(s)] = 1;
            queue.push_back(s);
        }
    }
    while (!queue.empty()) {
        int s = queue.front();
        queue.pop_front();
        int slot = policy.choice[static_cast<size_t>(s)];
        if (slot < 0) continue;
        for (const auto& [t, prob] : mdp.acts[static_cast<size_t>(s)][static_cast<size_t>(slot)].succ) {
            if (prob > 0.0 && !seen[static_cast<size_t>(t)]) {
                seen[static_cast<size_t>(t)] = 1;
                queue.push_back(t);
            }
        }
    }
    return seen;
}

Policy make_policy(const ExplicitMdp& mdp, std::vector<int> choice, Policy::Provenance prov) {
    require(choice.size() == static_cast<size_t>(mdp.state_count()), Errc::LengthMismatch,
            "policy choice vector does not match state count");
    Policy p;
    p.choice = std::move(choice);
    p.provenance = prov;
    p.reachable = reachable_under(mdp, p);
    return p;
}

bool Policy::same_decisions(const ExplicitMdp& mdp, const Policy& other) const {
    for (int s = 0; s < mdp.state_count(); ++s) {
        if (!reachable[static_cast<size_t>(s)] && !other.reachable[static_cast<size_t>(s)]) continue;
        if (mdp.totalCost && mdp.goal[static_cast<size_t>(s)]) continue;
        if (choice[static_cast<size_t>(s)] != other.choice[static_cast<size_t>(s)]) return false;
    }
    return true;
}

std::vector<std::pair<std::string, std::string>> policy_table(const ExplicitMdp& mdp,
                                                              const Policy& policy) {
    std::vector<std::pair<std::string, std::string>> out;
    for (int s = 0; s < mdp.state_count(); ++s) {
        int slot = policy.choice[static_cast<size_t>(s)];
        if (slot < 0) continue;
        out.emplace_back(mdp.stateKeys[static_cast<size_t>(s)], mdp.action_name(s, slot));
    }
    return out;
}

Policy policy_from_table(const ExplicitMdp& mdp,
                         const std::vector<std::pair<std::string, std::string>>& table,
                         Policy::Provenance prov) {
    std::vector<int> choice(static_cast<size_t>(mdp.state_count()), -1);
    for (const auto& [key, actionName] : table) {
        int state = -1;
        for (int s = 0; s < mdp.state_count(); ++s)
            if (mdp.stateKeys[static_cast<size_t>(s)] == key) {
                state = s;
                break;
            }
        require(state >= 0, Errc::InvalidArgument, "policy table references unknown state '" + key + "'");
        int slot = -1;
        const auto& as = mdp.acts[static_cast<size_t>(state)];
        for (size_t i = 0; i < as.size(); ++i)
            if (mdp.problem->actions[static_cast<size_t>(as[i].actionId)].name == actionName) {
                slot = static_cast<int>(i);
                break;
            }
        require(slot >= 0, Errc::InvalidArgument,
                "action '" + actionName + "' is not applicable at state '" + key + "'");
        choice[static_cast<size_t>(state)] = slot;
    }
    return make_policy(mdp, std::move(choice), prov);
}

} // namespace xmdp
