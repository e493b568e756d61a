#include "xmdp/explicit_mdp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>

namespace xmdp {

namespace {

constexpr long kMaxReachableStates = 500000;

struct Grounder {
    const Problem& p;
    int nvars;
    std::vector<int> domainSize;
    // map from full-product rank to compact id (assigned after sorting)
    std::map<long long, std::vector<int>> discovered; // rank -> value indices

    explicit Grounder(const Problem& problem) : p(problem) {
        nvars = static_cast<int>(p.variables.size());
        domainSize.resize(static_cast<size_t>(nvars));
        for (int v = 0; v < nvars; ++v)
            domainSize[static_cast<size_t>(v)] =
                static_cast<int>(p.variables[static_cast<size_t>(v)].values.size());
    }

    long long rank_of(const std::vector<int>& values) const {
        long long r = 0;
        for (int v = 0; v < nvars; ++v) {
            r = r * domainSize[static_cast<size_t>(v)] + values[static_cast<size_t>(v)];
            require(r >= 0, Errc::InvalidArgument, "state space too large to enumerate");
        }
        return r;
    }

    int value_index(int var, const std::string& value) const {
        const auto& dom = p.variables[static_cast<size_t>(var)].values;
        for (size_t i = 0; i < dom.size(); ++i)
            if (dom[i] == value) return static_cast<int>(i);
        fail(Errc::InvalidArgument, "value '" + value + "' not in the domain of '" +
                                        p.variables[static_cast<size_t>(var)].name + "'");
    }

    std::vector<int> to_values(const StateAssignment& assign) const {
        std::vector<int> out(static_cast<size_t>(nvars), -1);
        for (const auto& [var, value] : assign) {
            int vi = p.variable_index(var);
            require(vi >= 0, Errc::InvalidArgument, "unknown variable '" + var + "'");
            out[static_cast<size_t>(vi)] = value_index(vi, value);
        }
        for (int v = 0; v < nvars; ++v)
            require(out[static_cast<size_t>(v)] >= 0, Errc::InvalidArgument,
                    "assignment is missing variable '" + p.variables[static_cast<size_t>(v)].name + "'");
        return out;
    }

    bool applicable(const GroundAction& a, const std::vector<int>& state) const {
        for (const auto& [var, allowed] : a.pre) {
            int vi = p.variable_index(var);
            const std::string& current =
                p.variables[static_cast<size_t>(vi)].values[static_cast<size_t>(
                    state[static_cast<size_t>(vi)])];
            bool ok = false;
            for (const auto& v : allowed) ok = ok || v == current;
            if (!ok) return false;
        }
        return true;
    }

    std::vector<int> apply_outcome(const Outcome& o, const std::vector<int>& state) const {
        std::vector<int> next = state;
        for (const auto& [var, value] : o.assign) {
            int vi = p.variable_index(var);
            next[static_cast<size_t>(vi)] = value_index(vi, value);
        }
        return next;
    }

    bool matches(const PartialState& cond, const std::vector<int>& state) const {
        for (const auto& [var, value] : cond) {
            int vi = p.variable_index(var);
            const std::string& current =
                p.variables[static_cast<size_t>(vi)].values[static_cast<size_t>(
                    state[static_cast<size_t>(vi)])];
            if (current != value) return false;
        }
        return true;
    }
};

AttrContext make_context(const Problem& p, const std::vector<int>& state, const GroundAction& a) {
    AttrContext ctx;
    for (size_t v = 0; v < p.variables.size(); ++v) {
        const StateVariable& sv = p.variables[v];
        const std::string& value = sv.values[static_cast<size_t>(state[v])];
        ctx.set_var(sv.name, value);
        if (!sv.type.empty()) {
            const StateVarType& t = p.types.at(sv.type);
            for (const auto& [attr, perValue] : t.attributes)
                ctx.set_var_attr(sv.name, attr, perValue.at(value));
        }
    }
    ctx.set_action(a.type, a.name);
    for (const auto& [attr, value] : a.attributes) ctx.set_action_attr(attr, value);
    return ctx;
}

} // namespace

double scalarized_cost(const ResolvedScalarization& s, std::span<const double> qaValues) {
    require(qaValues.size() == s.weight.size(), Errc::LengthMismatch,
            "QA vector length " + std::to_string(qaValues.size()) + " does not match profile size " +
                std::to_string(s.weight.size()));
    double total = 0.0;
    for (size_t i = 0; i < qaValues.size(); ++i)
        total += s.weight[i] * (s.scale[i] * qaValues[i] + s.offset[i]);
    return total;
}

std::vector<int> ExplicitMdp::initial_states() const {
    if (totalCost) return {s0};
    std::vector<int> out;
    for (int s = 0; s < state_count(); ++s)
        if (alpha[static_cast<size_t>(s)] > 0.0) out.push_back(s);
    return out;
}

long ExplicitMdp::pair_count() const {
    long n = 0;
    for (const auto& as : acts) n += static_cast<long>(as.size());
    return n;
}

double ExplicitMdp::min_positive_prob() const {
    double p = 1.0;
    for (const auto& as : acts)
        for (const auto& a : as)
            for (const auto& [t, prob] : a.succ)
                if (prob > 0.0) p = std::min(p, prob);
    return p;
}

const std::string& ExplicitMdp::variable_value(int state, int var) const {
    return problem->variables[static_cast<size_t>(var)]
        .values[static_cast<size_t>(stateValues[static_cast<size_t>(state)][static_cast<size_t>(var)])];
}

int ExplicitMdp::find_state(const StateAssignment& assign) const {
    for (int s = 0; s < state_count(); ++s) {
        bool match = true;
        for (size_t v = 0; v < problem->variables.size() && match; ++v) {
            auto it = assign.find(problem->variables[v].name);
            if (it == assign.end() || variable_value(s, static_cast<int>(v)) != it->second)
                match = false;
        }
        if (match) return s;
    }
    return -1;
}

std::string ExplicitMdp::action_name(int state, int actionSlot) const {
    return problem->actions[static_cast<size_t>(
                                acts[static_cast<size_t>(state)][static_cast<size_t>(actionSlot)]
                                    .actionId)]
        .name;
}

bool ExplicitMdp::deterministic_transitions() const {
    for (const auto& as : acts)
        for (const auto& a : as)
            if (a.succ.size() != 1) return false;
    return true;
}

ExplicitMdp compile(const Problem& input) {
    input.validate();

    ExplicitMdp mdp;
    mdp.problem = std::make_shared<Problem>(input);
    const Problem& p = *mdp.problem;
    Grounder g(p);
    mdp.totalCost = p.is_total_cost();

    // Breadth-first discovery from the initial state(s); only reachable
    // states are kept. Canonical order comes from the lexicographic rank.
    std::vector<std::vector<int>> frontier;
    if (mdp.totalCost) {
        frontier.push_back(g.to_values(std::get<TotalCostCriterion>(p.criterion).initial));
    } else {
        for (const auto& [assign, prob] : std::get<AverageCostCriterion>(p.criterion).initial)
            frontier.push_back(g.to_values(assign));
    }
    std::deque<std::vector<int>> queue;
    for (auto& s : frontier)
        if (g.discovered.emplace(g.rank_of(s), s).second) queue.push_back(s);
    while (!queue.empty()) {
        std::vector<int> state = std::move(queue.front());
        queue.pop_front();
        require(static_cast<long>(g.discovered.size()) <= kMaxReachableStates, Errc::InvalidArgument,
                "reachable state space exceeds " + std::to_string(kMaxReachableStates) + " states");
        for (const auto& a : p.actions) {
            if (!g.applicable(a, state)) continue;
            for (const auto& o : a.outcomes) {
                std::vector<int> next = g.apply_outcome(o, state);
                if (g.discovered.emplace(g.rank_of(next), next).second) queue.push_back(next);
            }
        }
    }

    // assign compact indices in canonical (rank) order
    std::map<long long, int> idOf;
    for (const auto& [rank, values] : g.discovered) {
        idOf[rank] = mdp.state_count();
        mdp.stateValues.push_back(values);
        std::string key;
        for (size_t v = 0; v < p.variables.size(); ++v) {
            if (v) key += ',';
            key += p.variables[v].name + '=' + p.variables[v].values[static_cast<size_t>(values[v])];
        }
        mdp.stateKeys.push_back(std::move(key));
    }

    // flatten events
    for (size_t qi = 0; qi < p.qas.size(); ++qi) {
        const QaSpec& qa = p.qas[qi];
        if (qa.kind == QaKind::EventCount) {
            mdp.events.push_back({static_cast<int>(qi), qa.eventName, qa.eventName, 1.0});
        } else if (qa.kind == QaKind::NonStandard) {
            for (const auto& e : qa.events)
                mdp.events.push_back({static_cast<int>(qi), e.name, e.label, e.penalty});
        }
    }

    // ground actions, transitions and QA values
    mdp.acts.resize(static_cast<size_t>(mdp.state_count()));
    for (int s = 0; s < mdp.state_count(); ++s) {
        const std::vector<int>& state = mdp.stateValues[static_cast<size_t>(s)];
        for (size_t ai = 0; ai < p.actions.size(); ++ai) {
            const GroundAction& a = p.actions[ai];
            if (!g.applicable(a, state)) continue;
            ExplicitAction ea;
            ea.actionId = static_cast<int>(ai);
            std::map<int, double> succ;
            for (const auto& o : a.outcomes)
                succ[idOf.at(g.rank_of(g.apply_outcome(o, state)))] += o.prob;
            double rowSum = 0.0;
            for (const auto& [t, prob] : succ) {
                ea.succ.emplace_back(t, prob);
                rowSum += prob;
            }
            require(std::abs(rowSum - 1.0) <= 1e-9, Errc::InvalidTransition,
                    "transition row for (" + mdp.stateKeys[static_cast<size_t>(s)] + ", " + a.name +
                        ") sums to " + std::to_string(rowSum));

            AttrContext ctx = make_context(p, state, a);
            ea.qa.resize(p.qas.size(), 0.0);
            ea.eventProb.resize(mdp.events.size(), 0.0);
            int eventCursor = 0;
            for (size_t qi = 0; qi < p.qas.size(); ++qi) {
                const QaSpec& qa = p.qas[qi];
                double value = 0.0;
                if (qa.kind == QaKind::NonStandard) {
                    for (const auto& e : qa.events) {
                        double prob = e.prob.eval(ctx);
                        require(prob >= -1e-12 && prob <= 1.0 + 1e-12, Errc::InvalidArgument,
                                "event '" + e.name + "' probability " + std::to_string(prob) +
                                    " outside [0,1] at (" + mdp.stateKeys[static_cast<size_t>(s)] +
                                    ", " + a.name + ")");
                        prob = std::clamp(prob, 0.0, 1.0);
                        mdp.events[static_cast<size_t>(eventCursor)].qa = static_cast<int>(qi);
                        ea.eventProb[static_cast<size_t>(eventCursor)] = prob;
                        value += e.penalty * prob;
                        ++eventCursor;
                    }
                } else {
                    value = qa.value.eval(ctx);
                    require(std::isfinite(value) && value >= 0.0, Errc::InvalidArgument,
                            "QA '" + qa.name + "' value " + std::to_string(value) +
                                " must be finite and nonnegative at (" +
                                mdp.stateKeys[static_cast<size_t>(s)] + ", " + a.name + ")");
                    if (qa.kind == QaKind::EventCount) {
                        require(value <= 1.0 + 1e-12, Errc::InvalidArgument,
                                "event-count QA '" + qa.name + "' probability " +
                                    std::to_string(value) + " exceeds 1");
                        value = std::min(value, 1.0);
                        ea.eventProb[static_cast<size_t>(eventCursor)] = value;
                        ++eventCursor;
                    }
                }
                ea.qa[qi] = value;
            }
            mdp.acts[static_cast<size_t>(s)].push_back(std::move(ea));
        }
    }

    // criterion-specific wiring
    if (mdp.totalCost) {
        const auto& tc = std::get<TotalCostCriterion>(p.criterion);
        mdp.s0 = idOf.at(g.rank_of(g.to_values(tc.initial)));
        mdp.goal.assign(static_cast<size_t>(mdp.state_count()), 0);
        bool anyGoal = false;
        for (int s = 0; s < mdp.state_count(); ++s) {
            for (const auto& cond : tc.goals)
                if (g.matches(cond, mdp.stateValues[static_cast<size_t>(s)])) {
                    mdp.goal[static_cast<size_t>(s)] = 1;
                    anyGoal = true;
                    break;
                }
        }
        require(anyGoal, Errc::UnreachableGoal, "no goal state is reachable from the initial state");
        for (int s = 0; s < mdp.state_count(); ++s) {
            if (!mdp.goal[static_cast<size_t>(s)]) continue;
            for (const auto& ea : mdp.acts[static_cast<size_t>(s)])
                for (const auto& [t, prob] : ea.succ)
                    require(t == s, Errc::GoalNotAbsorbing,
                            "goal state " + mdp.stateKeys[static_cast<size_t>(s)] +
                                " can be left via action " +
                                p.actions[static_cast<size_t>(ea.actionId)].name);
        }
    } else {
        mdp.alpha.assign(static_cast<size_t>(mdp.state_count()), 0.0);
        for (const auto& [assign, prob] : std::get<AverageCostCriterion>(p.criterion).initial)
            mdp.alpha[static_cast<size_t>(idOf.at(g.rank_of(g.to_values(assign))))] += prob;
        for (int s = 0; s < mdp.state_count(); ++s)
            require(!mdp.acts[static_cast<size_t>(s)].empty(), Errc::InvalidArgument,
                    "state " + mdp.stateKeys[static_cast<size_t>(s)] +
                        " has no applicable action under the average-cost criterion");
    }

    // resolve normalizers
    int nq = mdp.qa_count();
    mdp.scal.weight.resize(static_cast<size_t>(nq));
    mdp.scal.scale.assign(static_cast<size_t>(nq), 1.0);
    mdp.scal.offset.assign(static_cast<size_t>(nq), 0.0);
    for (int qi = 0; qi < nq; ++qi)
        mdp.scal.weight[static_cast<size_t>(qi)] = p.scalarization.weights.at(p.qas[static_cast<size_t>(qi)].name);
    if (p.scalarization.mode == ScalarizationProfile::Mode::Explicit) {
        for (int qi = 0; qi < nq; ++qi) {
            const Normalizer& n = p.scalarization.normalizers.at(p.qas[static_cast<size_t>(qi)].name);
            mdp.scal.scale[static_cast<size_t>(qi)] = n.scale;
            mdp.scal.offset[static_cast<size_t>(qi)] = n.offset;
        }
    } else if (p.scalarization.mode == ScalarizationProfile::Mode::MinMax) {
        for (int qi = 0; qi < nq; ++qi) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -std::numeric_limits<double>::infinity();
            for (const auto& as : mdp.acts)
                for (const auto& ea : as) {
                    lo = std::min(lo, ea.qa[static_cast<size_t>(qi)]);
                    hi = std::max(hi, ea.qa[static_cast<size_t>(qi)]);
                }
            if (std::isfinite(lo) && hi - lo > 1e-12) {
                mdp.scal.scale[static_cast<size_t>(qi)] = 1.0 / (hi - lo);
                mdp.scal.offset[static_cast<size_t>(qi)] = -lo / (hi - lo);
            }
            // max == min: identity fallback
        }
    }

    // cache scalarized costs
    for (auto& as : mdp.acts)
        for (auto& ea : as) ea.cost = scalarized_cost(mdp.scal, ea.qa);

    return mdp;
}

} // namespace xmdp
