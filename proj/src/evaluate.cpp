#include "xmdp/evaluate.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace xmdp {

namespace {

constexpr double kResidualTol = 1e-9;
constexpr int kDirectSolveLimit = 50000; // above this, iterate instead of factorizing

int require_choice(const ExplicitMdp& mdp, const Policy& policy, int s) {
    int slot = policy.choice[static_cast<size_t>(s)];
    require(slot >= 0, Errc::ImproperPolicy,
            "policy has no action at reachable state " + mdp.stateKeys[static_cast<size_t>(s)]);
    return slot;
}

/// States with a defined choice from which the goal set is reached almost
/// surely along the policy (for a finite chain: every state on the walk has a
/// positive-probability path into the absorbing goal set).
std::vector<char> goal_certain_states(const ExplicitMdp& mdp, const Policy& policy) {
    int n = mdp.state_count();
    // backward reachability of G along policy edges
    std::vector<std::vector<int>> preds(static_cast<size_t>(n));
    for (int s = 0; s < n; ++s) {
        if (mdp.goal[static_cast<size_t>(s)]) continue;
        int slot = policy.choice[static_cast<size_t>(s)];
        if (slot < 0) continue;
        for (const auto& [t, prob] : mdp.acts[static_cast<size_t>(s)][static_cast<size_t>(slot)].succ)
            if (prob > 0.0) preds[static_cast<size_t>(t)].push_back(s);
    }
    std::vector<char> canReach(static_cast<size_t>(n), 0);
    std::deque<int> queue;
    for (int s = 0; s < n; ++s)
        if (mdp.goal[static_cast<size_t>(s)]) {
            canReach[static_cast<size_t>(s)] = 1;
            queue.push_back(s);
        }
    while (!queue.empty()) {
        int t = queue.front();
        queue.pop_front();
        for (int s : preds[static_cast<size_t>(t)])
            if (!canReach[static_cast<size_t>(s)]) {
                canReach[static_cast<size_t>(s)] = 1;
                queue.push_back(s);
            }
    }
    // a state is goal-certain iff every state reachable from it (under the
    // policy) can still reach the goal; prune states that can wander into a
    // region with no path back to G
    std::vector<char> certain(static_cast<size_t>(n), 0);
    for (int s = 0; s < n; ++s) {
        if (mdp.goal[static_cast<size_t>(s)] || !canReach[static_cast<size_t>(s)]) continue;
        if (policy.choice[static_cast<size_t>(s)] < 0) continue;
        certain[static_cast<size_t>(s)] = 1;
    }
    // iterate removal: a certain state must only lead to certain-or-goal states
    bool changed = true;
    while (changed) {
        changed = false;
        for (int s = 0; s < n; ++s) {
            if (!certain[static_cast<size_t>(s)]) continue;
            int slot = policy.choice[static_cast<size_t>(s)];
            for (const auto& [t, prob] : mdp.acts[static_cast<size_t>(s)][static_cast<size_t>(slot)].succ) {
                if (prob <= 0.0) continue;
                if (!mdp.goal[static_cast<size_t>(t)] && !certain[static_cast<size_t>(t)]) {
                    certain[static_cast<size_t>(s)] = 0;
                    changed = true;
                    break;
                }
            }
        }
    }
    return certain;
}

/// Solves (I - P) x = rhs over the index set `sub` (policy-restricted chain),
/// where transitions leaving `sub` are dropped. Returns values per sub index.
std::vector<double> solve_policy_system(const ExplicitMdp& mdp, const Policy& policy,
                                        const std::vector<int>& sub, const std::vector<double>& rhs,
                                        bool transpose) {
    int m = static_cast<int>(sub.size());
    std::vector<int> local(static_cast<size_t>(mdp.state_count()), -1);
    for (int i = 0; i < m; ++i) local[static_cast<size_t>(sub[static_cast<size_t>(i)])] = i;

    std::vector<Eigen::Triplet<double>> trips;
    for (int i = 0; i < m; ++i) {
        int s = sub[static_cast<size_t>(i)];
        int slot = policy.choice[static_cast<size_t>(s)];
        trips.emplace_back(i, i, 1.0);
        for (const auto& [t, prob] : mdp.acts[static_cast<size_t>(s)][static_cast<size_t>(slot)].succ) {
            int j = local[static_cast<size_t>(t)];
            if (j < 0 || prob <= 0.0) continue;
            if (transpose)
                trips.emplace_back(j, i, -prob);
            else
                trips.emplace_back(i, j, -prob);
        }
    }
    Eigen::SparseMatrix<double> A(m, m);
    A.setFromTriplets(trips.begin(), trips.end());
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) b(i) = rhs[static_cast<size_t>(i)];

    Eigen::VectorXd x;
    if (m <= kDirectSolveLimit) {
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(A);
        require(lu.info() == Eigen::Success, Errc::SolverFailure,
                "policy linear system is singular");
        x = lu.solve(b);
    } else {
        // Gauss-Seidel sweeps; the policy chain is substochastic on `sub`
        x = Eigen::VectorXd::Zero(m);
        Eigen::SparseMatrix<double, Eigen::RowMajor> Ar(A);
        for (int sweep = 0; sweep < 100000; ++sweep) {
            double delta = 0.0;
            for (int i = 0; i < m; ++i) {
                double sum = b(i);
                double diag = 1.0;
                for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Ar, i); it; ++it) {
                    if (it.col() == i)
                        diag = it.value();
                    else
                        sum -= it.value() * x(it.col());
                }
                double next = sum / diag;
                delta = std::max(delta, std::abs(next - x(i)));
                x(i) = next;
            }
            if (delta <= kResidualTol * 0.01) break;
        }
    }
    double residual = (A * x - b).cwiseAbs().maxCoeff();
    require(residual <= kResidualTol, Errc::SolverFailure,
            "policy linear system residual " + std::to_string(residual));
    return std::vector<double>(x.data(), x.data() + m);
}

} // namespace

void check_proper(const ExplicitMdp& mdp, const Policy& policy) {
    require(mdp.totalCost, Errc::InvalidArgument, "properness applies to total-cost models only");
    std::vector<char> reach = reachable_under(mdp, policy);
    std::vector<char> certain = goal_certain_states(mdp, policy);
    for (int s = 0; s < mdp.state_count(); ++s) {
        if (!reach[static_cast<size_t>(s)] || mdp.goal[static_cast<size_t>(s)]) continue;
        (void)require_choice(mdp, policy, s);
        require(certain[static_cast<size_t>(s)], Errc::ImproperPolicy,
                "policy does not reach the goal set almost surely from state " +
                    mdp.stateKeys[static_cast<size_t>(s)]);
    }
}

std::vector<double> evaluate_total_cost(const ExplicitMdp& mdp, const Policy& policy, int qaIndex) {
    require(mdp.totalCost, Errc::InvalidArgument, "evaluate_total_cost needs a total-cost model");
    require(qaIndex >= 0 && qaIndex < mdp.qa_count(), Errc::InvalidArgument, "QA index out of range");
    check_proper(mdp, policy);

    std::vector<char> certain = goal_certain_states(mdp, policy);
    std::vector<int> sub;
    for (int s = 0; s < mdp.state_count(); ++s)
        if (certain[static_cast<size_t>(s)]) sub.push_back(s);

    std::vector<double> rhs(sub.size());
    for (size_t i = 0; i < sub.size(); ++i) {
        int s = sub[i];
        int slot = policy.choice[static_cast<size_t>(s)];
        rhs[i] = mdp.acts[static_cast<size_t>(s)][static_cast<size_t>(slot)].qa[static_cast<size_t>(qaIndex)];
    }
    std::vector<double> sol = solve_policy_system(mdp, policy, sub, rhs, /*transpose=*/false);

    std::vector<double> J(static_cast<size_t>(mdp.state_count()),
                          std::numeric_limits<double>::quiet_NaN());
    for (int s = 0; s < mdp.state_count(); ++s)
        if (mdp.goal[static_cast<size_t>(s)]) J[static_cast<size_t>(s)] = 0.0;
    for (size_t i = 0; i < sub.size(); ++i) J[static_cast<size_t>(sub[i])] = sol[i];
    return J;
}

std::vector<double> visit_counts(const ExplicitMdp& mdp, const Policy& policy) {
    require(mdp.totalCost, Errc::InvalidArgument, "visit_counts needs a total-cost model");
    check_proper(mdp, policy);
    std::vector<double> nu(static_cast<size_t>(mdp.state_count()), 0.0);
    if (mdp.goal[static_cast<size_t>(mdp.s0)]) return nu;

    std::vector<char> certain = goal_certain_states(mdp, policy);
    std::vector<int> sub;
    for (int s = 0; s < mdp.state_count(); ++s)
        if (certain[static_cast<size_t>(s)]) sub.push_back(s);
    std::vector<double> rhs(sub.size(), 0.0);
    for (size_t i = 0; i < sub.size(); ++i)
        if (sub[i] == mdp.s0) rhs[i] = 1.0;
    std::vector<double> sol = solve_policy_system(mdp, policy, sub, rhs, /*transpose=*/true);
    for (size_t i = 0; i < sub.size(); ++i) nu[static_cast<size_t>(sub[i])] = sol[i];
    return nu;
}

std::vector<std::vector<int>> recurrent_classes(const ExplicitMdp& mdp, const Policy& policy,
                                                bool fromAllStates) {
    int n = mdp.state_count();
    std::vector<char> reach = fromAllStates ? std::vector<char>(static_cast<size_t>(n), 1)
                                            : reachable_under(mdp, policy);
    for (int s = 0; s < n; ++s)
        if (reach[static_cast<size_t>(s)] && !(mdp.totalCost && mdp.goal[static_cast<size_t>(s)]))
            (void)require_choice(mdp, policy, s);

    // iterative Tarjan over the policy chain restricted to reachable states
    std::vector<int> index(static_cast<size_t>(n), -1), low(static_cast<size_t>(n), 0),
        comp(static_cast<size_t>(n), -1);
    std::vector<char> onStack(static_cast<size_t>(n), 0);
    std::vector<int> stack;
    int nextIndex = 0, nextComp = 0;

    auto edges_of = [&](int s) -> const std::vector<std::pair<int, double>>& {
        static const std::vector<std::pair<int, double>> none;
        int slot = policy.choice[static_cast<size_t>(s)];
        if (slot < 0) return none;
        return mdp.acts[static_cast<size_t>(s)][static_cast<size_t>(slot)].succ;
    };

    struct Frame {
        int s;
        size_t edge;
    };
    for (int root = 0; root < n; ++root) {
        if (!reach[static_cast<size_t>(root)] || index[static_cast<size_t>(root)] >= 0) continue;
        std::vector<Frame> frames{{root, 0}};
        index[static_cast<size_t>(root)] = low[static_cast<size_t>(root)] = nextIndex++;
        stack.push_back(root);
        onStack[static_cast<size_t>(root)] = 1;
        while (!frames.empty()) {
            Frame& f = frames.back();
            const auto& edges = edges_of(f.s);
            bool descended = false;
            while (f.edge < edges.size()) {
                auto [t, prob] = edges[f.edge++];
                if (prob <= 0.0) continue;
                if (index[static_cast<size_t>(t)] < 0) {
                    index[static_cast<size_t>(t)] = low[static_cast<size_t>(t)] = nextIndex++;
                    stack.push_back(t);
                    onStack[static_cast<size_t>(t)] = 1;
                    frames.push_back({t, 0});
                    descended = true;
                    break;
                }
                if (onStack[static_cast<size_t>(t)])
                    low[static_cast<size_t>(f.s)] =
                        std::min(low[static_cast<size_t>(f.s)], index[static_cast<size_t>(t)]);
            }
            if (descended) continue;
            if (low[static_cast<size_t>(f.s)] == index[static_cast<size_t>(f.s)]) {
                while (true) {
                    int v = stack.back();
                    stack.pop_back();
                    onStack[static_cast<size_t>(v)] = 0;
                    comp[static_cast<size_t>(v)] = nextComp;
                    if (v == f.s) break;
                }
                ++nextComp;
            }
            int finished = f.s;
            frames.pop_back();
            if (!frames.empty())
                low[static_cast<size_t>(frames.back().s)] = std::min(
                    low[static_cast<size_t>(frames.back().s)], low[static_cast<size_t>(finished)]);
        }
    }

    // a component is recurrent iff no positive-probability edge leaves it
    std::vector<char> leaves(static_cast<size_t>(nextComp), 0);
    for (int s = 0; s < n; ++s) {
        if (comp[static_cast<size_t>(s)] < 0) continue;
        for (const auto& [t, prob] : edges_of(s))
            if (prob > 0.0 && comp[static_cast<size_t>(t)] != comp[static_cast<size_t>(s)])
                leaves[static_cast<size_t>(comp[static_cast<size_t>(s)])] = 1;
    }
    std::vector<std::vector<int>> classes(static_cast<size_t>(nextComp));
    for (int s = 0; s < n; ++s)
        if (comp[static_cast<size_t>(s)] >= 0 && !leaves[static_cast<size_t>(comp[static_cast<size_t>(s)])])
            classes[static_cast<size_t>(comp[static_cast<size_t>(s)])].push_back(s);
    std::vector<std::vector<int>> out;
    for (auto& c : classes)
        if (!c.empty()) {
            std::sort(c.begin(), c.end());
            out.push_back(std::move(c));
        }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> stationary_distribution(const ExplicitMdp& mdp, const Policy& policy) {
    require(!mdp.totalCost, Errc::InvalidArgument,
            "stationary_distribution needs an average-cost model");
    auto classes = recurrent_classes(mdp, policy);
    require(classes.size() == 1, Errc::Multichain,
            "policy chain has " + std::to_string(classes.size()) +
                " recurrent classes reachable from alpha");
    const std::vector<int>& rec = classes.front();
    int m = static_cast<int>(rec.size());
    std::vector<int> local(static_cast<size_t>(mdp.state_count()), -1);
    for (int i = 0; i < m; ++i) local[static_cast<size_t>(rec[static_cast<size_t>(i)])] = i;

    // (P^T - I) mu = 0 with the last equation replaced by sum(mu) = 1
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        int s = rec[static_cast<size_t>(i)];
        int slot = policy.choice[static_cast<size_t>(s)];
        A(i, i) -= 1.0;
        for (const auto& [t, prob] : mdp.acts[static_cast<size_t>(s)][static_cast<size_t>(slot)].succ) {
            int j = local[static_cast<size_t>(t)];
            require(j >= 0, Errc::SolverFailure, "recurrent class is not closed");
            A(j, i) += prob;
        }
    }
    for (int i = 0; i < m; ++i) A(m - 1, i) = 1.0;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    b(m - 1) = 1.0;
    Eigen::VectorXd mu = A.partialPivLu().solve(b);

    // residual check against the stationarity equations
    double residual = std::abs(mu.sum() - 1.0);
    for (int j = 0; j < m; ++j) {
        double inflow = 0.0;
        for (int i = 0; i < m; ++i) {
            int s = rec[static_cast<size_t>(i)];
            int slot = policy.choice[static_cast<size_t>(s)];
            for (const auto& [t, prob] : mdp.acts[static_cast<size_t>(s)][static_cast<size_t>(slot)].succ)
                if (local[static_cast<size_t>(t)] == j) inflow += prob * mu(i);
        }
        residual = std::max(residual, std::abs(inflow - mu(j)));
    }
    require(residual <= kResidualTol, Errc::SolverFailure,
            "stationary distribution residual " + std::to_string(residual));

    std::vector<double> out(static_cast<size_t>(mdp.state_count()), 0.0);
    for (int i = 0; i < m; ++i)
        out[static_cast<size_t>(rec[static_cast<size_t>(i)])] = std::max(0.0, mu(i));
    return out;
}

double evaluate_average_cost(const ExplicitMdp& mdp, const Policy& policy, int qaIndex) {
    require(!mdp.totalCost, Errc::InvalidArgument,
            "evaluate_average_cost needs an average-cost model");
    require(qaIndex >= 0 && qaIndex < mdp.qa_count(), Errc::InvalidArgument, "QA index out of range");
    std::vector<double> mu = stationary_distribution(mdp, policy);
    double gain = 0.0;
    for (int s = 0; s < mdp.state_count(); ++s) {
        if (mu[static_cast<size_t>(s)] <= 0.0) continue;
        int slot = policy.choice[static_cast<size_t>(s)];
        gain += mu[static_cast<size_t>(s)] *
                mdp.acts[static_cast<size_t>(s)][static_cast<size_t>(slot)].qa[static_cast<size_t>(qaIndex)];
    }
    return gain;
}

std::map<std::string, double> event_counts(const ExplicitMdp& mdp, const Policy& policy) {
    std::vector<double> measure = mdp.totalCost ? visit_counts(mdp, policy)
                                                : stationary_distribution(mdp, policy);
    std::map<std::string, double> counts;
    for (const auto& e : mdp.events) counts[e.name] = 0.0;
    for (int s = 0; s < mdp.state_count(); ++s) {
        if (measure[static_cast<size_t>(s)] <= 0.0) continue;
        int slot = policy.choice[static_cast<size_t>(s)];
        if (slot < 0) continue;
        const ExplicitAction& ea = mdp.acts[static_cast<size_t>(s)][static_cast<size_t>(slot)];
        for (size_t ei = 0; ei < mdp.events.size(); ++ei)
            counts[mdp.events[ei].name] += measure[static_cast<size_t>(s)] * ea.eventProb[ei];
    }
    return counts;
}

PolicyValuation evaluate_policy(const ExplicitMdp& mdp, const Policy& policy) {
    PolicyValuation val;
    val.qaValue.resize(static_cast<size_t>(mdp.qa_count()));
    if (mdp.totalCost) {
        for (int qi = 0; qi < mdp.qa_count(); ++qi)
            val.qaValue[static_cast<size_t>(qi)] =
                evaluate_total_cost(mdp, policy, qi)[static_cast<size_t>(mdp.s0)];
    } else {
        std::vector<double> mu = stationary_distribution(mdp, policy);
        for (int qi = 0; qi < mdp.qa_count(); ++qi) {
            double gain = 0.0;
            for (int s = 0; s < mdp.state_count(); ++s) {
                if (mu[static_cast<size_t>(s)] <= 0.0) continue;
                int slot = policy.choice[static_cast<size_t>(s)];
                gain += mu[static_cast<size_t>(s)] * mdp.acts[static_cast<size_t>(s)][static_cast<size_t>(slot)]
                                                         .qa[static_cast<size_t>(qi)];
            }
            val.qaValue[static_cast<size_t>(qi)] = gain;
        }
    }
    val.eventCounts = event_counts(mdp, policy);
    val.scalarizedCost = scalarized_cost(mdp.scal, val.qaValue);
    return val;
}

} // namespace xmdp
