#include "xmdp/evaluate.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <queue>

namespace xmdp {

namespace {

constexpr double kBellmanTol = 1e-9;
constexpr double kBig = 1e18; // stands in for +infinity during value iteration

using CostFn = std::function<double(int state, int slot)>;

double qa_cost(const ExplicitMdp& mdp, int qaIndex, int s, int slot) {
    return mdp.acts[static_cast<size_t>(s)][static_cast<size_t>(slot)].qa[static_cast<size_t>(qaIndex)];
}

} // namespace

ProperRegion proper_region(const ExplicitMdp& mdp) {
    require(mdp.totalCost, Errc::InvalidArgument, "proper_region needs a total-cost model");
    int n = mdp.state_count();
    std::vector<char> in(static_cast<size_t>(n), 1);

    // Largest set X such that from every state of X the goal is reachable via
    // actions whose successors all stay inside X. Iterates shrink-and-reach
    // until stable.
    while (true) {
        // safe actions under the current X
        std::vector<std::vector<int>> safe(static_cast<size_t>(n));
        for (int s = 0; s < n; ++s) {
            if (!in[static_cast<size_t>(s)] || mdp.goal[static_cast<size_t>(s)]) continue;
            const auto& as = mdp.acts[static_cast<size_t>(s)];
            for (size_t slot = 0; slot < as.size(); ++slot) {
                bool ok = true;
                for (const auto& [t, prob] : as[slot].succ)
                    if (prob > 0.0 && !in[static_cast<size_t>(t)]) {
                        ok = false;
                        break;
                    }
                if (ok) safe[static_cast<size_t>(s)].push_back(static_cast<int>(slot));
            }
        }
        // backward reachability of goals via safe actions
        std::vector<std::vector<int>> preds(static_cast<size_t>(n));
        for (int s = 0; s < n; ++s)
            for (int slot : safe[static_cast<size_t>(s)])
                for (const auto& [t, prob] :
                     mdp.acts[static_cast<size_t>(s)][static_cast<size_t>(slot)].succ)
                    if (prob > 0.0) preds[static_cast<size_t>(t)].push_back(s);
        std::vector<char> next(static_cast<size_t>(n), 0);
        std::deque<int> queue;
        for (int s = 0; s < n; ++s)
            if (in[static_cast<size_t>(s)] && mdp.goal[static_cast<size_t>(s)]) {
                next[static_cast<size_t>(s)] = 1;
                queue.push_back(s);
            }
        while (!queue.empty()) {
            int t = queue.front();
            queue.pop_front();
            for (int s : preds[static_cast<size_t>(t)])
                if (!next[static_cast<size_t>(s)]) {
                    next[static_cast<size_t>(s)] = 1;
                    queue.push_back(s);
                }
        }
        if (next == in) {
            ProperRegion region;
            region.inRegion = std::move(next);
            region.safeActions = std::move(safe);
            return region;
        }
        in = std::move(next);
    }
}

namespace {

/// Value iteration from above over the proper region, then a greedy
/// extraction restricted to optimal actions, tie-broken toward the action
/// with the shortest positive-probability distance to the goal so that
/// zero-cost ties can never produce an improper policy.
Policy solve_total_cost(const ExplicitMdp& mdp, const CostFn& cost) {
    int n = mdp.state_count();
    ProperRegion region = proper_region(mdp);
    require(region.inRegion[static_cast<size_t>(mdp.s0)], Errc::NoProperPolicy,
            "no policy reaches the goal set almost surely from the initial state");

    std::vector<double> V(static_cast<size_t>(n), kBig);
    for (int s = 0; s < n; ++s)
        if (mdp.goal[static_cast<size_t>(s)]) V[static_cast<size_t>(s)] = 0.0;

    std::vector<double> next(static_cast<size_t>(n));
    const long maxIter = 2000000;
    long iter = 0;
    for (; iter < maxIter; ++iter) {
        double residual = 0.0;
        for (int s = 0; s < n; ++s) {
            if (!region.inRegion[static_cast<size_t>(s)] || mdp.goal[static_cast<size_t>(s)]) {
                next[static_cast<size_t>(s)] = V[static_cast<size_t>(s)];
                continue;
            }
            double best = kBig;
            for (int slot : region.safeActions[static_cast<size_t>(s)]) {
                double q = cost(s, slot);
                for (const auto& [t, prob] :
                     mdp.acts[static_cast<size_t>(s)][static_cast<size_t>(slot)].succ)
                    q += prob * V[static_cast<size_t>(t)];
                best = std::min(best, q);
            }
            next[static_cast<size_t>(s)] = best;
            residual = std::max(residual, std::abs(best - V[static_cast<size_t>(s)]));
        }
        V.swap(next);
        if (residual <= kBellmanTol) break;
    }
    require(iter < maxIter, Errc::SolverFailure, "value iteration did not converge");

    // optimal action sets
    std::vector<std::vector<int>> optimal(static_cast<size_t>(n));
    for (int s = 0; s < n; ++s) {
        if (!region.inRegion[static_cast<size_t>(s)] || mdp.goal[static_cast<size_t>(s)]) continue;
        double tol = 1e-9 * std::max(1.0, std::abs(V[static_cast<size_t>(s)])) + 1e-12;
        for (int slot : region.safeActions[static_cast<size_t>(s)]) {
            double q = cost(s, slot);
            for (const auto& [t, prob] : mdp.acts[static_cast<size_t>(s)][static_cast<size_t>(slot)].succ)
                q += prob * V[static_cast<size_t>(t)];
            if (q <= V[static_cast<size_t>(s)] + tol) optimal[static_cast<size_t>(s)].push_back(slot);
        }
    }

    // rank(s): length of the shortest positive-probability path to the goal
    // using only optimal actions; Dijkstra-like, relaxing a pair (s, a) the
    // first time any successor of a is finalized.
    constexpr int kInf = std::numeric_limits<int>::max();
    std::vector<int> rank(static_cast<size_t>(n), kInf);
    std::vector<int> chosen(static_cast<size_t>(n), -1);
    std::vector<std::vector<std::pair<int, int>>> watchers(static_cast<size_t>(n)); // t -> (s, slot)
    for (int s = 0; s < n; ++s)
        for (int slot : optimal[static_cast<size_t>(s)])
            for (const auto& [t, prob] : mdp.acts[static_cast<size_t>(s)][static_cast<size_t>(slot)].succ)
                if (prob > 0.0) watchers[static_cast<size_t>(t)].emplace_back(s, slot);

    using Entry = std::pair<int, int>; // (rank, state)
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    for (int s = 0; s < n; ++s)
        if (mdp.goal[static_cast<size_t>(s)]) {
            rank[static_cast<size_t>(s)] = 0;
            heap.push({0, s});
        }
    while (!heap.empty()) {
        auto [r, t] = heap.top();
        heap.pop();
        if (r > rank[static_cast<size_t>(t)]) continue;
        for (const auto& [s, slot] : watchers[static_cast<size_t>(t)]) {
            int candidate = r + 1;
            if (candidate < rank[static_cast<size_t>(s)] ||
                (candidate == rank[static_cast<size_t>(s)] && slot < chosen[static_cast<size_t>(s)])) {
                rank[static_cast<size_t>(s)] = candidate;
                chosen[static_cast<size_t>(s)] = slot;
                heap.push({candidate, s});
            }
        }
    }

    std::vector<int> choice(static_cast<size_t>(n), -1);
    for (int s = 0; s < n; ++s) {
        if (!region.inRegion[static_cast<size_t>(s)] || mdp.goal[static_cast<size_t>(s)]) continue;
        require(chosen[static_cast<size_t>(s)] >= 0, Errc::SolverFailure,
                "no proper optimal action at state " + mdp.stateKeys[static_cast<size_t>(s)]);
        choice[static_cast<size_t>(s)] = chosen[static_cast<size_t>(s)];
    }
    return make_policy(mdp, std::move(choice), Policy::Provenance::Planner);
}

/// Howard policy iteration for the unichain average-cost criterion.
Policy solve_average_cost(const ExplicitMdp& mdp, const CostFn& cost) {
    int n = mdp.state_count();
    std::vector<int> choice(static_cast<size_t>(n), 0);

    auto gain_bias = [&](const std::vector<int>& pi) {
        Policy p;
        p.choice = pi;
        p.reachable.assign(static_cast<size_t>(n), 1);
        auto classes = recurrent_classes(mdp, p, /*fromAllStates=*/true);
        require(classes.size() == 1, Errc::Multichain,
                "policy iteration encountered a multichain policy (" +
                    std::to_string(classes.size()) + " recurrent classes)");
        int ref = classes.front().front();

        // unknowns: h(0..n-1), g ; equations: h(s) + g - sum P h = c, h(ref) = 0
        std::vector<Eigen::Triplet<double>> trips;
        Eigen::VectorXd b(n + 1);
        for (int s = 0; s < n; ++s) {
            int slot = pi[static_cast<size_t>(s)];
            trips.emplace_back(s, s, 1.0);
            trips.emplace_back(s, n, 1.0);
            for (const auto& [t, prob] : mdp.acts[static_cast<size_t>(s)][static_cast<size_t>(slot)].succ)
                trips.emplace_back(s, t, -prob);
            b(s) = cost(s, slot);
        }
        trips.emplace_back(n, ref, 1.0);
        b(n) = 0.0;
        Eigen::SparseMatrix<double> A(n + 1, n + 1);
        A.setFromTriplets(trips.begin(), trips.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(A);
        require(lu.info() == Eigen::Success, Errc::SolverFailure,
                "gain/bias system is singular (is the chain unichain?)");
        Eigen::VectorXd x = lu.solve(b);
        return std::make_pair(x(n), std::vector<double>(x.data(), x.data() + n));
    };

    const int maxRounds = 1000;
    for (int round = 0; round < maxRounds; ++round) {
        auto [g, h] = gain_bias(choice);
        std::vector<int> next = choice;
        for (int s = 0; s < n; ++s) {
            const auto& as = mdp.acts[static_cast<size_t>(s)];
            double bestQ = std::numeric_limits<double>::infinity();
            int bestSlot = -1;
            for (size_t slot = 0; slot < as.size(); ++slot) {
                double q = cost(s, static_cast<int>(slot));
                for (const auto& [t, prob] : as[slot].succ) q += prob * h[static_cast<size_t>(t)];
                if (q < bestQ - 1e-12) {
                    bestQ = q;
                    bestSlot = static_cast<int>(slot);
                }
            }
            // keep the incumbent on ties; switching on exact ties can cycle
            double qCurrent = cost(s, choice[static_cast<size_t>(s)]);
            for (const auto& [t, prob] : as[static_cast<size_t>(choice[static_cast<size_t>(s)])].succ)
                qCurrent += prob * h[static_cast<size_t>(t)];
            if (qCurrent > bestQ + 1e-10) next[static_cast<size_t>(s)] = bestSlot;
        }
        if (next == choice) break;
        choice = std::move(next);
        require(round + 1 < maxRounds, Errc::SolverFailure, "policy iteration did not converge");
    }
    return make_policy(mdp, std::move(choice), Policy::Provenance::Planner);
}

Policy solve_with_cost(const ExplicitMdp& mdp, const CostFn& cost) {
    return mdp.totalCost ? solve_total_cost(mdp, cost) : solve_average_cost(mdp, cost);
}

} // namespace

Policy solve_optimal(const ExplicitMdp& mdp) {
    return solve_with_cost(mdp, [&](int s, int slot) {
        return mdp.acts[static_cast<size_t>(s)][static_cast<size_t>(slot)].cost;
    });
}

Policy solve_single_qa(const ExplicitMdp& mdp, int qaIndex) {
    require(qaIndex >= 0 && qaIndex < mdp.qa_count(), Errc::InvalidArgument, "QA index out of range");
    return solve_with_cost(mdp, [&](int s, int slot) { return qa_cost(mdp, qaIndex, s, slot); });
}

double per_qa_lower_bound(const ExplicitMdp& mdp, int qaIndex) {
    Policy best = solve_single_qa(mdp, qaIndex);
    if (mdp.totalCost)
        return evaluate_total_cost(mdp, best, qaIndex)[static_cast<size_t>(mdp.s0)];
    return evaluate_average_cost(mdp, best, qaIndex);
}

} // namespace xmdp
