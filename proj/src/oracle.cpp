#include "xmdp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>

namespace xmdp::oracle {

namespace {

/// Gaussian elimination with partial pivoting; A row-major n x n. Returns
/// false on (near-)singularity.
bool gauss_solve(std::vector<double>& A, std::vector<double>& b, int n) {
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        double best = std::abs(A[static_cast<size_t>(col) * n + col]);
        for (int r = col + 1; r < n; ++r) {
            double v = std::abs(A[static_cast<size_t>(r) * n + col]);
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best < 1e-13) return false;
        if (pivot != col) {
            for (int c = 0; c < n; ++c)
                std::swap(A[static_cast<size_t>(pivot) * n + c], A[static_cast<size_t>(col) * n + c]);
            std::swap(b[static_cast<size_t>(pivot)], b[static_cast<size_t>(col)]);
        }
        double d = A[static_cast<size_t>(col) * n + col];
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = A[static_cast<size_t>(r) * n + col] / d;
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c)
                A[static_cast<size_t>(r) * n + c] -= f * A[static_cast<size_t>(col) * n + c];
            b[static_cast<size_t>(r)] -= f * b[static_cast<size_t>(col)];
        }
    }
    for (int r = 0; r < n; ++r) b[static_cast<size_t>(r)] /= A[static_cast<size_t>(r) * n + r];
    return true;
}

std::vector<int> closure_from(const ExplicitMdp& mdp, const std::vector<int>& choice,
                              const std::vector<int>& starts) {
    std::vector<char> seen(static_cast<size_t>(mdp.state_count()), 0);
    std::deque<int> queue;
    for (int s : starts)
        if (!seen[static_cast<size_t>(s)]) {
            seen[static_cast<size_t>(s)] = 1;
            queue.push_back(s);
        }
    std::vector<int> order;
    while (!queue.empty()) {
        int s = queue.front();
        queue.pop_front();
        order.push_back(s);
        int slot = choice[static_cast<size_t>(s)];
        if (slot < 0) continue;
        for (const auto& [t, p] : mdp.acts[static_cast<size_t>(s)][static_cast<size_t>(slot)].succ)
            if (p > 0.0 && !seen[static_cast<size_t>(t)]) {
                seen[static_cast<size_t>(t)] = 1;
                queue.push_back(t);
            }
    }
    return order;
}

OracleValuation evaluate_total(const ExplicitMdp& mdp, const std::vector<int>& choice) {
    OracleValuation out;
    std::vector<int> closure = closure_from(mdp, choice, mdp.initial_states());

    // properness: every visited state must still be able to reach a goal
    std::vector<char> reachesGoal(static_cast<size_t>(mdp.state_count()), 0);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int s : closure) {
            if (reachesGoal[static_cast<size_t>(s)]) continue;
            if (mdp.goal[static_cast<size_t>(s)]) {
                reachesGoal[static_cast<size_t>(s)] = 1;
                changed = true;
                continue;
            }
            int slot = choice[static_cast<size_t>(s)];
            if (slot < 0) continue;
            for (const auto& [t, p] : mdp.acts[static_cast<size_t>(s)][static_cast<size_t>(slot)].succ)
                if (p > 0.0 && reachesGoal[static_cast<size_t>(t)]) {
                    reachesGoal[static_cast<size_t>(s)] = 1;
                    changed = true;
                    break;
                }
        }
    }
    for (int s : closure) {
        if (mdp.goal[static_cast<size_t>(s)]) continue;
        if (choice[static_cast<size_t>(s)] < 0 || !reachesGoal[static_cast<size_t>(s)]) return out;
    }

    std::vector<int> sub;
    std::vector<int> local(static_cast<size_t>(mdp.state_count()), -1);
    for (int s : closure)
        if (!mdp.goal[static_cast<size_t>(s)]) {
            local[static_cast<size_t>(s)] = static_cast<int>(sub.size());
            sub.push_back(s);
        }
    int n = static_cast<int>(sub.size());

    int nq = mdp.qa_count();
    out.qa.assign(static_cast<size_t>(nq), 0.0);
    for (const auto& e : mdp.events) out.eventCounts[e.name] = 0.0;

    if (n > 0 && !mdp.goal[static_cast<size_t>(mdp.s0)]) {
        // expected visit counts: (I - P^T) nu = e_{s0}
        std::vector<double> A(static_cast<size_t>(n) * n, 0.0);
        std::vector<double> nu(static_cast<size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) {
            int s = sub[static_cast<size_t>(i)];
            int slot = choice[static_cast<size_t>(s)];
            A[static_cast<size_t>(i) * n + i] += 1.0;
            for (const auto& [t, p] : mdp.acts[static_cast<size_t>(s)][static_cast<size_t>(slot)].succ) {
                int j = local[static_cast<size_t>(t)];
                if (j >= 0) A[static_cast<size_t>(j) * n + i] -= p;
            }
        }
        nu[static_cast<size_t>(local[static_cast<size_t>(mdp.s0)])] = 1.0;
        if (!gauss_solve(A, nu, n)) return out;

        for (int i = 0; i < n; ++i) {
            int s = sub[static_cast<size_t>(i)];
            const ExplicitAction& ea =
                mdp.acts[static_cast<size_t>(s)][static_cast<size_t>(choice[static_cast<size_t>(s)])];
            for (int q = 0; q < nq; ++q)
                out.qa[static_cast<size_t>(q)] += nu[static_cast<size_t>(i)] * ea.qa[static_cast<size_t>(q)];
            for (size_t e = 0; e < mdp.events.size(); ++e)
                out.eventCounts[mdp.events[e].name] += nu[static_cast<size_t>(i)] * ea.eventProb[e];
        }
    }
    out.valid = true;
    out.scalarized = scalarized_cost(mdp.scal, out.qa);
    return out;
}

OracleValuation evaluate_average(const ExplicitMdp& mdp, const std::vector<int>& choice) {
    OracleValuation out;
    std::vector<int> closure = closure_from(mdp, choice, mdp.initial_states());
    for (int s : closure)
        if (choice[static_cast<size_t>(s)] < 0) return out;

    auto reaches = [&](int from, int to) {
        std::vector<char> seen(static_cast<size_t>(mdp.state_count()), 0);
        std::deque<int> queue{from};
        seen[static_cast<size_t>(from)] = 1;
        while (!queue.empty()) {
            int s = queue.front();
            queue.pop_front();
            if (s == to) return true;
            int slot = choice[static_cast<size_t>(s)];
            for (const auto& [t, p] : mdp.acts[static_cast<size_t>(s)][static_cast<size_t>(slot)].succ)
                if (p > 0.0 && !seen[static_cast<size_t>(t)]) {
                    seen[static_cast<size_t>(t)] = 1;
                    queue.push_back(t);
                }
        }
        return false;
    };

    // s is recurrent iff everything reachable from s reaches s back
    std::vector<int> recurrent;
    for (int s : closure) {
        bool rec = true;
        for (int t : closure_from(mdp, choice, {s}))
            if (!reaches(t, s)) {
                rec = false;
                break;
            }
        if (rec) recurrent.push_back(s);
    }
    std::vector<std::vector<int>> classes;
    std::vector<char> used(static_cast<size_t>(mdp.state_count()), 0);
    for (int s : recurrent) {
        if (used[static_cast<size_t>(s)]) continue;
        std::vector<int> cls;
        for (int t : recurrent)
            if (!used[static_cast<size_t>(t)] && reaches(s, t) && reaches(t, s)) cls.push_back(t);
        for (int t : cls) used[static_cast<size_t>(t)] = 1;
        classes.push_back(std::move(cls));
    }
    if (classes.size() != 1) return out; // multichain: start-dependent gain

    const std::vector<int>& cls = classes.front();
    int n = static_cast<int>(cls.size());
    std::vector<int> local(static_cast<size_t>(mdp.state_count()), -1);
    for (int i = 0; i < n; ++i) local[static_cast<size_t>(cls[static_cast<size_t>(i)])] = i;

    // stationary distribution: mu^T P = mu^T with sum(mu)=1 in the last row
    std::vector<double> A(static_cast<size_t>(n) * n, 0.0);
    std::vector<double> b(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        int s = cls[static_cast<size_t>(i)];
        int slot = choice[static_cast<size_t>(s)];
        A[static_cast<size_t>(i) * n + i] -= 1.0;
        for (const auto& [t, p] : mdp.acts[static_cast<size_t>(s)][static_cast<size_t>(slot)].succ) {
            int j = local[static_cast<size_t>(t)];
            if (j < 0) return out;
            A[static_cast<size_t>(j) * n + i] += p;
        }
    }
    for (int i = 0; i < n; ++i) A[static_cast<size_t>(n - 1) * n + i] = 1.0;
    b[static_cast<size_t>(n - 1)] = 1.0;
    if (!gauss_solve(A, b, n)) return out;

    int nq = mdp.qa_count();
    out.qa.assign(static_cast<size_t>(nq), 0.0);
    for (const auto& e : mdp.events) out.eventCounts[e.name] = 0.0;
    for (int i = 0; i < n; ++i) {
        int s = cls[static_cast<size_t>(i)];
        const ExplicitAction& ea =
            mdp.acts[static_cast<size_t>(s)][static_cast<size_t>(choice[static_cast<size_t>(s)])];
        for (int q = 0; q < nq; ++q)
            out.qa[static_cast<size_t>(q)] += b[static_cast<size_t>(i)] * ea.qa[static_cast<size_t>(q)];
        for (size_t e = 0; e < mdp.events.size(); ++e)
            out.eventCounts[mdp.events[e].name] += b[static_cast<size_t>(i)] * ea.eventProb[e];
    }
    out.valid = true;
    out.scalarized = scalarized_cost(mdp.scal, out.qa);
    return out;
}

} // namespace

long double policy_space_size(const ExplicitMdp& mdp) {
    long double total = 1.0L;
    for (const auto& as : mdp.acts)
        if (!as.empty()) total *= static_cast<long double>(as.size());
    return total;
}

void for_each_policy(const ExplicitMdp& mdp, long cap,
                     const std::function<void(const std::vector<int>&)>& fn) {
    require(policy_space_size(mdp) <= static_cast<long double>(cap), Errc::CapExceeded,
            "policy space exceeds enumeration cap of " + std::to_string(cap));
    int n = mdp.state_count();
    std::vector<int> choice(static_cast<size_t>(n), -1);
    for (int s = 0; s < n; ++s)
        if (!mdp.acts[static_cast<size_t>(s)].empty()) choice[static_cast<size_t>(s)] = 0;
    while (true) {
        fn(choice);
        int s = 0;
        for (; s < n; ++s) {
            if (choice[static_cast<size_t>(s)] < 0) continue;
            if (choice[static_cast<size_t>(s)] + 1 <
                static_cast<int>(mdp.acts[static_cast<size_t>(s)].size())) {
                ++choice[static_cast<size_t>(s)];
                break;
            }
            choice[static_cast<size_t>(s)] = 0;
        }
        if (s == n) return;
    }
}

OracleValuation evaluate_choice(const ExplicitMdp& mdp, const std::vector<int>& choice) {
    return mdp.totalCost ? evaluate_total(mdp, choice) : evaluate_average(mdp, choice);
}

bool dominates(std::span<const double> a, std::span<const double> b, double tol) {
    bool strict = false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i] + tol) return false;
        if (a[i] < b[i] - tol) strict = true;
    }
    return strict;
}

bool ParetoFront::admits(std::span<const double> qa, double tol) const {
    for (const auto& e : entries)
        if (dominates(e.qa, qa, tol)) return false;
    return true;
}

ParetoFront pareto_front(const ExplicitMdp& mdp, long cap) {
    std::vector<FrontEntry> all;
    for_each_policy(mdp, cap, [&](const std::vector<int>& choice) {
        OracleValuation v = evaluate_choice(mdp, choice);
        if (!v.valid) return;
        for (const auto& e : all) {
            bool same = true;
            for (size_t i = 0; i < v.qa.size(); ++i)
                if (std::abs(e.qa[i] - v.qa[i]) > 1e-12) {
                    same = false;
                    break;
                }
            if (same) return; // keep one representative per distinct vector
        }
        all.push_back({choice, v.qa});
    });
    ParetoFront front;
    for (const auto& candidate : all) {
        bool dominated = false;
        for (const auto& other : all)
            if (dominates(other.qa, candidate.qa, 1e-9)) {
                dominated = true;
                break;
            }
        if (!dominated) front.entries.push_back(candidate);
    }
    return front;
}

PathOptimum shortest_path_optimum(const ExplicitMdp& mdp, std::span<const double> qaWeights) {
    require(mdp.totalCost, Errc::InvalidArgument, "path oracle needs a total-cost model");
    require(mdp.deterministic_transitions(), Errc::InvalidArgument,
            "path oracle needs deterministic transitions");
    require(qaWeights.size() == static_cast<size_t>(mdp.qa_count()), Errc::LengthMismatch,
            "weight vector length mismatch");

    int n = mdp.state_count();
    const double inf = std::numeric_limits<double>::infinity();
    auto edge_cost = [&](const ExplicitAction& ea) {
        double c = 0.0;
        for (size_t q = 0; q < qaWeights.size(); ++q) c += qaWeights[q] * ea.qa[q];
        require(c >= -1e-12, Errc::InvalidArgument, "path oracle needs nonnegative edge costs");
        return std::max(c, 0.0);
    };

    // h(s): cheapest cost-to-goal, multi-goal Dijkstra on the reversed graph
    std::vector<std::vector<std::pair<int, int>>> rev(static_cast<size_t>(n)); // t -> (s, slot)
    for (int s = 0; s < n; ++s) {
        if (mdp.goal[static_cast<size_t>(s)]) continue;
        const auto& as = mdp.acts[static_cast<size_t>(s)];
        for (size_t slot = 0; slot < as.size(); ++slot)
            rev[static_cast<size_t>(as[slot].succ.front().first)].emplace_back(
                s, static_cast<int>(slot));
    }
    std::vector<double> h(static_cast<size_t>(n), inf);
    using Entry = std::pair<double, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    for (int s = 0; s < n; ++s)
        if (mdp.goal[static_cast<size_t>(s)]) {
            h[static_cast<size_t>(s)] = 0.0;
            heap.push({0.0, s});
        }
    while (!heap.empty()) {
        auto [d, t] = heap.top();
        heap.pop();
        if (d > h[static_cast<size_t>(t)]) continue;
        for (const auto& [s, slot] : rev[static_cast<size_t>(t)]) {
            double nd = d + edge_cost(mdp.acts[static_cast<size_t>(s)][static_cast<size_t>(slot)]);
            if (nd < h[static_cast<size_t>(s)] - 1e-15) {
                h[static_cast<size_t>(s)] = nd;
                heap.push({nd, s});
            }
        }
    }
    require(std::isfinite(h[static_cast<size_t>(mdp.s0)]), Errc::UnreachableGoal,
            "no goal reachable in the path oracle");

    // hop rank over shortest-path-consistent edges breaks zero-cost ties so
    // the recovered policy always makes progress
    constexpr int kInfRank = std::numeric_limits<int>::max();
    std::vector<int> rank(static_cast<size_t>(n), kInfRank);
    std::vector<int> pick(static_cast<size_t>(n), -1);
    std::deque<int> bfs;
    for (int s = 0; s < n; ++s)
        if (mdp.goal[static_cast<size_t>(s)]) {
            rank[static_cast<size_t>(s)] = 0;
            bfs.push_back(s);
        }
    while (!bfs.empty()) {
        int t = bfs.front();
        bfs.pop_front();
        for (const auto& [s, slot] : rev[static_cast<size_t>(t)]) {
            if (!std::isfinite(h[static_cast<size_t>(s)])) continue;
            double c = edge_cost(mdp.acts[static_cast<size_t>(s)][static_cast<size_t>(slot)]);
            if (std::abs(h[static_cast<size_t>(s)] - (c + h[static_cast<size_t>(t)])) > 1e-9)
                continue; // not on a shortest path
            int candidate = rank[static_cast<size_t>(t)] + 1;
            if (candidate < rank[static_cast<size_t>(s)] ||
                (candidate == rank[static_cast<size_t>(s)] && slot < pick[static_cast<size_t>(s)])) {
                bool first = rank[static_cast<size_t>(s)] == kInfRank;
                rank[static_cast<size_t>(s)] = candidate;
                pick[static_cast<size_t>(s)] = slot;
                if (first) bfs.push_back(s);
            }
        }
    }

    PathOptimum out;
    out.cost = h[static_cast<size_t>(mdp.s0)];
    out.choice.assign(static_cast<size_t>(n), -1);
    for (int s = 0; s < n; ++s)
        if (!mdp.goal[static_cast<size_t>(s)] && pick[static_cast<size_t>(s)] >= 0)
            out.choice[static_cast<size_t>(s)] = pick[static_cast<size_t>(s)];
    return out;
}

double best_weighted_value(const ExplicitMdp& mdp, std::span<const double> qaWeights, long cap) {
    if (policy_space_size(mdp) <= static_cast<long double>(cap)) {
        double best = std::numeric_limits<double>::infinity();
        for_each_policy(mdp, cap, [&](const std::vector<int>& choice) {
            OracleValuation v = evaluate_choice(mdp, choice);
            if (!v.valid) return;
            double w = 0.0;
            for (size_t q = 0; q < qaWeights.size(); ++q) w += qaWeights[q] * v.qa[q];
            best = std::min(best, w);
        });
        require(std::isfinite(best), Errc::SolverFailure, "no valid policy found by enumeration");
        return best;
    }
    if (mdp.totalCost && mdp.deterministic_transitions())
        return shortest_path_optimum(mdp, qaWeights).cost;
    fail(Errc::CapExceeded, "instance is neither enumerable nor deterministic");
}

} // namespace xmdp::oracle
