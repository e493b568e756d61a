#include "xmdp/milp/solver.hpp"

#include "xmdp/milp/simplex.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <queue>

namespace xmdp::milp {

namespace {

constexpr double kIntTol = 1e-6;  // integrality acceptance
constexpr double kFeasTol = 1e-6; // incumbent feasibility check

struct Node {
    long id = 0;
    double bound = 0.0;
    std::vector<double> lo, hi;
    std::vector<double> x; // LP solution at this node
};

struct NodeOrder {
    bool operator()(const std::shared_ptr<Node>& a, const std::shared_ptr<Node>& b) const {
        if (a->bound != b->bound) return a->bound > b->bound; // min-heap on bound
        return a->id > b->id;                                 // then FIFO
    }
};

double fractionality(double v) {
    double f = v - std::floor(v);
    return std::min(f, 1.0 - f);
}

} // namespace

MilpSolution solve(const MilpModel& model, const SolveLimits& limits) {
    model.validate();
    auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    MilpSolution best;
    best.status = SolveStatus::IterationLimit;
    bool haveIncumbent = false;
    double incumbentObj = kInfinity;

    std::vector<int> binaries;
    for (size_t j = 0; j < model.vars.size(); ++j)
        if (model.vars[j].kind == VarKind::Binary) binaries.push_back(static_cast<int>(j));

    auto rootLo = std::make_shared<Node>();
    rootLo->lo.resize(model.vars.size());
    rootLo->hi.resize(model.vars.size());
    for (size_t j = 0; j < model.vars.size(); ++j) {
        rootLo->lo[j] = model.vars[j].lo;
        rootLo->hi[j] = model.vars[j].hi;
    }

    LpResult rootLp = solve_lp(model, rootLo->lo, rootLo->hi);
    best.stats.lpIterations += rootLp.iterations;
    if (rootLp.status == LpStatus::Infeasible) {
        best.status = SolveStatus::Infeasible;
        best.stats.wallSeconds = elapsed();
        return best;
    }
    if (rootLp.status == LpStatus::Unbounded) {
        best.status = SolveStatus::Unbounded;
        best.stats.wallSeconds = elapsed();
        return best;
    }
    if (rootLp.status == LpStatus::IterationLimit) {
        best.stats.wallSeconds = elapsed();
        return best;
    }
    rootLo->bound = rootLp.objective;
    rootLo->x = std::move(rootLp.x);

    std::priority_queue<std::shared_ptr<Node>, std::vector<std::shared_ptr<Node>>, NodeOrder> open;
    open.push(rootLo);
    long nextId = 1;
    bool hitLimit = false;

    auto gap_tol = [&] { return std::max(1e-9, 1e-6 * std::abs(incumbentObj)); };

    while (!open.empty()) {
        if (best.stats.nodes >= limits.maxNodes || elapsed() > limits.maxSeconds) {
            hitLimit = true;
            break;
        }
        std::shared_ptr<Node> node = open.top();
        open.pop();
        ++best.stats.nodes;

        // best-bound order: once the best open bound is worse than the
        // incumbent (within the MIP gap), optimality is proven
        if (haveIncumbent && node->bound >= incumbentObj - gap_tol()) break;

        // fractional binaries
        int branchVar = -1;
        double branchScore = -1.0;
        for (int j : binaries) {
            double v = node->x[static_cast<size_t>(j)];
            double f = fractionality(v);
            if (f <= kIntTol) continue;
            if (f > branchScore + 1e-15) {
                branchScore = f;
                branchVar = j;
            }
        }

        if (branchVar < 0) {
            // integral within tolerance: round binaries exactly, verify, accept
            std::vector<double> candidate = node->x;
            for (int j : binaries)
                candidate[static_cast<size_t>(j)] = std::round(candidate[static_cast<size_t>(j)]);
            if (!model.feasible(candidate, kFeasTol)) candidate = node->x;
            double obj = model.objective_value(candidate);
            require(obj >= node->bound - std::max(1e-6, 1e-9 * std::abs(obj)), Errc::SolverFailure,
                    "LP node bound exceeds the objective of its own integral solution");
            if (!haveIncumbent || obj < incumbentObj - 1e-12) {
                haveIncumbent = true;
                incumbentObj = obj;
                best.x = std::move(candidate);
                best.objective = obj;
            }
            continue;
        }

        for (int side = 0; side < 2; ++side) {
            auto child = std::make_shared<Node>();
            child->id = nextId++;
            child->lo = node->lo;
            child->hi = node->hi;
            double v = node->x[static_cast<size_t>(branchVar)];
            if (side == 0)
                child->hi[static_cast<size_t>(branchVar)] = std::floor(v);
            else
                child->lo[static_cast<size_t>(branchVar)] = std::ceil(v);

            LpResult lp = solve_lp(model, child->lo, child->hi);
            best.stats.lpIterations += lp.iterations;
            if (lp.status == LpStatus::Infeasible) continue;
            if (lp.status == LpStatus::Unbounded) {
                best.status = SolveStatus::Unbounded;
                best.stats.wallSeconds = elapsed();
                return best;
            }
            if (lp.status == LpStatus::IterationLimit) {
                hitLimit = true;
                continue;
            }
            // child relaxations can only tighten the parent bound
            require(lp.objective >= node->bound - std::max(1e-5, 1e-7 * std::abs(node->bound)),
                    Errc::SolverFailure, "child LP bound fell below its parent bound");
            if (haveIncumbent && lp.objective >= incumbentObj - gap_tol()) continue;
            child->bound = lp.objective;
            child->x = std::move(lp.x);
            open.push(std::move(child));
        }
    }

    best.stats.wallSeconds = elapsed();
    if (hitLimit) {
        best.status = SolveStatus::IterationLimit;
        return best;
    }
    best.status = haveIncumbent ? SolveStatus::Optimal : SolveStatus::Infeasible;
    return best;
}

} // namespace xmdp::milp
