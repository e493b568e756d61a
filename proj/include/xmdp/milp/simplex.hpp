#pragma once

#include "xmdp/milp/model.hpp"

#include <span>

namespace xmdp::milp {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
    LpStatus status = LpStatus::IterationLimit;
    std::vector<double> x; // structural variable values (valid when Optimal)
    double objective = std::numeric_limits<double>::quiet_NaN();
    long iterations = 0;
};

/// Solves the LP relaxation of `model` with the given variable bounds
/// (branch-and-bound nodes tighten bounds without touching the matrix).
///
/// Two-phase bounded-variable revised simplex with an explicit dense basis
/// inverse. Entering rule is Dantzig with a Bland fallback after a run of
/// degenerate pivots; all tie-breaks are by lowest index, so identical inputs
/// produce identical bases and solutions.
LpResult solve_lp(const MilpModel& model, std::span<const double> lo, std::span<const double> hi);

/// Convenience overload using the model's own bounds.
LpResult solve_lp(const MilpModel& model);

} // namespace xmdp::milp
