#pragma once

#include "xmdp/milp/model.hpp"

namespace xmdp::milp {

/// Branch-and-bound over the LP relaxation: most-fractional branching,
/// best-bound node selection, integrality tolerance 1e-6, relative MIP gap
/// 1e-6. Deterministic: identical models yield identical solutions.
MilpSolution solve(const MilpModel& model, const SolveLimits& limits = {});

} // namespace xmdp::milp
