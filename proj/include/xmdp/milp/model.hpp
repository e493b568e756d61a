#pragma once

#include "xmdp/errors.hpp"

#include <limits>
#include <string>
#include <vector>

namespace xmdp::milp {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class VarKind { Continuous, Binary };

/// Structured link from a variable back to the planning model, used when
/// recovering policies from occupation-measure solutions.
struct VarTag {
    enum class Role { None, FlowX, PickX, FlowY, PickY, Violation, PenaltySegment };
    Role role = Role::None;
    int state = -1;
    int actionSlot = -1;
};

struct Variable {
    std::string name;
    double lo = 0.0;
    double hi = kInfinity;
    VarKind kind = VarKind::Continuous;
    VarTag tag;
};

enum class Sense { Le, Eq, Ge };

struct Constraint {
    std::string name;
    std::vector<std::pair<int, double>> terms; // (variable index, coefficient), sorted by index
    Sense sense = Sense::Le;
    double rhs = 0.0;
};

/// Minimization MILP with sparse linear constraints and explicit bounds.
struct MilpModel {
    std::string name;
    std::vector<Variable> vars;
    std::vector<double> objective; // aligned with vars
    double objectiveConstant = 0.0;
    std::vector<Constraint> cons;

    int add_var(const std::string& varName, double lo, double hi, VarKind kind,
                double objectiveCoeff = 0.0, VarTag tag = {});
    int add_constraint(const std::string& conName, std::vector<std::pair<int, double>> terms,
                       Sense sense, double rhs);

    int var_index(const std::string& varName) const; // -1 if absent
    int constraint_index(const std::string& conName) const;

    /// Bounds sane, indices valid, binaries within [0,1], terms sorted/merged.
    void validate() const;

    /// Feasibility of an assignment within the given tolerance.
    bool feasible(const std::vector<double>& x, double tol) const;

    double objective_value(const std::vector<double>& x) const;
};

/// Structural equality: identical variables (name, bounds, kind), objective,
/// constant and constraints (name, sense, rhs, terms), in identical order.
/// Coefficients within `tol` count as equal.
bool same_model(const MilpModel& a, const MilpModel& b, double tol = 0.0);

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(SolveStatus s);

struct SolveStats {
    long nodes = 0;
    long lpIterations = 0;
    double wallSeconds = 0.0;
};

struct MilpSolution {
    SolveStatus status = SolveStatus::IterationLimit;
    std::vector<double> x;
    double objective = std::numeric_limits<double>::quiet_NaN();
    SolveStats stats;
};

struct SolveLimits {
    long maxNodes = 200000;
    double maxSeconds = 600.0;
};

} // namespace xmdp::milp
