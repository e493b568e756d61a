#include "xmdp/milp/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace xmdp::milp {

const char* to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::IterationLimit: return "IterationLimit";
    }
    return "Unknown";
}

int MilpModel::add_var(const std::string& varName, double lo, double hi, VarKind kind,
                       double objectiveCoeff, VarTag tag) {
    Variable v;
    v.name = varName;
    v.lo = lo;
    v.hi = hi;
    v.kind = kind;
    v.tag = tag;
    vars.push_back(std::move(v));
    objective.push_back(objectiveCoeff);
    return static_cast<int>(vars.size()) - 1;
}

int MilpModel::add_constraint(const std::string& conName, std::vector<std::pair<int, double>> terms,
                              Sense sense, double rhs) {
    // merge duplicates, drop zeros, sort by variable index
    std::map<int, double> merged;
    for (const auto& [j, c] : terms) merged[j] += c;
    Constraint con;
    con.name = conName;
    for (const auto& [j, c] : merged)
        if (c != 0.0) con.terms.emplace_back(j, c);
    con.sense = sense;
    con.rhs = rhs;
    cons.push_back(std::move(con));
    return static_cast<int>(cons.size()) - 1;
}

int MilpModel::var_index(const std::string& varName) const {
    for (size_t i = 0; i < vars.size(); ++i)
        if (vars[i].name == varName) return static_cast<int>(i);
    return -1;
}

int MilpModel::constraint_index(const std::string& conName) const {
    for (size_t i = 0; i < cons.size(); ++i)
        if (cons[i].name == conName) return static_cast<int>(i);
    return -1;
}

void MilpModel::validate() const {
    require(objective.size() == vars.size(), Errc::LengthMismatch,
            "objective length does not match variable count");
    for (const auto& v : vars) {
        require(v.lo <= v.hi, Errc::InvalidArgument,
                "variable '" + v.name + "' has inconsistent bounds");
        if (v.kind == VarKind::Binary)
            require(v.lo >= -1e-12 && v.hi <= 1.0 + 1e-12, Errc::InvalidArgument,
                    "binary variable '" + v.name + "' must have bounds within [0,1]");
    }
    int n = static_cast<int>(vars.size());
    for (const auto& con : cons) {
        int prev = -1;
        for (const auto& [j, c] : con.terms) {
            require(j >= 0 && j < n, Errc::InvalidArgument,
                    "constraint '" + con.name + "' references undeclared variable index " +
                        std::to_string(j));
            require(j > prev, Errc::InvalidArgument,
                    "constraint '" + con.name + "' terms are not sorted/merged");
            require(std::isfinite(c), Errc::InvalidArgument,
                    "constraint '" + con.name + "' has a non-finite coefficient");
            prev = j;
        }
        require(std::isfinite(con.rhs), Errc::InvalidArgument,
                "constraint '" + con.name + "' has a non-finite right-hand side");
    }
}

bool MilpModel::feasible(const std::vector<double>& x, double tol) const {
    if (x.size() != vars.size()) return false;
    for (size_t j = 0; j < vars.size(); ++j)
        if (x[j] < vars[j].lo - tol || x[j] > vars[j].hi + tol) return false;
    for (const auto& con : cons) {
        double lhs = 0.0;
        for (const auto& [j, c] : con.terms) lhs += c * x[static_cast<size_t>(j)];
        switch (con.sense) {
        case Sense::Le:
            if (lhs > con.rhs + tol) return false;
            break;
        case Sense::Ge:
            if (lhs < con.rhs - tol) return false;
            break;
        case Sense::Eq:
            if (std::abs(lhs - con.rhs) > tol) return false;
            break;
        }
    }
    return true;
}

double MilpModel::objective_value(const std::vector<double>& x) const {
    double v = objectiveConstant;
    for (size_t j = 0; j < vars.size(); ++j) v += objective[j] * x[j];
    return v;
}

bool same_model(const MilpModel& a, const MilpModel& b, double tol) {
    auto close = [tol](double x, double y) {
        if (std::isinf(x) || std::isinf(y)) return x == y;
        return std::abs(x - y) <= tol;
    };
    if (a.vars.size() != b.vars.size() || a.cons.size() != b.cons.size()) return false;
    if (!close(a.objectiveConstant, b.objectiveConstant)) return false;
    for (size_t j = 0; j < a.vars.size(); ++j) {
        const Variable& u = a.vars[j];
        const Variable& v = b.vars[j];
        if (u.name != v.name || u.kind != v.kind || !close(u.lo, v.lo) || !close(u.hi, v.hi))
            return false;
        if (!close(a.objective[j], b.objective[j])) return false;
    }
    for (size_t i = 0; i < a.cons.size(); ++i) {
        const Constraint& u = a.cons[i];
        const Constraint& v = b.cons[i];
        if (u.name != v.name || u.sense != v.sense || !close(u.rhs, v.rhs)) return false;
        if (u.terms.size() != v.terms.size()) return false;
        for (size_t k = 0; k < u.terms.size(); ++k)
            if (u.terms[k].first != v.terms[k].first || !close(u.terms[k].second, v.terms[k].second))
                return false;
    }
    return true;
}

} // namespace xmdp::milp
