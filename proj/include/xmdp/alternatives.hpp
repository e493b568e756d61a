#pragma once

#include "xmdp/evaluate.hpp"
#include "xmdp/milp/model.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace xmdp::alt {

/// Penalty term phi(v) on the violation of a soft QA bound. Quadratic shapes
/// are piecewise-linearized with slope-ordered segments.
struct PenaltySpec {
    enum class Shape { Linear, Quadratic };
    Shape shape = Shape::Quadratic;
    double slope = 0.0;       // Linear
    double coefficient = 0.0; // Quadratic
    int segments = 8;         // Quadratic
    double violationUpperBound = 0.0;

    /// Throws NonconvexPenalty when the segment slopes would decrease.
    void validate() const;
};

/// One per-QA improvement query: find a policy whose QA-i value improves on
/// the solution policy's value D_i by at least delta (bound theta = D - delta,
/// hard or softened per `penalty`), while the other objectives keep their
/// original weights and QA i is down-weighted to kPrime.
struct AlternativeQuery {
    int qa = -1;
    double solutionValue = 0.0; // D_i
    double delta = 0.0;
    double theta = 0.0;
    double kPrime = 0.0;
    std::optional<PenaltySpec> penalty; // empty: hard bound
    double flowBound = 1.0;             // X (total-cost); Eqn 2 fixes X = Y = 1

    void validate(const ExplicitMdp& mdp) const;
};

/// Occupation-measure MILP for the total-cost criterion: flow conservation,
/// unit source and goal inflow, at-most-one binaries with linking rows, and
/// the QA-i cap.
milp::MilpModel build_total_cost_milp(const ExplicitMdp& mdp, const AlternativeQuery& query);

/// Occupation-measure MILP for the average-cost criterion with the recurrent
/// (x) and transient (y) flow families.
milp::MilpModel build_average_cost_milp(const ExplicitMdp& mdp, const AlternativeQuery& query);

/// Replaces the hard QA cap with the soft triple (<= D_i, - v <= theta,
/// -v <= 0) and adds the penalty term to the objective.
void apply_soft_constraint(milp::MilpModel& model, const AlternativeQuery& query);

/// Reads a deterministic policy off an optimal occupation-measure solution.
/// Throws AmbiguousRecovery when two actions carry measure at one state.
Policy recover_policy(const milp::MilpSolution& solution, const milp::MilpModel& model,
                      const ExplicitMdp& mdp);

/// Zeroes occupation measure on states unreachable from the start along the
/// solution's own support (zero-cost ghost circulations are feasible but
/// meaningless). Total-cost models only.
void strip_unreachable_flow(const milp::MilpModel& model, const ExplicitMdp& mdp,
                            milp::MilpSolution& solution);

struct QaDelta {
    int qa = -1;
    double amount = 0.0; // positive improvement / deterioration
};

struct AlternativeResult {
    int targetQa = -1;
    Policy policy;
    PolicyValuation valuation;
    double violation = 0.0;
    std::vector<QaDelta> gains;   // QAs the alternative improves
    std::vector<QaDelta> losses;  // QAs it worsens
    std::string lpText;           // set when LP export was requested
};

struct GenerateOptions {
    std::map<int, double> deltas;   // per-QA override of the improvement margin
    double kPrimeRatio = 0.01;      // kPrime = ratio * k_i
    PenaltySpec::Shape penaltyShape = PenaltySpec::Shape::Quadratic;
    bool exportLp = false;
    milp::SolveLimits limits;
};

struct GenerateOutcome {
    std::vector<AlternativeResult> alternatives; // ordered by QA index
    std::vector<std::string> warnings;           // per-QA failures, non-fatal
    std::vector<double> lowerBounds;             // per-QA best achievable value
    std::map<int, std::string> lpTexts;          // per attempted QA, when requested
};

/// Builds, solves and filters one improvement query per QA. Results are kept
/// only when they strictly improve the target QA and differ from the solution
/// policy in some reachable decision.
GenerateOutcome generate_alternatives(const ExplicitMdp& mdp, const Policy& solutionPolicy,
                                      const PolicyValuation& solutionValuation,
                                      const GenerateOptions& options = {});

} // namespace xmdp::alt
