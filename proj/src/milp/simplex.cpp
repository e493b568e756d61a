#include "xmdp/milp/simplex.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace xmdp::milp {

namespace {

constexpr double kDualTol = 1e-9;  // reduced-cost threshold
constexpr double kFeasTol = 1e-7;  // primal feasibility / phase-1 acceptance
constexpr double kPivotTol = 1e-9; // smallest usable pivot element
constexpr int kRefactorEvery = 100;
constexpr int kDegenerateRun = 600; // switch to Bland after this many stalls

enum class VStat { Basic, AtLo, AtHi, FreeZero };

/// Working tableau-free simplex state over columns
///   [ structural 0..n-1 | slack n..n+m-1 | artificial n+m..n+2m-1 ].
struct Simplex {
    const MilpModel& model;
    int n, m, total;
    std::vector<double> lo, hi;     // per column
    std::vector<double> cost;       // phase-2 cost per column
    std::vector<double> phase1Cost; // 1 on artificials
    std::vector<std::vector<std::pair<int, double>>> cols; // sparse columns
    std::vector<double> b;

    std::vector<int> basis;    // row -> column
    std::vector<VStat> stat;   // per column
    std::vector<double> xval;  // per column
    Eigen::MatrixXd binv;
    long iterations = 0;
    bool bland = false;
    int degenerateRun = 0;
    int sinceRefactor = 0;

    Simplex(const MilpModel& mdl, std::span<const double> vlo, std::span<const double> vhi)
        : model(mdl) {
        n = static_cast<int>(mdl.vars.size());
        m = static_cast<int>(mdl.cons.size());
        total = n + 2 * m;
        lo.assign(static_cast<size_t>(total), 0.0);
        hi.assign(static_cast<size_t>(total), kInfinity);
        cost.assign(static_cast<size_t>(total), 0.0);
        phase1Cost.assign(static_cast<size_t>(total), 0.0);
        cols.resize(static_cast<size_t>(total));
        b.resize(static_cast<size_t>(m));

        for (int j = 0; j < n; ++j) {
            lo[static_cast<size_t>(j)] = vlo[static_cast<size_t>(j)];
            hi[static_cast<size_t>(j)] = vhi[static_cast<size_t>(j)];
            cost[static_cast<size_t>(j)] = mdl.objective[static_cast<size_t>(j)];
        }
        for (int i = 0; i < m; ++i) {
            const Constraint& con = mdl.cons[static_cast<size_t>(i)];
            for (const auto& [j, c] : con.terms) cols[static_cast<size_t>(j)].emplace_back(i, c);
            b[static_cast<size_t>(i)] = con.rhs;
            int slack = n + i;
            cols[static_cast<size_t>(slack)].emplace_back(i, 1.0);
            switch (con.sense) {
            case Sense::Le:
                lo[static_cast<size_t>(slack)] = 0.0;
                hi[static_cast<size_t>(slack)] = kInfinity;
                break;
            case Sense::Eq:
                lo[static_cast<size_t>(slack)] = 0.0;
                hi[static_cast<size_t>(slack)] = 0.0;
                break;
            case Sense::Ge:
                lo[static_cast<size_t>(slack)] = -kInfinity;
                hi[static_cast<size_t>(slack)] = 0.0;
                break;
            }
        }
    }

    bool is_artificial(int j) const { return j >= n + m; }

    double nonbasic_resting_value(int j) const {
        double l = lo[static_cast<size_t>(j)], h = hi[static_cast<size_t>(j)];
        if (std::isfinite(l) && (std::abs(l) <= std::abs(h) || !std::isfinite(h))) return l;
        if (std::isfinite(h)) return h;
        return 0.0;
    }

    VStat nonbasic_resting_stat(int j) const {
        double l = lo[static_cast<size_t>(j)], h = hi[static_cast<size_t>(j)];
        if (std::isfinite(l) && (std::abs(l) <= std::abs(h) || !std::isfinite(h))) return VStat::AtLo;
        if (std::isfinite(h)) return VStat::AtHi;
        return VStat::FreeZero;
    }

    void setup() {
        stat.assign(static_cast<size_t>(total), VStat::AtLo);
        xval.assign(static_cast<size_t>(total), 0.0);
        for (int j = 0; j < n + m; ++j) {
            stat[static_cast<size_t>(j)] = nonbasic_resting_stat(j);
            xval[static_cast<size_t>(j)] = nonbasic_resting_value(j);
        }
        // residuals decide the artificial column signs
        std::vector<double> r = b;
        for (int j = 0; j < n + m; ++j) {
            double v = xval[static_cast<size_t>(j)];
            if (v == 0.0) continue;
            for (const auto& [i, c] : cols[static_cast<size_t>(j)]) r[static_cast<size_t>(i)] -= c * v;
        }
        basis.resize(static_cast<size_t>(m));
        binv = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            int art = n + m + i;
            double sigma = r[static_cast<size_t>(i)] >= 0.0 ? 1.0 : -1.0;
            cols[static_cast<size_t>(art)].emplace_back(i, sigma);
            lo[static_cast<size_t>(art)] = 0.0;
            hi[static_cast<size_t>(art)] = kInfinity;
            phase1Cost[static_cast<size_t>(art)] = 1.0;
            basis[static_cast<size_t>(i)] = art;
            stat[static_cast<size_t>(art)] = VStat::Basic;
            xval[static_cast<size_t>(art)] = std::abs(r[static_cast<size_t>(i)]);
            binv(i, i) = sigma; // B = diag(sigma) so B^-1 = diag(sigma)
        }
    }

    /// Rebuilds the basis inverse and the basic values from the original data.
    bool refactor() {
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i)
            for (const auto& [row, c] : cols[static_cast<size_t>(basis[static_cast<size_t>(i)])])
                B(row, i) = c;
        Eigen::FullPivLU<Eigen::MatrixXd> luB(B);
        if (!luB.isInvertible()) return false;
        binv = luB.inverse();
        recompute_basics();
        sinceRefactor = 0;
        return true;
    }

    void recompute_basics() {
        Eigen::VectorXd rhs(m);
        for (int i = 0; i < m; ++i) rhs(i) = b[static_cast<size_t>(i)];
        for (int j = 0; j < total; ++j) {
            if (stat[static_cast<size_t>(j)] == VStat::Basic) continue;
            double v = xval[static_cast<size_t>(j)];
            if (v == 0.0) continue;
            for (const auto& [i, c] : cols[static_cast<size_t>(j)]) rhs(i) -= c * v;
        }
        Eigen::VectorXd xb = binv * rhs;
        for (int i = 0; i < m; ++i) xval[static_cast<size_t>(basis[static_cast<size_t>(i)])] = xb(i);
    }

    Eigen::VectorXd column_in_basis(int j) const {
        Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
        for (const auto& [i, c] : cols[static_cast<size_t>(j)]) w += c * binv.col(i);
        return w;
    }

    double reduced_cost(int j, const Eigen::VectorXd& y, const std::vector<double>& c) const {
        double d = c[static_cast<size_t>(j)];
        for (const auto& [i, cv] : cols[static_cast<size_t>(j)]) d -= cv * y(i);
        return d;
    }

    /// One simplex phase; `c` is the active cost vector.
    /// Returns Optimal / Unbounded / IterationLimit.
    LpStatus run_phase(const std::vector<double>& c, long iterationCap) {
        while (true) {
            if (iterations >= iterationCap) return LpStatus::IterationLimit;
            ++iterations;
            if (++sinceRefactor >= kRefactorEvery) {
                if (!refactor()) return LpStatus::IterationLimit;
            }

            // simplex multipliers y = c_B^T B^-1
            Eigen::VectorXd cb(m);
            for (int i = 0; i < m; ++i) cb(i) = c[static_cast<size_t>(basis[static_cast<size_t>(i)])];
            Eigen::VectorXd y = binv.transpose() * cb;

            // pricing
            int q = -1;
            int dir = +1;
            double best = kDualTol;
            for (int j = 0; j < total; ++j) {
                VStat st = stat[static_cast<size_t>(j)];
                if (st == VStat::Basic) continue;
                if (lo[static_cast<size_t>(j)] == hi[static_cast<size_t>(j)]) continue; // fixed
                double d = reduced_cost(j, y, c);
                double score = 0.0;
                int candidateDir = 0;
                if (st == VStat::AtLo && d < -kDualTol) {
                    score = -d;
                    candidateDir = +1;
                } else if (st == VStat::AtHi && d > kDualTol) {
                    score = d;
                    candidateDir = -1;
                } else if (st == VStat::FreeZero && std::abs(d) > kDualTol) {
                    score = std::abs(d);
                    candidateDir = d < 0 ? +1 : -1;
                }
                if (candidateDir == 0) continue;
                if (bland) { // first attractive index
                    q = j;
                    dir = candidateDir;
                    break;
                }
                if (score > best + 1e-15) {
                    best = score;
                    q = j;
                    dir = candidateDir;
                }
            }
            if (q < 0) return LpStatus::Optimal;

            Eigen::VectorXd w = column_in_basis(q);

            // ratio test: step along +/- direction until a basic variable or
            // the entering variable's own opposite bound blocks
            double limit = kInfinity;
            int leaveRow = -1;
            double leavePivotMag = 0.0;
            for (int i = 0; i < m; ++i) {
                double tw = dir * w(i);
                int bj = basis[static_cast<size_t>(i)];
                double xb = xval[static_cast<size_t>(bj)];
                double step = kInfinity;
                if (tw > kPivotTol) {
                    if (std::isfinite(lo[static_cast<size_t>(bj)]))
                        step = (xb - lo[static_cast<size_t>(bj)]) / tw;
                } else if (tw < -kPivotTol) {
                    if (std::isfinite(hi[static_cast<size_t>(bj)]))
                        step = (hi[static_cast<size_t>(bj)] - xb) / (-tw);
                } else {
                    continue;
                }
                step = std::max(step, 0.0);
                if (step < limit - 1e-12 ||
                    (step < limit + 1e-12 &&
                     (std::abs(w(i)) > leavePivotMag + 1e-12 ||
                      (std::abs(std::abs(w(i)) - leavePivotMag) <= 1e-12 && leaveRow >= 0 &&
                       bj < basis[static_cast<size_t>(leaveRow)])))) {
                    limit = step;
                    leaveRow = i;
                    leavePivotMag = std::abs(w(i));
                }
            }
            double ownRange = (std::isfinite(lo[static_cast<size_t>(q)]) &&
                               std::isfinite(hi[static_cast<size_t>(q)]))
                                  ? hi[static_cast<size_t>(q)] - lo[static_cast<size_t>(q)]
                                  : kInfinity;

            if (!std::isfinite(limit) && !std::isfinite(ownRange)) return LpStatus::Unbounded;

            if (ownRange <= limit) {
                // bound flip, no basis change
                double step = ownRange;
                for (int i = 0; i < m; ++i) {
                    int bj = basis[static_cast<size_t>(i)];
                    xval[static_cast<size_t>(bj)] -= dir * w(i) * step;
                }
                xval[static_cast<size_t>(q)] += dir * step;
                stat[static_cast<size_t>(q)] =
                    stat[static_cast<size_t>(q)] == VStat::AtLo ? VStat::AtHi : VStat::AtLo;
                if (step <= 1e-12) ++degenerateRun; else degenerateRun = 0;
            } else {
                double step = limit;
                int l = basis[static_cast<size_t>(leaveRow)];
                if (std::abs(w(leaveRow)) < kPivotTol) {
                    // numerically unusable pivot: refresh and retry once
                    if (!refactor()) return LpStatus::IterationLimit;
                    continue;
                }
                for (int i = 0; i < m; ++i) {
                    int bj = basis[static_cast<size_t>(i)];
                    xval[static_cast<size_t>(bj)] -= dir * w(i) * step;
                }
                xval[static_cast<size_t>(q)] += dir * step;
                // leaving variable rests at the bound that blocked
                stat[static_cast<size_t>(l)] = dir * w(leaveRow) > 0 ? VStat::AtLo : VStat::AtHi;
                xval[static_cast<size_t>(l)] = dir * w(leaveRow) > 0 ? lo[static_cast<size_t>(l)]
                                                                     : hi[static_cast<size_t>(l)];
                if (!std::isfinite(xval[static_cast<size_t>(l)])) xval[static_cast<size_t>(l)] = 0.0;

                // basis inverse update: row ops eliminating w
                double piv = w(leaveRow);
                binv.row(leaveRow) /= piv;
                for (int i = 0; i < m; ++i) {
                    if (i == leaveRow) continue;
                    double f = w(i);
                    if (f != 0.0) binv.row(i) -= f * binv.row(leaveRow);
                }
                basis[static_cast<size_t>(leaveRow)] = q;
                stat[static_cast<size_t>(q)] = VStat::Basic;
                if (step <= 1e-12) ++degenerateRun; else degenerateRun = 0;
            }
            if (degenerateRun >= kDegenerateRun) bland = true;
        }
    }

    double phase1_value() const {
        double v = 0.0;
        for (int j = n + m; j < total; ++j) v += std::abs(xval[static_cast<size_t>(j)]);
        return v;
    }
};

} // namespace

LpResult solve_lp(const MilpModel& model, std::span<const double> lo, std::span<const double> hi) {
    require(lo.size() == model.vars.size() && hi.size() == model.vars.size(), Errc::LengthMismatch,
            "bound override length does not match variable count");
    for (size_t j = 0; j < model.vars.size(); ++j)
        if (lo[j] > hi[j] + 1e-12) return {LpStatus::Infeasible, {}, 0.0, 0};

    int n = static_cast<int>(model.vars.size());
    LpResult res;

    // no constraints: optimize separably over the box
    if (model.cons.empty()) {
        res.x.assign(static_cast<size_t>(n), 0.0);
        for (int j = 0; j < n; ++j) {
            double c = model.objective[static_cast<size_t>(j)];
            double l = lo[static_cast<size_t>(j)], h = hi[static_cast<size_t>(j)];
            double v;
            if (c > 0.0) {
                if (!std::isfinite(l)) return {LpStatus::Unbounded, {}, 0.0, 0};
                v = l;
            } else if (c < 0.0) {
                if (!std::isfinite(h)) return {LpStatus::Unbounded, {}, 0.0, 0};
                v = h;
            } else {
                v = std::isfinite(l) && (std::abs(l) <= std::abs(h) || !std::isfinite(h)) ? l
                    : std::isfinite(h)                                                    ? h
                                                                                          : 0.0;
            }
            res.x[static_cast<size_t>(j)] = v;
        }
        res.status = LpStatus::Optimal;
        res.objective = model.objective_value(res.x);
        return res;
    }

    Simplex sx(model, lo, hi);
    sx.setup();

    long iterationCap = 20000 + 60L * (sx.total);

    LpStatus st = sx.run_phase(sx.phase1Cost, iterationCap);
    res.iterations = sx.iterations;
    if (st == LpStatus::IterationLimit) {
        res.status = LpStatus::IterationLimit;
        return res;
    }
    // phase 1 is bounded below by zero, so Unbounded cannot legitimately occur
    if (st == LpStatus::Unbounded) {
        res.status = LpStatus::IterationLimit;
        return res;
    }
    if (sx.phase1_value() > kFeasTol) {
        res.status = LpStatus::Infeasible;
        return res;
    }

    // pin artificials to zero and optimize the real objective
    for (int j = sx.n + sx.m; j < sx.total; ++j) {
        sx.lo[static_cast<size_t>(j)] = 0.0;
        sx.hi[static_cast<size_t>(j)] = 0.0;
        if (sx.stat[static_cast<size_t>(j)] != VStat::Basic) {
            sx.stat[static_cast<size_t>(j)] = VStat::AtLo;
            sx.xval[static_cast<size_t>(j)] = 0.0;
        }
    }
    if (!sx.refactor()) {
        res.status = LpStatus::IterationLimit;
        res.iterations = sx.iterations;
        return res;
    }
    sx.bland = false;
    sx.degenerateRun = 0;

    st = sx.run_phase(sx.cost, iterationCap * 2);
    res.iterations = sx.iterations;
    if (st == LpStatus::IterationLimit || st == LpStatus::Unbounded) {
        res.status = st == LpStatus::Unbounded ? LpStatus::Unbounded : LpStatus::IterationLimit;
        return res;
    }

    // precision cleanup: recompute the basic values from a fresh factorization
    if (!sx.refactor()) {
        res.status = LpStatus::IterationLimit;
        return res;
    }
    res.x.assign(static_cast<size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) res.x[static_cast<size_t>(j)] = sx.xval[static_cast<size_t>(j)];
    res.status = LpStatus::Optimal;
    res.objective = model.objective_value(res.x);
    return res;
}

LpResult solve_lp(const MilpModel& model) {
    std::vector<double> lo(model.vars.size()), hi(model.vars.size());
    for (size_t j = 0; j < model.vars.size(); ++j) {
        lo[j] = model.vars[j].lo;
        hi[j] = model.vars[j].hi;
    }
    return solve_lp(model, lo, hi);
}

} // namespace xmdp::milp
