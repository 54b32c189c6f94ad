#pragma once

#include <limits>

#include "sweepplast/linalg.hpp"

namespace sweepplast {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// minimize c^T x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  lower <= x <= upper.
// Empty lower/upper mean x >= 0 with no upper bound.
struct LinearProgram {
    Vec c;
    Mat A_ub;
    Vec b_ub;
    Mat A_eq;
    Vec b_eq;
    Vec lower;
    Vec upper;

    Eigen::Index num_vars() const { return c.size(); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Vec x;
    double objective = 0.0;
    // Multipliers at the optimum: c = A_ub^T dual_ub + A_eq^T dual_eq + (bound terms), dual_ub <= 0.
    Vec dual_ub;
    Vec dual_eq;
    // Infeasibility certificate over the rows when status is Infeasible.  For
    // nonnegative and free variables: w_ub >= 0 and w = (w_ub, w_eq) gives
    // A^T w >= 0 on nonnegative columns, = 0 on free ones, and b^T w < 0.
    Vec farkas_ub;
    Vec farkas_eq;
    int iterations = 0;
};

struct LpOptions {
    double feasibility_tol = 1e-9;
    double pivot_tol = 1e-11;
    int max_iterations = 0;  // 0 picks a size-based cap
};

LpResult solve_lp(const LinearProgram& lp, const LpOptions& opts = {});

} // namespace sweepplast
