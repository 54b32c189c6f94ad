#pragma once

#include <vector>

#include "sweepplast/linalg.hpp"

namespace sweepplast {

struct QpResult {
    Vec z;
    Vec multipliers;  // one per row of A, nonnegative, zero off the active set
    std::vector<Eigen::Index> active;
    int iterations = 0;
};

// minimize 1/2 z^T W z - w^T z  subject to  A z <= b, with W positive definite.
// Dual active-set method (Goldfarb-Idnani).  Throws EmptySet when infeasible.
QpResult solve_qp(const Mat& W, const Vec& w, const Mat& A, const Vec& b);

} // namespace sweepplast
