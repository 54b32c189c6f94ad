#include "sweepplast/qp.hpp"

#include <algorithm>
#include <cmath>

#include "sweepplast/errors.hpp"
#include "sweepplast/lp.hpp"

namespace sweepplast {

QpResult solve_qp(const Mat& W, const Vec& w, const Mat& A, const Vec& b) {
    const Eigen::Index n = W.rows();
    const Eigen::Index m = A.rows();
    if (W.cols() != n || w.size() != n || (m && A.cols() != n) || b.size() != m)
        throw PreconditionError("solve_qp: inconsistent dimensions");
    Eigen::LLT<Mat> llt(W);
    if (llt.info() != Eigen::Success) throw PreconditionError("solve_qp: W not positive definite");
    const Mat Ginv = llt.solve(Mat::Identity(n, n));

    QpResult res;
    res.z = llt.solve(w);
    res.multipliers = Vec::Zero(m);
    if (m == 0) return res;

    Vec rownorm(m);
    double bscale = 1.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        rownorm(i) = std::max(A.row(i).norm(), 1e-300);
        bscale = std::max(bscale, std::abs(b(i)) / rownorm(i));
    }
    const double viol_tol = 1e-12 * bscale;

    std::vector<Eigen::Index> J;
    std::vector<double> u;
    const int cap = static_cast<int>(20 * (m + n) + 200);

    while (true) {
        // Most violated constraint, scaled by the row norm.
        Eigen::Index p = -1;
        double worst = -viol_tol;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (std::find(J.begin(), J.end(), i) != J.end()) continue;
            const double s = (b(i) - A.row(i).dot(res.z)) / rownorm(i);
            if (s < worst) {
                worst = s;
                p = i;
            }
        }
        if (p < 0) break;
        const Vec np = -A.row(p).transpose();
        double up = 0.0;

        while (true) {
            if (++res.iterations > cap) throw InternalError("solve_qp: iteration cap reached");
            const Eigen::Index k = static_cast<Eigen::Index>(J.size());
            Vec zdir, r;
            if (k == 0) {
                zdir = Ginv * np;
                r.resize(0);
            } else {
                Mat N(n, k);
                for (Eigen::Index j = 0; j < k; ++j) N.col(j) = -A.row(J[j]).transpose();
                const Mat GN = Ginv * N;
                Eigen::LDLT<Mat> ldlt(N.transpose() * GN);
                r = ldlt.solve(GN.transpose() * np);
                zdir = Ginv * np - GN * r;
            }
            const double curv = zdir.dot(np);
            const double ref = np.dot(Ginv * np);
            const double sp = np.dot(res.z) + b(p);  // n_p^T z - d_p with d_p = -b_p
            double t2 = kInf;
            if (curv > 1e-13 * ref) t2 = -sp / curv;
            double t1 = kInf;
            Eigen::Index l = -1;
            for (Eigen::Index j = 0; j < k; ++j) {
                if (r(j) > 1e-14) {
                    const double q = u[j] / r(j);
                    if (q < t1) {
                        t1 = q;
                        l = j;
                    }
                }
            }
            if (!std::isfinite(t1) && !std::isfinite(t2)) throw EmptySet("solve_qp: infeasible constraints");
            const double t = std::min(t1, t2);
            for (Eigen::Index j = 0; j < k; ++j) u[j] -= t * r(j);
            up += t;
            if (std::isfinite(t2)) res.z += t * zdir;
            if (t2 <= t1) {
                J.push_back(p);
                u.push_back(up);
                break;
            }
            J.erase(J.begin() + l);
            u.erase(u.begin() + l);
        }
    }
    res.active = J;
    for (std::size_t j = 0; j < J.size(); ++j) res.multipliers(J[j]) = std::max(0.0, u[j]);
    return res;
}

} // namespace sweepplast
