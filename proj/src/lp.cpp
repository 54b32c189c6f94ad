#include "sweepplast/lp.hpp"

#include <cmath>
#include <vector>

#include "sweepplast/errors.hpp"

namespace sweepplast {
namespace {

// Dense tableau; row m holds reduced costs, column ncols holds the right side.
class Tableau {
public:
    Tableau(Eigen::Index m, Eigen::Index n) : t_(Mat::Zero(m + 1, n + 1)), basis_(m, -1), m_(m), n_(n) {}

    Mat& t() { return t_; }
    std::vector<Eigen::Index>& basis() { return basis_; }

    void pivot(Eigen::Index r, Eigen::Index c) {
        t_.row(r) /= t_(r, c);
        for (Eigen::Index i = 0; i <= m_; ++i) {
            if (i == r) continue;
            const double f = t_(i, c);
            if (f != 0.0) t_.row(i) -= f * t_.row(r);
        }
        basis_[r] = c;
    }

    // Returns 0 optimal, 1 unbounded, 2 iteration cap.
    int run(const std::vector<bool>& allowed, const LpOptions& o, int cap, int& iters) {
        int degenerate = 0;
        const double dtol = 1e-10;
        while (iters < cap) {
            const bool bland = degenerate > 50;
            Eigen::Index enter = -1;
            double best = -dtol;
            for (Eigen::Index j = 0; j < n_; ++j) {
                if (!allowed[j]) continue;
                const double d = t_(m_, j);
                if (d < best) {
                    enter = j;
                    best = d;
                    if (bland) break;
                }
            }
            if (enter < 0) return 0;
            Eigen::Index leave = -1;
            double ratio = kInf;
            for (Eigen::Index i = 0; i < m_; ++i) {
                const double a = t_(i, enter);
                if (a <= o.pivot_tol) continue;
                const double q = t_(i, n_) / a;
                if (q < ratio - 1e-13 ||
                    (std::abs(q - ratio) <= 1e-13 && leave >= 0 && basis_[i] < basis_[leave])) {
                    ratio = q;
                    leave = i;
                }
            }
            if (leave < 0) return 1;
            degenerate = ratio <= 1e-13 ? degenerate + 1 : 0;
            pivot(leave, enter);
            ++iters;
        }
        return 2;
    }

private:
    Mat t_;
    std::vector<Eigen::Index> basis_;
    Eigen::Index m_, n_;
};

struct VarMap {
    double offset = 0.0;
    Eigen::Index pos = -1;  // column of the + part
    double sign = 1.0;
    Eigen::Index neg = -1;  // column of the - part for free variables
};

} // namespace

LpResult solve_lp(const LinearProgram& lp, const LpOptions& opts) {
    const Eigen::Index n = lp.num_vars();
    const Eigen::Index mub = lp.A_ub.rows();
    const Eigen::Index meq = lp.A_eq.rows();
    if ((mub && lp.A_ub.cols() != n) || (meq && lp.A_eq.cols() != n) || lp.b_ub.size() != mub ||
        lp.b_eq.size() != meq)
        throw PreconditionError("solve_lp: inconsistent dimensions");
    Vec lo = lp.lower.size() ? lp.lower : Vec::Zero(n);
    Vec up = lp.upper.size() ? lp.upper : Vec::Constant(n, kInf);

    // Map every variable onto nonnegative standard columns.
    std::vector<VarMap> vm(n);
    Eigen::Index ns = 0;
    std::vector<std::pair<Eigen::Index, double>> bound_rows;  // (column, bound)
    for (Eigen::Index j = 0; j < n; ++j) {
        const bool fl = std::isfinite(lo(j)), fu = std::isfinite(up(j));
        if (fl && fu && up(j) < lo(j)) {
            LpResult r;
            r.status = LpStatus::Infeasible;
            r.farkas_ub = Vec::Zero(mub);
            r.farkas_eq = Vec::Zero(meq);
            return r;
        }
        if (fl) {
            vm[j] = {lo(j), ns++, 1.0, -1};
            if (fu) bound_rows.emplace_back(vm[j].pos, up(j) - lo(j));
        } else if (fu) {
            vm[j] = {up(j), ns++, -1.0, -1};
        } else {
            vm[j].pos = ns++;
            vm[j].neg = ns++;
        }
    }
    const Eigen::Index nb = static_cast<Eigen::Index>(bound_rows.size());
    const Eigen::Index mu = mub + nb;
    const Eigen::Index m = mu + meq;
    const Eigen::Index ncols = ns + mu + m;  // structural, slacks, artificials

    Mat A = Mat::Zero(m, ns);
    Vec b(m);
    Vec cs = Vec::Zero(ns);
    auto expand = [&](const Eigen::Ref<const Eigen::RowVectorXd>& row, Eigen::Index r, double rhs) {
        double shift = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double a = row(j);
            if (a == 0.0) continue;
            shift += a * vm[j].offset;
            A(r, vm[j].pos) += a * vm[j].sign;
            if (vm[j].neg >= 0) A(r, vm[j].neg) -= a;
        }
        b(r) = rhs - shift;
    };
    for (Eigen::Index i = 0; i < mub; ++i) expand(lp.A_ub.row(i), i, lp.b_ub(i));
    for (Eigen::Index k = 0; k < nb; ++k) {
        A(mub + k, bound_rows[k].first) = 1.0;
        b(mub + k) = bound_rows[k].second;
    }
    for (Eigen::Index i = 0; i < meq; ++i) expand(lp.A_eq.row(i), mu + i, lp.b_eq(i));
    for (Eigen::Index j = 0; j < n; ++j) {
        cs(vm[j].pos) += lp.c(j) * vm[j].sign;
        if (vm[j].neg >= 0) cs(vm[j].neg) -= lp.c(j);
    }

    Tableau tab(m, ncols);
    Mat& T = tab.t();
    Vec flip = Vec::Ones(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (b(i) < 0.0) flip(i) = -1.0;
        T.row(i).head(ns) = flip(i) * A.row(i);
        if (i < mu) T(i, ns + i) = flip(i);
        T(i, ns + mu + i) = 1.0;
        T(i, ncols) = flip(i) * b(i);
        tab.basis()[i] = ns + mu + i;
    }
    // Phase 1: minimize the sum of artificials.
    for (Eigen::Index i = 0; i < m; ++i) {
        T.row(m).head(ns + mu) -= T.row(i).head(ns + mu);
        T(m, ncols) -= T(i, ncols);
    }
    const int cap = opts.max_iterations > 0 ? opts.max_iterations
                                            : static_cast<int>(50 * (m + ncols) + 1000);
    LpResult res;
    std::vector<bool> allowed(ncols, true);
    tab.run(allowed, opts, cap, res.iterations);
    const double infeas = -T(m, ncols);
    const double bscale = std::max(1.0, b.cwiseAbs().maxCoeff());
    if (infeas > opts.feasibility_tol * bscale) {
        res.status = LpStatus::Infeasible;
        Vec y(m);
        for (Eigen::Index i = 0; i < m; ++i) y(i) = -(1.0 - T(m, ns + mu + i)) * flip(i);
        res.farkas_ub = y.head(mub);
        res.farkas_eq = y.tail(meq);
        return res;
    }
    // Drive remaining artificials out of the basis where possible.
    for (Eigen::Index i = 0; i < m; ++i) {
        if (tab.basis()[i] < ns + mu) continue;
        Eigen::Index k = -1;
        double best = opts.pivot_tol;
        for (Eigen::Index j = 0; j < ns + mu; ++j)
            if (std::abs(T(i, j)) > best) {
                best = std::abs(T(i, j));
                k = j;
            }
        if (k >= 0) tab.pivot(i, k);
    }
    // Phase 2.
    for (Eigen::Index j = ns + mu; j < ncols; ++j) allowed[j] = false;
    Vec call = Vec::Zero(ncols);
    call.head(ns) = cs;
    T.row(m).setZero();
    T.row(m).head(ncols) = call.transpose();
    for (Eigen::Index i = 0; i < m; ++i) {
        const double cb = call(tab.basis()[i]);
        if (cb != 0.0) T.row(m) -= cb * T.row(i);
    }
    const int st = tab.run(allowed, opts, cap, res.iterations);
    if (st == 1) {
        res.status = LpStatus::Unbounded;
        return res;
    }
    if (st == 2) throw InternalError("solve_lp: iteration cap reached");

    Vec xs = Vec::Zero(ncols);
    for (Eigen::Index i = 0; i < m; ++i) xs(tab.basis()[i]) = T(i, ncols);
    res.x.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double v = vm[j].offset + vm[j].sign * xs(vm[j].pos);
        if (vm[j].neg >= 0) v -= xs(vm[j].neg);
        res.x(j) = v;
    }
    res.objective = lp.c.dot(res.x);
    Vec y(m);
    for (Eigen::Index i = 0; i < m; ++i) y(i) = -T(m, ns + mu + i) * flip(i);
    res.dual_ub = y.head(mub);
    res.dual_eq = y.tail(meq);
    res.status = LpStatus::Optimal;
    return res;
}

} // namespace sweepplast
