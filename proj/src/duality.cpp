#include "sweepplast/duality.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/SVD>

#include "sweepplast/errors.hpp"

namespace sweepplast {

const char* to_string(DualityVerdict v) {
    return v == DualityVerdict::StrongDuality ? "StrongDuality" : "GapOrNonAttainment";
}

const char* to_string(CqStatus s) {
    switch (s) {
    case CqStatus::Holds: return "Holds";
    case CqStatus::Fails: return "Fails";
    default: return "Undecided";
    }
}

bool CQVerdict::chain_consistent() const {
    const CqStatus chain[] = {slater1.status, slater2.status, rockafellar.status, attouch_brezis.status};
    for (int i = 0; i < 3; ++i)
        if (chain[i] == CqStatus::Holds && chain[i + 1] != CqStatus::Holds) return false;
    return true;
}

namespace {

// Rows accumulated one at a time, assembled into a ConicForm at the end.
struct FormBuilder {
    Eigen::Index n;
    std::vector<Eigen::RowVectorXd> ub, eq;
    std::vector<double> bub, beq;
    std::vector<SocTerm> soc;

    explicit FormBuilder(Eigen::Index dim) : n(dim) {}

    void le(Eigen::RowVectorXd row, double rhs) {
        ub.push_back(std::move(row));
        bub.push_back(rhs);
    }
    void equal(Eigen::RowVectorXd row, double rhs) {
        eq.push_back(std::move(row));
        beq.push_back(rhs);
    }
    Eigen::RowVectorXd zero() const { return Eigen::RowVectorXd::Zero(n); }

    ConicForm build() const {
        ConicForm f;
        f.n = n;
        f.A.resize(static_cast<Eigen::Index>(ub.size()), n);
        f.b.resize(f.A.rows());
        for (std::size_t i = 0; i < ub.size(); ++i) {
            f.A.row(static_cast<Eigen::Index>(i)) = ub[i];
            f.b(static_cast<Eigen::Index>(i)) = bub[i];
        }
        f.Aeq.resize(static_cast<Eigen::Index>(eq.size()), n);
        f.beq.resize(f.Aeq.rows());
        for (std::size_t i = 0; i < eq.size(); ++i) {
            f.Aeq.row(static_cast<Eigen::Index>(i)) = eq[i];
            f.beq(static_cast<Eigen::Index>(i)) = beq[i];
        }
        f.soc = soc;
        return f;
    }
};

// Dual representation of the support function of F:
//   s_F(y) = inf { cost^T u : map u = y, u admissible },
// u = (mu >= 0 per inequality, nu per equality, (w, tau) with |w| <= tau per cone term).
struct DualBlock {
    Eigen::Index off = 0, size = 0;
    Mat map;
    Vec cost;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> cones;  // (start of w, length of w); tau follows
    Eigen::Index n_mu = 0;
};

DualBlock dual_block(const ConicForm& F, Eigen::Index off) {
    DualBlock d;
    d.off = off;
    d.n_mu = F.A.rows();
    d.size = F.A.rows() + F.Aeq.rows();
    for (const auto& t : F.soc) d.size += t.S.rows() + 1;
    d.map = Mat::Zero(F.n, d.size);
    d.cost = Vec::Zero(d.size);
    Eigen::Index c = 0;
    if (F.A.rows()) {
        d.map.middleCols(c, F.A.rows()) = F.A.transpose();
        d.cost.segment(c, F.A.rows()) = F.b;
        c += F.A.rows();
    }
    if (F.Aeq.rows()) {
        d.map.middleCols(c, F.Aeq.rows()) = F.Aeq.transpose();
        d.cost.segment(c, F.Aeq.rows()) = F.beq;
        c += F.Aeq.rows();
    }
    for (const auto& t : F.soc) {
        const Eigen::Index q = t.S.rows();
        d.map.middleCols(c, q) = t.S.transpose();
        d.cost.segment(c, q) = t.c;
        d.cones.emplace_back(off + c, q);
        c += q;
        if (t.h.size()) d.map.col(c) = -t.h;
        d.cost(c) = t.r;
        ++c;
    }
    return d;
}

void add_admissibility(FormBuilder& fb, const DualBlock& d) {
    for (Eigen::Index i = 0; i < d.n_mu; ++i) {
        auto row = fb.zero();
        row(d.off + i) = -1.0;
        fb.le(row, 0.0);
    }
    for (const auto& [w0, q] : d.cones) {
        const Eigen::Index tau = w0 + q;
        auto row = fb.zero();
        row(tau) = -1.0;
        fb.le(row, 0.0);
        // Componentwise cuts |w_i| <= tau seed the outer approximation.
        for (Eigen::Index i = 0; i < q; ++i)
            for (double s : {1.0, -1.0}) {
                auto r = fb.zero();
                r(w0 + i) = s;
                r(tau) = -1.0;
                fb.le(r, 0.0);
            }
        SocTerm t;
        t.S = Mat::Zero(q, fb.n);
        t.S.middleCols(w0, q) = Mat::Identity(q, q);
        t.c = Vec::Zero(q);
        t.r = 0.0;
        t.h = Vec::Zero(fb.n);
        t.h(tau) = 1.0;
        fb.soc.push_back(std::move(t));
    }
}

// max -(s1(y) + s2(d - y)) with every lifted variable capped by R.  Returns -inf when infeasible.
double capped_dual(const ConicForm& F1, const ConicForm& F2, const Vec& d, double R, Vec* y) {
    const Eigen::Index n = d.size();
    const DualBlock b1 = dual_block(F1, n);
    const DualBlock b2 = dual_block(F2, n + b1.size);
    FormBuilder fb(n + b1.size + b2.size);
    for (Eigen::Index i = 0; i < n; ++i) {
        auto r1 = fb.zero();
        r1.segment(b1.off, b1.size) = b1.map.row(i);
        r1(i) = -1.0;
        fb.equal(r1, 0.0);
        auto r2 = fb.zero();
        r2.segment(b2.off, b2.size) = b2.map.row(i);
        r2(i) = 1.0;
        fb.equal(r2, d(i));
    }
    add_admissibility(fb, b1);
    add_admissibility(fb, b2);
    for (Eigen::Index j = 0; j < fb.n; ++j)
        for (double s : {1.0, -1.0}) {
            auto r = fb.zero();
            r(j) = s;
            fb.le(r, R);
        }
    Vec obj = Vec::Zero(fb.n);
    obj.segment(b1.off, b1.size) = -b1.cost;
    obj.segment(b2.off, b2.size) = -b2.cost;
    Vec z;
    const double val = maximize_linear(fb.build(), obj, &z);
    if (!y || !std::isfinite(val)) return val;
    *y = z.head(n);

    // Among the optimal splits, report the one with the smallest |y|_inf.
    FormBuilder tie(fb.n + 1);
    auto widen = [&](const Eigen::RowVectorXd& r) {
        Eigen::RowVectorXd w = Eigen::RowVectorXd::Zero(fb.n + 1);
        w.head(fb.n) = r;
        return w;
    };
    for (std::size_t i = 0; i < fb.ub.size(); ++i) tie.le(widen(fb.ub[i]), fb.bub[i]);
    for (std::size_t i = 0; i < fb.eq.size(); ++i) tie.equal(widen(fb.eq[i]), fb.beq[i]);
    for (const auto& t : fb.soc) {
        SocTerm s{Mat::Zero(t.S.rows(), fb.n + 1), t.c, t.r, widen(t.h.transpose()).transpose()};
        s.S.leftCols(fb.n) = t.S;
        tie.soc.push_back(std::move(s));
    }
    tie.le(widen(-obj.transpose()), -val + 1e-9 * (1.0 + std::abs(val)));
    for (Eigen::Index i = 0; i < n; ++i)
        for (double s : {1.0, -1.0}) {
            auto r = tie.zero();
            r(i) = s;
            r(fb.n) = -1.0;
            tie.le(r, 0.0);
        }
    Vec z2;
    if (std::isfinite(maximize_linear(tie.build(), -Vec::Unit(fb.n + 1, fb.n), &z2)) && z2.size()) *y = z2.head(n);
    return val;
}

double op_norm(const Mat& S) {
    if (S.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Mat>(S).singularValues()(0);
}

// Largest rho such that a point of Fp carries a rho-ball inside Fb.  -inf when Fb has no interior.
double inscribed_radius(const ConicForm& Fp, const ConicForm& Fb, Vec* point) {
    const Eigen::Index n = Fp.n;
    if (Fb.Aeq.rows() > 0) return -kInf;
    FormBuilder fb(n + 1);
    for (Eigen::Index i = 0; i < Fp.A.rows(); ++i) {
        auto r = fb.zero();
        r.head(n) = Fp.A.row(i);
        fb.le(r, Fp.b(i));
    }
    for (Eigen::Index i = 0; i < Fp.Aeq.rows(); ++i) {
        auto r = fb.zero();
        r.head(n) = Fp.Aeq.row(i);
        fb.equal(r, Fp.beq(i));
    }
    for (const auto& t : Fp.soc) {
        SocTerm s{Mat::Zero(t.S.rows(), n + 1), t.c, t.r, Vec()};
        s.S.leftCols(n) = t.S;
        if (t.h.size()) {
            s.h = Vec::Zero(n + 1);
            s.h.head(n) = t.h;
        }
        fb.soc.push_back(std::move(s));
    }
    for (Eigen::Index i = 0; i < Fb.A.rows(); ++i) {
        auto r = fb.zero();
        r.head(n) = Fb.A.row(i);
        r(n) = Fb.A.row(i).norm();
        fb.le(r, Fb.b(i));
    }
    for (const auto& t : Fb.soc) {
        SocTerm s{Mat::Zero(t.S.rows(), n + 1), t.c, t.r, Vec::Zero(n + 1)};
        s.S.leftCols(n) = t.S;
        if (t.h.size()) s.h.head(n) = t.h;
        s.h(n) = -(op_norm(t.S) + (t.h.size() ? t.h.norm() : 0.0));
        fb.soc.push_back(std::move(s));
    }
    auto cap = fb.zero();
    cap(n) = 1.0;
    fb.le(cap, 1.0);
    Vec z;
    const double rho = maximize_linear(fb.build(), Vec::Unit(n + 1, n), &z);
    if (point && z.size()) *point = z.head(n);
    return rho;
}

// Maximizes sign * d_i over the polar cone {d : s1(d) + s2(-d) <= 0, |d|_inf <= 1}.
double polar_extreme(const ConicForm& F1, const ConicForm& F2, Eigen::Index i, double sign, Vec* d) {
    const Eigen::Index n = F1.n;
    const DualBlock b1 = dual_block(F1, n);
    const DualBlock b2 = dual_block(F2, n + b1.size);
    FormBuilder fb(n + b1.size + b2.size);
    for (Eigen::Index k = 0; k < n; ++k) {
        auto r1 = fb.zero();
        r1.segment(b1.off, b1.size) = b1.map.row(k);
        r1(k) = -1.0;
        fb.equal(r1, 0.0);
        auto r2 = fb.zero();
        r2.segment(b2.off, b2.size) = b2.map.row(k);
        r2(k) = 1.0;
        fb.equal(r2, 0.0);
        for (double s : {1.0, -1.0}) {
            auto r = fb.zero();
            r(k) = s;
            fb.le(r, 1.0);
        }
    }
    auto cost = fb.zero();
    cost.segment(b1.off, b1.size) = b1.cost.transpose();
    cost.segment(b2.off, b2.size) = b2.cost.transpose();
    fb.le(cost, 0.0);
    add_admissibility(fb, b1);
    add_admissibility(fb, b2);
    Vec z;
    const double val = maximize_linear(fb.build(), sign * Vec::Unit(fb.n, i), &z);
    if (d && z.size()) *d = z.head(n);
    return val;
}

double support_gap(const ConvexSetDesc& C1, const ConvexSetDesc& C2, const Vec& d) {
    return support_function(C1, d) + support_function(C2, -d);
}

// Rows of a polyhedral form, normalized, with the implicit equalities flagged.
struct FlaggedRows {
    Mat A;
    Vec b;
    std::vector<bool> strict;
};

FlaggedRows implicit_equalities(const ConicForm& F) {
    FlaggedRows out;
    const Eigen::Index m = F.A.rows(), n = F.n;
    out.A = F.A;
    out.b = F.b;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double s = out.A.row(i).norm();
        if (s > 0) {
            out.A.row(i) /= s;
            out.b(i) /= s;
        }
    }
    out.strict.assign(static_cast<std::size_t>(m), false);
    std::vector<Eigen::Index> remaining;
    for (Eigen::Index i = 0; i < m; ++i) remaining.push_back(i);
    while (!remaining.empty()) {
        const auto r = static_cast<Eigen::Index>(remaining.size());
        LinearProgram lp;
        lp.c = Vec::Zero(n + r);
        lp.c.tail(r).setConstant(-1.0);
        lp.A_ub = Mat::Zero(m + r, n + r);
        lp.b_ub = Vec(m + r);
        lp.A_ub.topLeftCorner(m, n) = out.A;
        lp.b_ub.head(m) = out.b;
        for (Eigen::Index k = 0; k < r; ++k) {
            lp.A_ub.block(m + k, 0, 1, n) = out.A.row(remaining[static_cast<std::size_t>(k)]);
            lp.A_ub(m + k, n + k) = 1.0;
            lp.b_ub(m + k) = out.b(remaining[static_cast<std::size_t>(k)]);
        }
        lp.A_eq = Mat::Zero(F.Aeq.rows(), n + r);
        lp.A_eq.leftCols(n) = F.Aeq;
        lp.b_eq = F.beq;
        lp.lower = Vec::Zero(n + r);
        lp.lower.head(n).setConstant(-kInf);
        lp.upper = Vec::Ones(n + r);
        lp.upper.head(n).setConstant(kInf);
        const auto res = solve_lp(lp);
        if (res.status != LpStatus::Optimal) break;
        std::vector<Eigen::Index> left;
        for (Eigen::Index k = 0; k < r; ++k) {
            const Eigen::Index row = remaining[static_cast<std::size_t>(k)];
            if (res.x(n + k) > 1e-9) out.strict[static_cast<std::size_t>(row)] = true;
            else left.push_back(row);
        }
        if (left.size() == remaining.size()) break;
        remaining = std::move(left);
    }
    return out;
}

// Largest common slack of the non-implicit rows over C1 ∩ C2; positive iff ri C1 ∩ ri C2 is nonempty.
double relative_interior_margin(const ConicForm& F1, const ConicForm& F2, Vec* point) {
    const Eigen::Index n = F1.n;
    const FlaggedRows r1 = implicit_equalities(F1), r2 = implicit_equalities(F2);
    LinearProgram lp;
    lp.c = -Vec::Unit(n + 1, n);
    const Eigen::Index m1 = r1.A.rows(), m2 = r2.A.rows();
    lp.A_ub = Mat::Zero(m1 + m2, n + 1);
    lp.b_ub = Vec(m1 + m2);
    for (Eigen::Index i = 0; i < m1; ++i) {
        lp.A_ub.block(i, 0, 1, n) = r1.A.row(i);
        lp.A_ub(i, n) = r1.strict[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
        lp.b_ub(i) = r1.b(i);
    }
    for (Eigen::Index i = 0; i < m2; ++i) {
        lp.A_ub.block(m1 + i, 0, 1, n) = r2.A.row(i);
        lp.A_ub(m1 + i, n) = r2.strict[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
        lp.b_ub(m1 + i) = r2.b(i);
    }
    lp.A_eq = Mat::Zero(F1.Aeq.rows() + F2.Aeq.rows(), n + 1);
    lp.b_eq = Vec(lp.A_eq.rows());
    if (F1.Aeq.rows()) lp.A_eq.topLeftCorner(F1.Aeq.rows(), n) = F1.Aeq;
    if (F2.Aeq.rows()) lp.A_eq.bottomLeftCorner(F2.Aeq.rows(), n) = F2.Aeq;
    lp.b_eq << F1.beq, F2.beq;
    lp.lower = Vec::Constant(n + 1, -kInf);
    lp.lower(n) = 0.0;
    lp.upper = Vec::Constant(n + 1, kInf);
    lp.upper(n) = 1.0;
    const auto res = solve_lp(lp);
    if (res.status != LpStatus::Optimal) return -kInf;
    if (point) *point = res.x.head(n);
    return res.x(n);
}

CqItem item(CqStatus s, std::string note, double margin = 0.0, Vec witness = Vec()) {
    CqItem it;
    it.status = s;
    it.note = std::move(note);
    it.margin = margin;
    it.witness = std::move(witness);
    return it;
}

} // namespace

DualityReport duality_check(const ConvexSetDesc& C1, const ConvexSetDesc& C2, const Vec& x, const Vec& v,
                            const WeightedMetric& metric, const DualityOptions& opts) {
    const Eigen::Index n = x.size();
    if (C1.dim() != n || C2.dim() != n || v.size() != n || metric.dim() != n)
        throw PreconditionError("duality_check: dimension mismatch");
    if (!contains(C1, x, 1e-7) || !contains(C2, x, 1e-7))
        throw PreconditionError("duality_check: x is not in both sets");
    if (!in_normal_cone(intersect({C1, C2}), x, v, metric, 1e-7))
        throw PreconditionError("duality_check: v is not normal to the intersection at x");

    const Vec d = metric.matrix() * v;
    const ConicForm F1 = conic_form(C1), F2 = conic_form(C2);
    DualityReport rep;
    // v is normal at x, so the support function of the intersection is attained there.
    rep.p_star = -d.dot(x);
    Vec y_small;
    const double val_small = capped_dual(F1, F2, d, opts.cap_small, &y_small);
    const double val_large = capped_dual(F1, F2, d, opts.cap_large, nullptr);
    // The capped value only improves with the cap; a drop beyond R1 means the infimum escapes.
    rep.attained = std::isfinite(val_small) && val_large - val_small <= opts.tol * (1.0 + std::abs(val_large));
    // The small cap is the better conditioned LP, so it supplies the value whenever it suffices.
    rep.d_star = rep.attained ? val_small : val_large;
    rep.gap = rep.p_star - rep.d_star;
    if (rep.attained) rep.y_star = Vec(metric.inverse() * y_small);
    const bool closed = rep.gap <= opts.tol * (1.0 + std::abs(rep.p_star));
    rep.verdict = closed && rep.attained ? DualityVerdict::StrongDuality : DualityVerdict::GapOrNonAttainment;
    return rep;
}

AdditivityResult additivity_check(const ConvexSetDesc& C1, const ConvexSetDesc& C2, const Vec& x, const Vec& v,
                                  const WeightedMetric& metric, double tol) {
    const Eigen::Index n = x.size();
    const NormalConeDesc N1 = normal_cone(C1, x, metric), N2 = normal_cone(C2, x, metric);
    AdditivityResult out;
    out.n1 = Vec::Zero(n);
    out.n2 = Vec::Zero(n);

    // Minimizes the l1 residual of v - (n1 + n2); use_second = false pins n2 = 0.
    auto split = [&](bool use_second) {
        const Eigen::Index k1 = N1.generators.cols(), l1 = N1.lineality.cols();
        const Eigen::Index k2 = use_second ? N2.generators.cols() : 0, l2 = use_second ? N2.lineality.cols() : 0;
        const Eigen::Index nv = k1 + l1 + k2 + l2 + 2 * n;
        LinearProgram lp;
        lp.c = Vec::Zero(nv);
        lp.c.tail(2 * n).setOnes();
        lp.A_eq = Mat::Zero(n, nv);
        Eigen::Index c = 0;
        if (k1) lp.A_eq.middleCols(c, k1) = N1.generators;
        c += k1;
        if (l1) lp.A_eq.middleCols(c, l1) = N1.lineality;
        c += l1;
        if (k2) lp.A_eq.middleCols(c, k2) = N2.generators;
        c += k2;
        if (l2) lp.A_eq.middleCols(c, l2) = N2.lineality;
        c += l2;
        lp.A_eq.middleCols(c, n) = Mat::Identity(n, n);
        lp.A_eq.rightCols(n) = -Mat::Identity(n, n);
        lp.b_eq = v;
        lp.lower = Vec::Zero(nv);
        lp.lower.segment(k1, l1).setConstant(-kInf);
        lp.lower.segment(k1 + l1 + k2, l2).setConstant(-kInf);
        lp.upper = Vec::Constant(nv, kInf);
        const auto res = solve_lp(lp);
        if (res.status != LpStatus::Optimal) return false;
        out.residual = res.objective;
        if (res.objective > tol * (1.0 + v.norm())) return false;
        out.n1 = (k1 ? Vec(N1.generators * res.x.segment(0, k1)) : Vec::Zero(n)) +
                 (l1 ? Vec(N1.lineality * res.x.segment(k1, l1)) : Vec::Zero(n));
        out.n2 = v - out.n1;
        return true;
    };
    out.holds = split(false) || split(true);
    if (!out.holds) {
        out.n1.setZero();
        out.n2.setZero();
    }
    return out;
}

CQVerdict cq_test(const ConvexSetDesc& C1, const ConvexSetDesc& C2, const CqOptions& opts) {
    const Eigen::Index n = C1.dim();
    if (C2.dim() != n) throw PreconditionError("cq_test: dimension mismatch");
    CQVerdict out;
    if (is_empty(intersect({C1, C2}))) {
        const CqItem f = item(CqStatus::Fails, "empty intersection");
        out.slater1 = out.slater2 = out.rockafellar = out.attouch_brezis = f;
        return out;
    }
    const ConicForm F1 = conic_form(C1), F2 = conic_form(C2);

    Vec p1, p2;
    const double r12 = inscribed_radius(F1, F2, &p1);  // point of C1 inside int C2
    const double r21 = inscribed_radius(F2, F1, &p2);  // point of C2 inside int C1
    const double rho = std::max(r12, r21);
    if (rho > opts.tol) {
        const Vec& w = r12 >= r21 ? p1 : p2;
        out.slater1 = item(CqStatus::Holds, r12 >= r21 ? "C1 meets int C2" : "C2 meets int C1", rho, w);
        // A rho-ball around a common point lies in C1 - C2.
        out.slater2 = item(CqStatus::Holds, "implied by Slater I", rho);
        out.rockafellar = item(CqStatus::Holds, "implied by Slater I");
        out.attouch_brezis = item(CqStatus::Holds, "implied by Slater I");
        return out;
    }
    out.slater1 = item(CqStatus::Fails, "no common point with an inscribed ball", std::max(rho, 0.0));

    // Nonzero directions of the polar cone of cone(C1 - C2).
    std::vector<Vec> polar;
    for (Eigen::Index i = 0; i < n; ++i)
        for (double s : {1.0, -1.0}) {
            Vec d;
            const double val = polar_extreme(F1, F2, i, s, &d);
            if (val > opts.tol && d.size()) polar.push_back(d / d.norm());
        }

    if (!polar.empty()) {
        out.rockafellar = item(CqStatus::Fails, "cone(C1 - C2) has a nonzero polar direction", 0.0, polar.front());
        out.slater2 = item(CqStatus::Fails, "0 is not interior to C1 - C2", 0.0, polar.front());
    } else {
        out.rockafellar = item(CqStatus::Holds, "polar cone is trivial");
        std::mt19937 rng(opts.seed);
        std::normal_distribution<double> gauss;
        std::vector<Vec> dirs;
        for (int k = 0; k < opts.directions_per_dim * static_cast<int>(n); ++k) {
            Vec d(n);
            for (Eigen::Index i = 0; i < n; ++i) d(i) = gauss(rng);
            if (d.norm() > 0) dirs.push_back(d / d.norm());
        }
        for (const ConicForm* F : {&F1, &F2}) {
            for (Eigen::Index i = 0; i < F->A.rows(); ++i)
                if (F->A.row(i).norm() > 0) dirs.push_back(F->A.row(i).transpose() / F->A.row(i).norm());
            for (Eigen::Index i = 0; i < F->Aeq.rows(); ++i)
                if (F->Aeq.row(i).norm() > 0) {
                    const Vec a = F->Aeq.row(i).transpose() / F->Aeq.row(i).norm();
                    dirs.push_back(a);
                    dirs.push_back(-a);
                }
        }
        double best = kInf;
        Vec arg;
        for (const auto& d : dirs) {
            const double g = support_gap(C1, C2, d);
            if (g < best) {
                best = g;
                arg = d;
            }
        }
        if (best > opts.tol)
            out.slater2 = item(CqStatus::Holds, "sampled support gap is positive", best, arg);
        else
            out.slater2 = item(CqStatus::Undecided, "trivial polar cone but vanishing sampled gap", best, arg);
    }

    if (F1.polyhedral() && F2.polyhedral()) {
        Vec p;
        const double m = relative_interior_margin(F1, F2, &p);
        if (m > opts.tol)
            out.attouch_brezis = item(CqStatus::Holds, "relative interiors intersect", m, p);
        else
            out.attouch_brezis = item(CqStatus::Fails, "relative interiors are disjoint", std::max(m, 0.0));
    } else if (out.rockafellar.status == CqStatus::Holds) {
        out.attouch_brezis = item(CqStatus::Holds, "implied by Rockafellar");
    } else {
        out.attouch_brezis = item(CqStatus::Undecided, "closedness of cone(C1 - C2) not decidable for round sets");
        for (const auto& d : polar)
            if (support_gap(C1, C2, -d) > opts.tol) {
                out.attouch_brezis = item(CqStatus::Fails, "polar cone is not a subspace", 0.0, d);
                break;
            }
    }
    return out;
}

GrowthResult hardening_growth_check(const PlCurve& xi_minus, const PlCurve& xi_plus, double psi, double c) {
    xi_minus.validate(false, "xi-");
    xi_plus.validate(true, "xi+");
    GrowthResult out;
    auto fail = [&](const char* which, std::size_t node, double s, double v) {
        std::ostringstream os;
        os << which << " node " << node << ": |xi(" << s << ")| = " << std::abs(v) << " exceeds " << psi + c * std::abs(s);
        out.ok = false;
        out.violation = os.str();
    };
    for (const auto& [curve, name] : {std::pair{&xi_minus, "xi-"}, std::pair{&xi_plus, "xi+"}}) {
        for (std::size_t k = 0; k < curve->x.size(); ++k) {
            const double s = curve->x[k], v = curve->y[k];
            if (std::abs(v) > psi + c * std::abs(s) + 1e-12 * (1.0 + std::abs(v))) {
                fail(name, k, s, v);
                return out;
            }
        }
        for (std::size_t seg : {std::size_t{0}, curve->segments() - 1}) {
            const double sl = std::abs(curve->slope(seg));
            if (sl > c * (1.0 + 1e-12)) {
                std::ostringstream os;
                os << name << " end slope " << sl << " exceeds " << c;
                out.ok = false;
                out.violation = os.str();
                return out;
            }
        }
    }
    return out;
}

} // namespace sweepplast
