#include "sweepplast/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include "sweepplast/errors.hpp"
#include "sweepplast/qp.hpp"

namespace sweepplast {

ConvexSetDesc MovingSetSpec::at(double t) const {
    return intersect({translate(yield_set, -sigma_tilde(t)), make_subspace(basis_V)});
}

std::vector<double> uniform_grid(double t0, double t1, double dt) {
    if (!(dt > 0.0) || !(t1 >= t0)) throw PreconditionError("uniform_grid: need dt > 0 and t1 >= t0");
    const auto n = static_cast<long>(std::ceil((t1 - t0) / dt - 1e-9));
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(n + 1));
    for (long i = 0; i <= n; ++i) g.push_back(std::min(t1, t0 + static_cast<double>(i) * dt));
    g.back() = t1;
    return g;
}

const char* to_string(SafeLoadStatus s) {
    switch (s) {
        case SafeLoadStatus::StrictOk: return "StrictOk";
        case SafeLoadStatus::DegenerateOk: return "DegenerateOk";
        case SafeLoadStatus::Violated: return "Violated";
    }
    return "?";
}

YieldRows yield_rows(const ConvexSetDesc& sigma) {
    if (const auto* box = std::get_if<Box>(&sigma.v)) {
        // Row 2j bounds element j from below, row 2j+1 from above.
        const Eigen::Index m = box->lower.size();
        YieldRows r{Mat::Zero(2 * m, m), Vec(2 * m)};
        for (Eigen::Index j = 0; j < m; ++j) {
            r.A(2 * j, j) = -1.0;
            r.b(2 * j) = -box->lower(j);
            r.A(2 * j + 1, j) = 1.0;
            r.b(2 * j + 1) = box->upper(j);
        }
        return r;
    }
    const ConicForm f = conic_form(sigma);
    if (!f.polyhedral()) throw Unsupported("yield rows: set has round parts");
    YieldRows r{Mat(f.A.rows() + 2 * f.Aeq.rows(), f.n), Vec(f.A.rows() + 2 * f.Aeq.rows())};
    r.A << f.A, f.Aeq, -f.Aeq;
    r.b << f.b, f.beq, -f.beq;
    return r;
}

std::string hex_mask(const std::vector<bool>& bits) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    for (std::size_t i = 0; i < bits.size(); i += 4) {
        int v = 0;
        for (std::size_t j = 0; j < 4 && i + j < bits.size(); ++j)
            if (bits[i + j]) v |= 1 << j;
        s.push_back(digits[v]);
    }
    return s;
}

namespace {

struct StepResult {
    Vec z;
    std::string mask;
    double residual = 0.0;
};

// Catch-up machinery in the V-coordinates z, y = B z.
class Chart {
public:
    Chart(const MovingSetSpec& spec, const SweepOptions& opts) : spec_(spec), opts_(opts) {
        B_ = spec.basis_V;
        W_ = B_.transpose() * spec.metric.matrix() * B_;
        polyhedral_ = is_polyhedral(spec.yield_set);
        if (polyhedral_) {
            rows_ = yield_rows(spec.yield_set);
            AB_ = rows_.A * B_;
            row_norm_ = rows_.A.rowwise().norm();
        }
    }

    Eigen::Index dim() const { return B_.cols(); }
    bool polyhedral() const { return polyhedral_; }
    const Mat& B() const { return B_; }

    Vec to_z(const Vec& y) const {
        if (dim() == 0) return Vec(0);
        return W_.ldlt().solve(B_.transpose() * (spec_.metric.matrix() * y));
    }

    Vec rhs(double t) const { return rows_.b - rows_.A * spec_.sigma_tilde(t); }

    double violation(const Vec& z, double t) const {
        if (!polyhedral_) return contains(spec_.at(t), B_ * z, 1e-10) ? 0.0 : 1.0;
        const Vec r = rhs(t);
        const Vec s = (dim() ? Vec(AB_ * z) : Vec(Vec::Zero(r.size()))) - r;
        double worst = -kInf;
        for (Eigen::Index i = 0; i < s.size(); ++i) worst = std::max(worst, s(i) / std::max(1.0, std::abs(r(i))));
        return s.size() ? worst : 0.0;
    }

    StepResult step(const Vec& z_prev, double t) const {
        if (!polyhedral_) return step_general(z_prev, t);
        const Vec r = rhs(t);
        StepResult out;
        if (dim() == 0) {
            if (r.size() && r.minCoeff() < -1e-12 * std::max(1.0, r.cwiseAbs().maxCoeff()))
                throw SafeLoadViolation("moving set is empty", t);
            out.z = Vec(0);
        } else if (dim() == 1) {
            double lo = -kInf, hi = kInf;
            for (Eigen::Index i = 0; i < r.size(); ++i) {
                const double a = AB_(i, 0);
                if (std::abs(a) <= 1e-14 * row_norm_(i)) {
                    if (r(i) < -1e-12 * std::max(1.0, std::abs(r(i)))) throw SafeLoadViolation("moving set is empty", t);
                } else if (a > 0.0) {
                    hi = std::min(hi, r(i) / a);
                } else {
                    lo = std::max(lo, r(i) / a);
                }
            }
            const double scale = std::max({1.0, std::abs(lo) < kInf ? std::abs(lo) : 0.0, std::abs(hi) < kInf ? std::abs(hi) : 0.0});
            if (lo > hi + 1e-12 * scale) throw SafeLoadViolation("moving set is empty", t);
            if (lo > hi) lo = hi = 0.5 * (lo + hi);
            out.z = Vec::Constant(1, std::clamp(z_prev(0), lo, hi));
        } else {
            try {
                auto qp = solve_qp(W_, W_ * z_prev, AB_, r);
                out.z = qp.z;
                const Vec g = W_ * (z_prev - qp.z);
                out.residual = (g - AB_.transpose() * qp.multipliers).norm() / std::max(1.0, g.norm());
            } catch (const EmptySet&) {
                throw SafeLoadViolation("moving set is empty", t);
            }
        }
        out.mask = mask(out.z, r);
        return out;
    }

    std::string mask(const Vec& z, const Vec& r) const {
        std::vector<bool> bits(static_cast<std::size_t>(r.size()));
        const Vec s = dim() ? Vec(AB_ * z) : Vec(Vec::Zero(r.size()));
        for (Eigen::Index i = 0; i < r.size(); ++i)
            bits[static_cast<std::size_t>(i)] = s(i) - r(i) >= -opts_.active_tol * std::max(1.0, std::abs(r(i)));
        return hex_mask(bits);
    }

private:
    StepResult step_general(const Vec& z_prev, double t) const {
        StepResult out;
        try {
            out.z = to_z(project(spec_.at(t), B_ * z_prev, spec_.metric));
        } catch (const EmptySet&) {
            throw SafeLoadViolation("moving set is empty", t);
        }
        return out;
    }

    const MovingSetSpec& spec_;
    SweepOptions opts_;
    Mat B_, W_, AB_;
    YieldRows rows_;
    Vec row_norm_;
    bool polyhedral_ = false;
};

void push_state(SweepTrajectory& tr, const MovingSetSpec& spec, const Chart& ch, double t, const Vec& z,
                const StepResult& st) {
    const Vec y = ch.dim() ? Vec(ch.B() * z) : Vec(Vec::Zero(ch.B().rows()));
    const Vec st_tilde = spec.sigma_tilde(t);
    tr.step_norm.push_back(tr.y.empty() ? 0.0 : spec.metric.norm(y - tr.y.back()));
    tr.times.push_back(t);
    tr.y.push_back(y);
    tr.sigma_tilde.push_back(st_tilde);
    tr.sigma.push_back(y + st_tilde);
    tr.active.push_back(st.mask);
    tr.certificate_residual.push_back(st.residual);
}

void advance(SweepTrajectory& tr, const MovingSetSpec& spec, const Chart& ch, const SweepOptions& opts, double ta,
             Vec& z, std::string& mask, double tb, int depth) {
    StepResult st = ch.step(z, tb);
    if (st.mask != mask && depth < opts.refine_depth) {
        const double tm = 0.5 * (ta + tb);
        advance(tr, spec, ch, opts, ta, z, mask, tm, depth + 1);
        advance(tr, spec, ch, opts, tm, z, mask, tb, depth + 1);
        return;
    }
    z = st.z;
    mask = st.mask;
    push_state(tr, spec, ch, tb, z, st);
}

} // namespace

SweepTrajectory catch_up(const MovingSetSpec& spec, const Vec& y0, const std::vector<double>& grid,
                         const SweepOptions& opts) {
    if (grid.empty()) throw PreconditionError("catch_up: empty time grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw PreconditionError("catch_up: grid must be strictly increasing");
    Chart ch(spec, opts);
    const Eigen::Index m = spec.basis_V.rows();
    if (y0.size() != m) throw PreconditionError("catch_up: y0 has the wrong size");
    Vec z = ch.to_z(y0);
    if ((ch.B() * z - y0).norm() > 1e-9 * std::max(1.0, y0.norm()) || ch.violation(z, grid[0]) > 1e-9) {
        ch.step(z, grid[0]);  // an empty C(t0) is a load problem, not a bad y0
        throw InitialConditionError("initial state is not in C(t0)");
    }

    SweepTrajectory tr;
    StepResult st0;
    st0.z = z;
    st0.mask = ch.polyhedral() ? ch.mask(z, ch.rhs(grid[0])) : std::string();
    push_state(tr, spec, ch, grid[0], z, st0);
    std::string mask = st0.mask;
    for (std::size_t k = 1; k < grid.size(); ++k) advance(tr, spec, ch, opts, grid[k - 1], z, mask, grid[k], 0);

    // Yield onset: bracket the first motion, then bisect on "previous state leaves C(t)".
    double scale = 1.0;
    for (const auto& y : tr.y) scale = std::max(scale, spec.metric.norm(y));
    for (std::size_t k = 1; k < tr.size(); ++k) {
        if (tr.step_norm[k] <= opts.motion_tol * scale) continue;
        const Vec zp = ch.to_z(tr.y[k - 1]);
        double lo = tr.times[k - 1], hi = tr.times[k];
        while (hi - lo > opts.onset_tol) {
            const double mid = 0.5 * (lo + hi);
            (ch.violation(zp, mid) > 1e-13 ? hi : lo) = mid;
        }
        tr.yield_onset = 0.5 * (lo + hi);
        break;
    }
    return tr;
}

double lipschitz_estimate(const MovingSetSpec& spec, const std::vector<double>& grid) {
    if (!is_polyhedral(spec.yield_set)) throw Unsupported("lipschitz_estimate: polyhedral yield sets only");
    const YieldRows rows = yield_rows(spec.yield_set);
    const Mat AB = rows.A * spec.basis_V;
    auto at = [&](double t) {
        return ReducedPolytope{Vec::Zero(spec.basis_V.rows()), spec.basis_V, AB, rows.b - rows.A * spec.sigma_tilde(t)};
    };
    double L = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        L = std::max(L, hausdorff_distance(at(grid[i - 1]), at(grid[i]), spec.metric) / (grid[i] - grid[i - 1]));
    return L;
}

SafeLoadResult safe_load_check(const MovingSetSpec& spec, double t, double tol) {
    if (!is_polyhedral(spec.yield_set)) throw Unsupported("safe_load_check: polyhedral yield sets only");
    const YieldRows rows = yield_rows(spec.yield_set);
    const Eigen::Index d = spec.basis_V.cols();
    const Mat AB = rows.A * spec.basis_V;
    const Vec rhs = rows.b - rows.A * spec.sigma_tilde(t);

    LinearProgram lp;
    lp.c = Vec::Zero(d + 1);
    lp.c(d) = -1.0;
    lp.A_ub.resize(rows.A.rows(), d + 1);
    lp.A_ub << AB, rows.A.rowwise().norm();
    lp.b_ub = rhs;
    lp.lower = Vec::Constant(d + 1, -kInf);
    lp.upper = Vec::Constant(d + 1, kInf);
    auto res = solve_lp(lp);
    SafeLoadResult out;
    out.note = spec.margin_note;
    if (res.status == LpStatus::Unbounded) {
        out.status = SafeLoadStatus::StrictOk;
        out.margin = kInf;
        out.witness = Vec::Zero(spec.basis_V.rows());
        return out;
    }
    if (res.status != LpStatus::Optimal) throw InternalError("safe_load_check: margin LP failed");
    out.margin = res.x(d);
    out.witness = spec.basis_V * res.x.head(d);
    const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
    if (out.margin > tol * scale)
        out.status = SafeLoadStatus::StrictOk;
    else if (out.margin >= -tol * scale)
        out.status = SafeLoadStatus::DegenerateOk;
    else
        out.status = SafeLoadStatus::Violated;
    return out;
}

void write_csv(std::ostream& os, const SweepTrajectory& tr) {
    if (tr.size() == 0) return;
    const Eigen::Index m = tr.y[0].size();
    const Eigen::Index nx = tr.xi.empty() ? 0 : tr.xi[0].size();
    os << "t";
    for (Eigen::Index j = 0; j < m; ++j) os << ",y" << j;
    for (Eigen::Index j = 0; j < m; ++j) os << ",sigma" << j;
    for (Eigen::Index j = 0; j < nx; ++j) os << ",xi" << j;
    os << ",step_norm,active\n";
    os << std::setprecision(17);
    for (std::size_t k = 0; k < tr.size(); ++k) {
        os << tr.times[k];
        for (Eigen::Index j = 0; j < m; ++j) os << ',' << tr.y[k](j);
        for (Eigen::Index j = 0; j < m; ++j) os << ',' << tr.sigma[k](j);
        for (Eigen::Index j = 0; j < nx; ++j) os << ',' << tr.xi[k](j);
        os << ',' << tr.step_norm[k] << ',' << tr.active[k] << '\n';
    }
}

} // namespace sweepplast
