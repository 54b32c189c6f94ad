#include "sweepplast/hardening.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "sweepplast/errors.hpp"
#include "sweepplast/qp.hpp"

namespace sweepplast {

double PlCurve::operator()(double s) const {
    std::size_t i = 0;
    if (s >= x.back())
        i = x.size() - 2;
    else if (s > x.front())
        i = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), s) - x.begin()) - 1;
    return y[i] + slope(i) * (s - x[i]);
}

double PlCurve::slope(std::size_t i) const { return (y[i + 1] - y[i]) / (x[i + 1] - x[i]); }

void PlCurve::validate(bool increasing, const char* what) const {
    const std::string w(what);
    if (x.size() < 2 || x.size() != y.size()) throw MalformedCurve(w + ": need at least two samples");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw MalformedCurve(w + ": non-finite sample");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw MalformedCurve(w + ": abscissae must increase");
    double prev = -kInf;
    for (std::size_t i = 0; i < segments(); ++i) {
        const double s = slope(i);
        if (increasing ? !(s > 0.0) : !(s < 0.0)) throw MalformedCurve(w + ": curve is not strictly monotone");
        if (s < prev - 1e-12 * std::max(1.0, std::abs(prev))) throw MalformedCurve(w + ": curve is not convex");
        prev = s;
    }
}

namespace {

Vec broadcast(const Vec& v, Eigen::Index m, const char* what) {
    if (v.size() == m) return v;
    if (v.size() == 1) return Vec::Constant(m, v(0));
    throw InvalidModel(std::string(what) + ": expected one value or one per element");
}

std::vector<PlCurve> broadcast(const std::vector<PlCurve>& c, Eigen::Index m, const char* what) {
    if (static_cast<Eigen::Index>(c.size()) == m) return c;
    if (c.size() == 1) return std::vector<PlCurve>(static_cast<std::size_t>(m), c[0]);
    throw InvalidModel(std::string(what) + ": expected one curve or one per element");
}

} // namespace

HardeningSpec HardeningSpec::resolved(Eigen::Index m, const Vec& sigma_minus, const Vec& sigma_plus) const {
    HardeningSpec r = *this;
    if (kind == HardeningKind::LinearKinematic) {
        r.H = broadcast(H, m, "hardening modulus");
        r.offset_minus = offset_minus.size() ? broadcast(offset_minus, m, "offset") : sigma_minus;
        r.offset_plus = offset_plus.size() ? broadcast(offset_plus, m, "offset") : sigma_plus;
        if (r.offset_minus.size() != m || r.offset_plus.size() != m) throw InvalidModel("hardening: missing offsets");
        if ((r.offset_minus.array() >= r.offset_plus.array()).any()) throw InvalidModel("hardening: offsets out of order");
        if (!(r.H.array() > 0.0).all()) throw InvalidModel("hardening modulus must be positive");
        if (eta > 0.0 && (r.H.array() < eta).any()) throw InvalidModel("hardening modulus below its lower bound");
        if (eta <= 0.0) r.eta = r.H.minCoeff();
    } else {
        r.xi_minus = broadcast(xi_minus, m, "xi- curves");
        r.xi_plus = broadcast(xi_plus, m, "xi+ curves");
        for (const auto& c : r.xi_minus) c.validate(false, "xi- curve");
        for (const auto& c : r.xi_plus) c.validate(true, "xi+ curve");
    }
    return r;
}

std::vector<ElementRow> hardening_rows(const HardeningSpec& s, Eigen::Index m) {
    std::vector<ElementRow> rows;
    for (Eigen::Index j = 0; j < m; ++j) {
        if (s.kind == HardeningKind::LinearKinematic) {
            rows.push_back({j, 1.0, -s.H(j), s.offset_plus(j)});
            rows.push_back({j, -1.0, s.H(j), -s.offset_minus(j)});
        } else {
            // Epigraph of a convex piecewise-linear curve: one row per segment line.
            for (const auto* c : {&s.xi_plus[static_cast<std::size_t>(j)], &s.xi_minus[static_cast<std::size_t>(j)]})
                for (std::size_t i = 0; i < c->segments(); ++i) {
                    const double k = c->slope(i);
                    rows.push_back({j, k, -1.0, k * c->x[i] - c->y[i]});
                }
        }
    }
    return rows;
}

ConvexSetDesc hardened_yield_set(const HardeningSpec& s, Eigen::Index m) {
    const auto rows = hardening_rows(s, m);
    Mat A = Mat::Zero(static_cast<Eigen::Index>(rows.size()), 2 * m);
    Vec b(A.rows());
    for (Eigen::Index r = 0; r < A.rows(); ++r) {
        const auto& e = rows[static_cast<std::size_t>(r)];
        A(r, e.element) = e.a_sigma;
        A(r, m + e.element) = e.a_xi;
        b(r) = e.b;
    }
    return make_polyhedron(A, b);
}

ConvexSetDesc hardened_moving_set(const HardeningSpec& s, const Vec& sigma_tilde, const Mat& basis_V) {
    const Eigen::Index m = sigma_tilde.size();
    Vec shift = Vec::Zero(2 * m);
    shift.head(m) = -sigma_tilde;
    return intersect({translate(hardened_yield_set(s, m), shift),
                      product({make_subspace(basis_V), make_subspace(Mat::Identity(m, m))})});
}

namespace {

struct HardState {
    Vec z, xi;
    std::string mask;
};

class HardChart {
public:
    explicit HardChart(const HardenedModel& model) : model_(model) {
        B_ = model.basis_V;
        m_ = B_.rows();
        rows_ = hardening_rows(model.spec, m_);
        W_ = B_.transpose() * model.metric.matrix() * B_;
        if (model.xi_weights.size() != m_) throw PreconditionError("hardened model: xi weights have the wrong size");
    }

    Eigen::Index dim() const { return B_.cols(); }
    const Mat& B() const { return B_; }

    Vec to_z(const Vec& y) const {
        if (dim() == 0) return Vec(0);
        return W_.ldlt().solve(B_.transpose() * (model_.metric.matrix() * y));
    }

    // Row slacks a_sigma sigma + a_xi xi - b, relative.
    double violation(const Vec& z, const Vec& xi, double t) const {
        const Vec sig = stress(z, t);
        double worst = -kInf;
        for (const auto& r : rows_) {
            const double s = r.a_sigma * sig(r.element) + r.a_xi * xi(r.element) - r.b;
            worst = std::max(worst, s / std::max(1.0, std::abs(r.b)));
        }
        return worst;
    }

    std::string mask(const Vec& z, const Vec& xi, double t, double tol) const {
        const Vec sig = stress(z, t);
        std::vector<bool> bits;
        bits.reserve(rows_.size());
        for (const auto& r : rows_)
            bits.push_back(r.a_sigma * sig(r.element) + r.a_xi * xi(r.element) - r.b >= -tol * std::max(1.0, std::abs(r.b)));
        return hex_mask(bits);
    }

    HardState step(const Vec& z0, const Vec& xi0, double t, double tol) const {
        HardState out = dim() == 1 ? step_line(z0, xi0, t) : step_qp(z0, xi0, t);
        out.mask = mask(out.z, out.xi, t, tol);
        return out;
    }

    double norm(const Vec& dz, const Vec& dxi) const {
        const double a = dz.size() ? dz.dot(W_ * dz) : 0.0;
        return std::sqrt(std::max(0.0, a + dxi.cwiseProduct(model_.xi_weights).dot(dxi)));
    }

    Vec stress(const Vec& z, double t) const {
        return (dim() ? Vec(B_ * z) : Vec(Vec::Zero(m_))) + model_.sigma_tilde(t);
    }

private:
    // dim V = 1: for fixed c every xi_j is clamped independently, and the reduced objective
    // phi(c) is convex, so the minimizer is found by bisection on its derivative.
    HardState step_line(const Vec& z0, const Vec& xi0, double t) const {
        const Vec st = model_.sigma_tilde(t);
        const double c0 = z0(0), W = W_(0, 0);
        struct Line {
            double alpha, gamma;  // xi bound alpha + gamma c
        };
        std::vector<std::vector<Line>> lower(static_cast<std::size_t>(m_)), upper(static_cast<std::size_t>(m_));
        double cmin = -kInf, cmax = kInf;
        for (const auto& r : rows_) {
            const double beta = B_(r.element, 0);
            const double rhs = r.b - r.a_sigma * st(r.element);
            if (r.a_xi == 0.0) {
                const double a = r.a_sigma * beta;
                if (a > 0) cmax = std::min(cmax, rhs / a);
                else if (a < 0) cmin = std::max(cmin, rhs / a);
                else if (rhs < -1e-12) throw SafeLoadViolation("hardened moving set is empty", t);
                continue;
            }
            const Line ln{rhs / r.a_xi, -r.a_sigma * beta / r.a_xi};
            (r.a_xi < 0 ? lower : upper)[static_cast<std::size_t>(r.element)].push_back(ln);
        }
        if (cmin > cmax) throw SafeLoadViolation("hardened moving set is empty", t);

        auto clamp_xi = [&](std::size_t j, double c, double* deriv) {
            double lo = -kInf, slo = 0.0, hi = kInf, shi = 0.0;
            for (const auto& l : lower[j])
                if (const double v = l.alpha + l.gamma * c; v > lo) lo = v, slo = l.gamma;
            for (const auto& l : upper[j])
                if (const double v = l.alpha + l.gamma * c; v < hi) hi = v, shi = l.gamma;
            if (lo > hi + 1e-12 * std::max(1.0, std::abs(lo))) throw SafeLoadViolation("hardened moving set is empty", t);
            const double x0 = xi0(static_cast<Eigen::Index>(j));
            if (x0 < lo) {
                if (deriv) *deriv = slo;
                return lo;
            }
            if (x0 > hi) {
                if (deriv) *deriv = shi;
                return hi;
            }
            if (deriv) *deriv = 0.0;
            return x0;
        };
        auto dphi = [&](double c) {
            double g = W * (c - c0);
            for (std::size_t j = 0; j < static_cast<std::size_t>(m_); ++j) {
                double dp = 0.0;
                const double p = clamp_xi(j, c, &dp);
                g += model_.xi_weights(static_cast<Eigen::Index>(j)) * (p - xi0(static_cast<Eigen::Index>(j))) * dp;
            }
            return g;
        };

        double c = std::clamp(c0, cmin, cmax);
        const double g0 = dphi(c);
        if (g0 != 0.0) {
            const double dir = g0 > 0 ? -1.0 : 1.0;
            const double bound = dir > 0 ? cmax : cmin;
            double a = c, b = c, step = 1e-6 * std::max(1.0, std::abs(c));
            bool bracketed = false;
            for (int it = 0; it < 200; ++it) {
                b = c + dir * step;
                if ((dir > 0 && b >= bound) || (dir < 0 && b <= bound)) b = bound;
                if (dir * dphi(b) >= 0.0) {
                    bracketed = true;
                    break;
                }
                if (b == bound) break;
                a = b;
                step *= 2.0;
            }
            if (!bracketed) {
                c = b;
            } else {
                double lo = std::min(a, b), hi = std::max(a, b);
                for (int it = 0; it < 200 && hi - lo > 4e-16 * std::max({1.0, std::abs(lo), std::abs(hi)}); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (dphi(mid) > 0.0 ? hi : lo) = mid;
                }
                c = 0.5 * (lo + hi);
            }
        }
        HardState out;
        out.z = Vec::Constant(1, c);
        out.xi.resize(m_);
        for (std::size_t j = 0; j < static_cast<std::size_t>(m_); ++j) out.xi(static_cast<Eigen::Index>(j)) = clamp_xi(j, c, nullptr);
        return out;
    }

    HardState step_qp(const Vec& z0, const Vec& xi0, double t) const {
        const Eigen::Index d = dim(), n = d + m_;
        const Vec st = model_.sigma_tilde(t);
        Mat Wa = Mat::Zero(n, n);
        Wa.topLeftCorner(d, d) = W_;
        Wa.bottomRightCorner(m_, m_) = model_.xi_weights.asDiagonal();
        Mat A = Mat::Zero(static_cast<Eigen::Index>(rows_.size()), n);
        Vec b(A.rows());
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            const auto& r = rows_[static_cast<std::size_t>(i)];
            if (d) A.row(i).head(d) = r.a_sigma * B_.row(r.element);
            A(i, d + r.element) = r.a_xi;
            b(i) = r.b - r.a_sigma * st(r.element);
        }
        Vec w0(n);
        w0 << z0, xi0;
        HardState out;
        try {
            const auto qp = solve_qp(Wa, Wa * w0, A, b);
            out.z = qp.z.head(d);
            out.xi = qp.z.tail(m_);
        } catch (const EmptySet&) {
            throw SafeLoadViolation("hardened moving set is empty", t);
        }
        return out;
    }

    const HardenedModel& model_;
    Mat B_, W_;
    Eigen::Index m_ = 0;
    std::vector<ElementRow> rows_;
};

void push(SweepTrajectory& tr, const HardChart& ch, const HardenedModel& model, double t, const HardState& s) {
    const Vec y = ch.dim() ? Vec(ch.B() * s.z) : Vec(Vec::Zero(ch.B().rows()));
    tr.step_norm.push_back(tr.y.empty() ? 0.0 : ch.norm(ch.to_z(y - tr.y.back()), s.xi - tr.xi.back()));
    tr.times.push_back(t);
    tr.y.push_back(y);
    tr.xi.push_back(s.xi);
    tr.sigma_tilde.push_back(model.sigma_tilde(t));
    tr.sigma.push_back(y + tr.sigma_tilde.back());
    tr.active.push_back(s.mask);
    tr.certificate_residual.push_back(0.0);
}

void advance(SweepTrajectory& tr, const HardChart& ch, const HardenedModel& model, const SweepOptions& opts,
             HardState& cur, double ta, double tb, int depth) {
    HardState next = ch.step(cur.z, cur.xi, tb, opts.active_tol);
    if (next.mask != cur.mask && depth < opts.refine_depth) {
        const double tm = 0.5 * (ta + tb);
        advance(tr, ch, model, opts, cur, ta, tm, depth + 1);
        advance(tr, ch, model, opts, cur, tm, tb, depth + 1);
        return;
    }
    cur = next;
    push(tr, ch, model, tb, cur);
}

} // namespace

SweepTrajectory hardened_sweep(const HardenedModel& model, const std::vector<double>& grid, const Vec& y0,
                               const Vec& xi0, const SweepOptions& opts) {
    if (grid.empty()) throw PreconditionError("hardened_sweep: empty time grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw PreconditionError("hardened_sweep: grid must be strictly increasing");
    HardChart ch(model);
    const Eigen::Index m = model.basis_V.rows();
    if (y0.size() != m || xi0.size() != m) throw PreconditionError("hardened_sweep: initial state has the wrong size");
    HardState cur{ch.to_z(y0), xi0, {}};
    if ((ch.B() * cur.z - y0).norm() > 1e-9 * std::max(1.0, y0.norm()) || ch.violation(cur.z, xi0, grid[0]) > 1e-9)
        throw InitialConditionError("initial state is not in the hardened moving set");
    cur.mask = ch.mask(cur.z, cur.xi, grid[0], opts.active_tol);

    SweepTrajectory tr;
    push(tr, ch, model, grid[0], cur);
    for (std::size_t k = 1; k < grid.size(); ++k) advance(tr, ch, model, opts, cur, grid[k - 1], grid[k], 0);

    double scale = 1.0;
    for (std::size_t k = 0; k < tr.size(); ++k) scale = std::max(scale, ch.norm(ch.to_z(tr.y[k]), tr.xi[k]));
    for (std::size_t k = 1; k < tr.size(); ++k) {
        if (tr.step_norm[k] <= opts.motion_tol * scale) continue;
        const Vec zp = ch.to_z(tr.y[k - 1]);
        double lo = tr.times[k - 1], hi = tr.times[k];
        while (hi - lo > opts.onset_tol) {
            const double mid = 0.5 * (lo + hi);
            (ch.violation(zp, tr.xi[k - 1], mid) > 1e-13 ? hi : lo) = mid;
        }
        tr.yield_onset = 0.5 * (lo + hi);
        break;
    }
    return tr;
}

StrainRecord hardened_strain_recovery(const SweepTrajectory& tr, const HardenedModel& model, const Vec& stiffness,
                                      const Vec& eps0, double tol) {
    StrainRecord rec;
    if (tr.size() == 0) return rec;
    const Eigen::Index m = tr.y[0].size();
    if (tr.xi.size() != tr.size()) throw PreconditionError("hardened_strain_recovery: trajectory has no internal variables");
    const auto rows = hardening_rows(model.spec, m);
    const Mat& BV = model.basis_V;
    const Mat& M = model.metric.matrix();
    Vec acc = Vec::Zero(m);
    for (std::size_t k = 0; k < tr.size(); ++k) {
        Vec omega = Vec::Zero(m);
        if (k > 0) {
            const double dt = tr.times[k] - tr.times[k - 1];
            const Vec ydot = (tr.y[k] - tr.y[k - 1]) / dt;
            const Vec xidot = (tr.xi[k] - tr.xi[k - 1]) / dt;
            std::vector<std::size_t> active;
            std::vector<bool> touched(static_cast<std::size_t>(m), false);
            for (std::size_t r = 0; r < rows.size(); ++r) {
                const auto& e = rows[r];
                const double s = e.a_sigma * tr.sigma[k](e.element) + e.a_xi * tr.xi[k](e.element) - e.b;
                if (s >= -tol * std::max(1.0, std::abs(e.b))) {
                    active.push_back(r);
                    touched[static_cast<std::size_t>(e.element)] = true;
                }
            }
            const double rate_scale = std::max({1.0, ydot.cwiseAbs().maxCoeff(), xidot.cwiseAbs().maxCoeff()});
            std::vector<Eigen::Index> xi_rows;
            for (Eigen::Index j = 0; j < m; ++j) {
                if (touched[static_cast<std::size_t>(j)])
                    xi_rows.push_back(j);
                else if (std::abs(xidot(j)) > 1e-8 * rate_scale)
                    throw InternalError("hardened strain recovery: internal variable moves off the yield surface");
            }
            const auto na = static_cast<Eigen::Index>(active.size());
            if (na > 0) {
                const Eigen::Index d = BV.cols(), nx = static_cast<Eigen::Index>(xi_rows.size());
                Mat Asig = Mat::Zero(m, na);
                for (Eigen::Index c = 0; c < na; ++c) {
                    const auto& e = rows[active[static_cast<std::size_t>(c)]];
                    Asig(e.element, c) = e.a_sigma;
                }
                LinearProgram lp;
                lp.c = Vec::Ones(na);
                lp.A_eq = Mat::Zero(d + nx, na);
                lp.b_eq = Vec(d + nx);
                lp.A_eq.topRows(d) = BV.transpose() * Asig;
                lp.b_eq.head(d) = -BV.transpose() * (M * ydot);
                for (Eigen::Index q = 0; q < nx; ++q) {
                    const Eigen::Index j = xi_rows[static_cast<std::size_t>(q)];
                    for (Eigen::Index c = 0; c < na; ++c) {
                        const auto& e = rows[active[static_cast<std::size_t>(c)]];
                        if (e.element == j) lp.A_eq(d + q, c) = e.a_xi;
                    }
                    lp.b_eq(d + q) = -model.xi_weights(j) * xidot(j);
                }
                const auto res = solve_lp(lp);
                if (res.status != LpStatus::Optimal)
                    throw InternalError("hardened strain recovery: empty right-hand side at t = " + std::to_string(tr.times[k]));
                omega = model.metric.inverse() * (Asig * res.x) + ydot;
            } else if (ydot.cwiseAbs().maxCoeff() > 1e-8 * rate_scale) {
                throw InternalError("hardened strain recovery: stress moves with no active face");
            }
            acc += omega * dt;
        }
        const Vec eps = eps0 + (tr.sigma_tilde[k] - tr.sigma_tilde[0] + acc).cwiseQuotient(stiffness);
        const Vec eps_el = tr.sigma[k].cwiseQuotient(stiffness);
        rec.times.push_back(tr.times[k]);
        rec.omega.push_back(omega);
        rec.eps.push_back(eps);
        rec.eps_el.push_back(eps_el);
        rec.eps_p.push_back(eps - eps_el);
        rec.feasible.push_back(true);
        rec.max_omega = std::max(rec.max_omega, omega.cwiseAbs().maxCoeff());
    }
    return rec;
}

RefinementRow hardened_rod_run(const RodSpec& base, int N, double dt, double t_end, ElasticPath path,
                               const HardeningSpec& spec) {
    RodSpec rs = base;
    rs.N = N;
    auto rod = assemble_rod(rs);
    auto dec = assemble_network(rod.model);
    HardenedModel hm;
    hm.spec = spec.resolved(N, rod.model.sigma_minus, rod.model.sigma_plus);
    hm.basis_V = dec.basis_V;
    hm.sigma_tilde = rod_elastic_path(rs, path);
    hm.metric = dec.metric;
    hm.xi_weights = Vec::Constant(N, rod.h);
    auto tr = hardened_sweep(hm, uniform_grid(0.0, t_end, dt), Vec::Zero(N), Vec::Zero(N));
    auto rec = hardened_strain_recovery(tr, hm, dec.stiffness, default_initial_strain(dec.stiffness, tr.sigma_tilde[0]));
    RefinementRow row;
    row.N = N;
    row.h = rod.h;
    row.max_omega = rec.max_omega;
    row.concentration = plastic_concentration(rec, rod.h);
    row.feasible = rec.all_feasible();
    return row;
}

} // namespace sweepplast
