#include "sweepplast/convex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "sweepplast/errors.hpp"
#include "sweepplast/qp.hpp"

namespace sweepplast {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void append_rows(Mat& A, Vec& b, const Mat& A2, const Vec& b2, Eigen::Index col0, Eigen::Index n) {
    if (A2.rows() == 0) return;
    const Eigen::Index r0 = A.rows();
    Mat An = Mat::Zero(r0 + A2.rows(), n);
    if (r0) An.topRows(r0) = A;
    An.block(r0, col0, A2.rows(), A2.cols()) = A2;
    Vec bn(r0 + b2.size());
    bn << b, b2;
    A = std::move(An);
    b = std::move(bn);
}

ConicForm empty_form(Eigen::Index n) {
    ConicForm f;
    f.n = n;
    f.Aeq = Mat(0, n);
    f.beq = Vec(0);
    f.A = Mat(0, n);
    f.b = Vec(0);
    return f;
}

// Embeds a form on coordinates [col0, col0 + f.n) of an n-dimensional space.
void merge_into(ConicForm& out, const ConicForm& f, Eigen::Index col0) {
    append_rows(out.A, out.b, f.A, f.b, col0, out.n);
    append_rows(out.Aeq, out.beq, f.Aeq, f.beq, col0, out.n);
    for (const auto& s : f.soc) {
        SocTerm t;
        t.S = Mat::Zero(s.S.rows(), out.n);
        t.S.middleCols(col0, f.n) = s.S;
        t.c = s.c;
        t.r = s.r;
        if (s.h.size()) {
            t.h = Vec::Zero(out.n);
            t.h.segment(col0, f.n) = s.h;
        }
        out.soc.push_back(std::move(t));
    }
}

double row_violation(const Mat& A, const Vec& b, const Vec& x) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        const double nr = std::max(A.row(i).norm(), 1e-300);
        worst = std::max(worst, (A.row(i).dot(x) - b(i)) / nr);
    }
    return worst;
}

Vec project_reduced(const ReducedPolytope& p, const Vec& point, const WeightedMetric& metric) {
    const Eigen::Index k = p.N.cols();
    if (k == 0) {
        if (p.b.size() && p.b.minCoeff() < -1e-12 * std::max(1.0, p.b.cwiseAbs().maxCoeff()))
            throw EmptySet("project: set is empty");
        return p.x0;
    }
    const Mat MN = metric.matrix() * p.N;
    const Mat W = p.N.transpose() * MN;
    const Vec w = MN.transpose() * (point - p.x0);
    auto qp = solve_qp(W, w, p.A, p.b);
    return p.x0 + p.N * qp.z;
}

// Projection onto {x : ||S x - c|| <= r} in the M-metric.
Vec project_soc(const SocTerm& t, const Vec& p, const WeightedMetric& metric) {
    auto resid = [&](const Vec& x) { return (t.S * x - t.c).norm() - t.r; };
    if (resid(p) <= 0.0) return p;
    const Mat& M = metric.matrix();
    const Mat StS = t.S.transpose() * t.S;
    const Vec Mp = M * p;
    const Vec Stc = t.S.transpose() * t.c;
    auto x_of = [&](double mu) -> Vec { return (M + mu * StS).ldlt().solve(Mp + mu * Stc); };
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200 && resid(x_of(hi)) > 0.0; ++i) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (resid(x_of(mid)) > 0.0 ? lo : hi) = mid;
    }
    Vec x = x_of(hi);
    // Final radial snap keeps the point feasible for plain balls.
    const Vec d = t.S * x - t.c;
    const double nd = d.norm();
    if (nd > t.r && t.S.rows() == t.S.cols() && (t.S - Mat::Identity(t.S.rows(), t.S.cols())).norm() == 0.0)
        x = t.c + d * (t.r / nd);
    return x;
}

} // namespace

Eigen::Index ConvexSetDesc::dim() const {
    return std::visit(overloaded{
                          [](const Box& s) { return s.lower.size(); },
                          [](const Ball& s) { return s.center.size(); },
                          [](const AffineSubspace& s) { return s.offset.size(); },
                          [](const Polyhedron& s) { return s.A.cols(); },
                          [](const Translate& s) { return s.shift.size(); },
                          [](const Intersection& s) { return s.parts.front().dim(); },
                          [](const Product& s) {
                              Eigen::Index n = 0;
                              for (const auto& p : s.parts) n += p.dim();
                              return n;
                          },
                      },
                      v);
}

int ConvexSetDesc::depth() const {
    return std::visit(overloaded{
                          [](const Translate& s) { return 1 + s.inner->depth(); },
                          [](const Intersection& s) {
                              int d = 0;
                              for (const auto& p : s.parts) d = std::max(d, p.depth());
                              return d + 1;
                          },
                          [](const Product& s) {
                              int d = 0;
                              for (const auto& p : s.parts) d = std::max(d, p.depth());
                              return d + 1;
                          },
                          [](const auto&) { return 0; },
                      },
                      v);
}

ConvexSetDesc make_box(Vec lower, Vec upper) {
    if (lower.size() != upper.size()) throw InvalidSet("box: bound sizes differ");
    for (Eigen::Index i = 0; i < lower.size(); ++i)
        if (!(lower(i) <= upper(i))) throw InvalidSet("box: lower bound exceeds upper bound");
    return ConvexSetDesc{Box{std::move(lower), std::move(upper)}};
}

ConvexSetDesc make_ball(Vec center, double radius) {
    if (!(radius > 0.0)) throw InvalidSet("ball: radius must be positive");
    return ConvexSetDesc{Ball{std::move(center), radius}};
}

ConvexSetDesc make_subspace(Mat basis, Vec offset) {
    if (basis.rows() != offset.size()) throw InvalidSet("subspace: basis and offset sizes differ");
    return ConvexSetDesc{AffineSubspace{std::move(basis), std::move(offset)}};
}

ConvexSetDesc make_subspace(Mat basis) {
    Vec off = Vec::Zero(basis.rows());
    return make_subspace(std::move(basis), std::move(off));
}

ConvexSetDesc make_polyhedron(Mat A, Vec b) {
    if (A.rows() != b.size()) throw InvalidSet("polyhedron: row count mismatch");
    return ConvexSetDesc{Polyhedron{std::move(A), std::move(b)}};
}

ConvexSetDesc translate(ConvexSetDesc inner, Vec shift) {
    if (inner.dim() != shift.size()) throw InvalidSet("translate: dimension mismatch");
    ConvexSetDesc s{Translate{std::make_shared<const ConvexSetDesc>(std::move(inner)), std::move(shift)}};
    if (s.depth() > 3) throw InvalidSet("set nesting deeper than 3");
    return s;
}

ConvexSetDesc intersect(std::vector<ConvexSetDesc> parts) {
    if (parts.empty()) throw InvalidSet("intersection of nothing");
    for (const auto& p : parts)
        if (p.dim() != parts.front().dim()) throw InvalidSet("intersection: dimension mismatch");
    ConvexSetDesc s{Intersection{std::move(parts)}};
    if (s.depth() > 3) throw InvalidSet("set nesting deeper than 3");
    return s;
}

ConvexSetDesc product(std::vector<ConvexSetDesc> parts) {
    if (parts.empty()) throw InvalidSet("product of nothing");
    ConvexSetDesc s{Product{std::move(parts)}};
    if (s.depth() > 3) throw InvalidSet("set nesting deeper than 3");
    return s;
}

ConicForm conic_form(const ConvexSetDesc& set) {
    const Eigen::Index n = set.dim();
    ConicForm f = empty_form(n);
    std::visit(overloaded{
                   [&](const Box& s) {
                       for (Eigen::Index i = 0; i < n; ++i) {
                           Mat row = Mat::Zero(1, n);
                           row(0, i) = 1.0;
                           if (std::isfinite(s.upper(i))) append_rows(f.A, f.b, row, Vec::Constant(1, s.upper(i)), 0, n);
                           if (std::isfinite(s.lower(i))) append_rows(f.A, f.b, -row, Vec::Constant(1, -s.lower(i)), 0, n);
                       }
                   },
                   [&](const Ball& s) { f.soc.push_back({Mat::Identity(n, n), s.center, s.radius, Vec()}); },
                   [&](const AffineSubspace& s) {
                       Mat comp = s.basis.cols() ? null_space(s.basis.transpose()).transpose() : Mat(Mat::Identity(n, n));
                       f.Aeq = comp;
                       f.beq = comp * s.offset;
                   },
                   [&](const Polyhedron& s) {
                       f.A = s.A;
                       f.b = s.b;
                   },
                   [&](const Translate& s) {
                       f = conic_form(*s.inner);
                       f.b += f.A * s.shift;
                       f.beq += f.Aeq * s.shift;
                       for (auto& t : f.soc) {
                           t.c += t.S * s.shift;
                           if (t.h.size()) t.r += t.h.dot(s.shift);
                       }
                   },
                   [&](const Intersection& s) {
                       for (const auto& p : s.parts) merge_into(f, conic_form(p), 0);
                   },
                   [&](const Product& s) {
                       Eigen::Index off = 0;
                       for (const auto& p : s.parts) {
                           merge_into(f, conic_form(p), off);
                           off += p.dim();
                       }
                   },
               },
               set.v);
    return f;
}

bool is_polyhedral(const ConvexSetDesc& set) {
    return std::visit(overloaded{
                          [](const Ball&) { return false; },
                          [](const Translate& s) { return is_polyhedral(*s.inner); },
                          [](const Intersection& s) {
                              return std::all_of(s.parts.begin(), s.parts.end(), [](const auto& p) { return is_polyhedral(p); });
                          },
                          [](const Product& s) {
                              return std::all_of(s.parts.begin(), s.parts.end(), [](const auto& p) { return is_polyhedral(p); });
                          },
                          [](const auto&) { return true; },
                      },
                      set.v);
}

ReducedPolytope reduce(const ConicForm& form) {
    if (!form.polyhedral()) throw Unsupported("reduce: set has round parts");
    ReducedPolytope p;
    if (form.Aeq.rows() == 0) {
        p.x0 = Vec::Zero(form.n);
        p.N = Mat::Identity(form.n, form.n);
    } else {
        p.x0 = pinv(form.Aeq) * form.beq;
        const double scale = std::max(1.0, form.beq.cwiseAbs().maxCoeff());
        if ((form.Aeq * p.x0 - form.beq).cwiseAbs().maxCoeff() > 1e-10 * scale)
            throw EmptySet("equality constraints are inconsistent");
        p.N = null_space(form.Aeq);
    }
    p.A = form.A * p.N;
    p.b = form.b - form.A * p.x0;
    return p;
}

double maximize_linear(const ConicForm& form, const Vec& c, Vec* argmax) {
    const Eigen::Index n = form.n;
    LinearProgram lp;
    lp.c = -c;
    lp.A_ub = form.A;
    lp.b_ub = form.b;
    lp.A_eq = form.Aeq;
    lp.b_eq = form.beq;
    lp.lower = Vec::Constant(n, -kInf);
    lp.upper = Vec::Constant(n, kInf);
    for (const auto& t : form.soc) {
        if (t.h.size()) continue;
        // Bounding box keeps the first relaxation finite.
        append_rows(lp.A_ub, lp.b_ub, t.S, t.c + Vec::Constant(t.c.size(), t.r), 0, n);
        append_rows(lp.A_ub, lp.b_ub, -t.S, -t.c + Vec::Constant(t.c.size(), t.r), 0, n);
    }
    // Stops once no cut is violated, or when the worst violation has not halved in
    // 20 rounds: either the roundoff floor of the LP, or an optimal face on which the
    // vertices wander.  The least violated iterate is returned then.  A pure
    // feasibility query has no objective to steer the vertices, so it settles for a
    // point within 1e-9.
    const bool feasibility = c.isZero();
    double best = kInf;
    Vec best_x;
    int stalled = 0;
    for (int iter = 0; iter < 400; ++iter) {
        auto res = solve_lp(lp);
        if (res.status == LpStatus::Infeasible) return -kInf;
        if (res.status == LpStatus::Unbounded) return kInf;
        bool cut = false;
        double worst = 0.0;
        for (const auto& t : form.soc) {
            const Vec d = t.S * res.x - t.c;
            const double rhs = t.r + (t.h.size() ? t.h.dot(res.x) : 0.0);
            const double nd = d.norm();
            const double viol = (nd - rhs) / (1.0 + std::abs(rhs) + t.c.norm());
            if (viol > 1e-15) {
                const Vec g = d / nd;
                Mat row = g.transpose() * t.S;
                if (t.h.size()) row -= t.h.transpose();
                append_rows(lp.A_ub, lp.b_ub, row, Vec::Constant(1, t.r + g.dot(t.c)), 0, n);
                cut = true;
                worst = std::max(worst, viol);
            }
        }
        if (!cut || (feasibility && worst <= 1e-9)) {
            if (argmax) *argmax = res.x;
            return -res.objective;
        }
        if (worst < 0.5 * best) {
            best = worst;
            best_x = res.x;
            stalled = 0;
        } else {
            ++stalled;
        }
        if (stalled >= 20 && best <= 1e-8) {
            if (argmax) *argmax = best_x;
            return c.dot(best_x);
        }
        if (iter == 399) {
            if (argmax) *argmax = res.x;
            return -res.objective;
        }
    }
    return kInf;
}

bool is_empty(const ConvexSetDesc& set) {
    return maximize_linear(conic_form(set), Vec::Zero(set.dim())) == -kInf;
}

bool contains(const ConvexSetDesc& set, const Vec& x, double tol) {
    const ConicForm f = conic_form(set);
    const double scale = tol * (1.0 + x.cwiseAbs().maxCoeff());
    if (row_violation(f.A, f.b, x) > scale) return false;
    for (Eigen::Index i = 0; i < f.Aeq.rows(); ++i)
        if (std::abs(f.Aeq.row(i).dot(x) - f.beq(i)) / std::max(f.Aeq.row(i).norm(), 1e-300) > scale) return false;
    for (const auto& t : f.soc)
        if ((t.S * x - t.c).norm() - t.r - (t.h.size() ? t.h.dot(x) : 0.0) > scale) return false;
    return true;
}

double diameter(const ConvexSetDesc& set) {
    const Eigen::Index n = set.dim();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        Vec e = Vec::Unit(n, i);
        const double w = support_function(set, e) + support_function(set, -e);
        if (!std::isfinite(w)) return kInf;
        sum += w * w;
    }
    return std::sqrt(sum);
}

Vec project(const ConvexSetDesc& set, const Vec& point, const WeightedMetric& metric) {
    if (point.size() != set.dim() || metric.dim() != set.dim()) throw PreconditionError("project: dimension mismatch");
    if (const Box* box = std::get_if<Box>(&set.v); box && metric.is_diagonal())
        return point.cwiseMax(box->lower).cwiseMin(box->upper);
    const ConicForm f = conic_form(set);
    if (f.polyhedral()) return project_reduced(reduce(f), point, metric);
    if (is_empty(set)) throw EmptySet("project: set is empty");

    ConicForm poly = f;
    poly.soc.clear();
    const bool has_poly = poly.A.rows() > 0 || poly.Aeq.rows() > 0;
    if (!has_poly && f.soc.size() == 1) return project_soc(f.soc[0], point, metric);

    // Dykstra's alternating projections in the M-metric.
    ReducedPolytope rp;
    if (has_poly) rp = reduce(poly);
    const std::size_t parts = f.soc.size() + (has_poly ? 1 : 0);
    std::vector<Vec> inc(parts, Vec::Zero(point.size()));
    Vec x = point;
    for (int cycle = 0; cycle < 200000; ++cycle) {
        const Vec prev = x;
        for (std::size_t k = 0; k < parts; ++k) {
            const Vec y = x + inc[k];
            if (has_poly && k == parts - 1)
                x = project_reduced(rp, y, metric);
            else
                x = project_soc(f.soc[k], y, metric);
            inc[k] = y - x;
        }
        if (metric.norm(x - prev) <= 1e-15 * (1.0 + metric.norm(x)) && contains(set, x, 1e-10)) break;
    }
    return x;
}

double support_function(const ConvexSetDesc& set, const Vec& d) {
    if (d.size() != set.dim()) throw PreconditionError("support_function: dimension mismatch");
    return std::visit(
        overloaded{
            [&](const Box& s) {
                double v = 0.0;
                for (Eigen::Index i = 0; i < d.size(); ++i) {
                    if (d(i) > 0.0) v += d(i) * s.upper(i);
                    else if (d(i) < 0.0) v += d(i) * s.lower(i);
                }
                return v;
            },
            [&](const Ball& s) { return d.dot(s.center) + s.radius * d.norm(); },
            [&](const AffineSubspace& s) {
                if (s.basis.cols() && (s.basis.transpose() * d).norm() > 1e-12 * d.norm() * std::max(1.0, s.basis.norm()))
                    return kInf;
                return d.dot(s.offset);
            },
            [&](const Translate& s) {
                const double inner = support_function(*s.inner, d);
                return std::isfinite(inner) ? inner + d.dot(s.shift) : inner;
            },
            [&](const Product& s) {
                double v = 0.0;
                Eigen::Index off = 0;
                bool inf = false;
                for (const auto& p : s.parts) {
                    const double w = support_function(p, d.segment(off, p.dim()));
                    off += p.dim();
                    if (w == -kInf) return -kInf;
                    if (w == kInf) inf = true;
                    else v += w;
                }
                return inf ? kInf : v;
            },
            [&](const auto&) { return maximize_linear(conic_form(set), d); },
        },
        set.v);
}

bool NormalConeDesc::contains(const Vec& v, double tol) const {
    const Eigen::Index n = v.size();
    const Eigen::Index k = generators.cols(), l = lineality.cols();
    if (k == 0 && l == 0) return v.norm() <= tol * (1.0 + base.norm());
    LinearProgram lp;
    const Eigen::Index nv = k + l + 2 * n;
    lp.c = Vec::Zero(nv);
    lp.c.tail(2 * n).setOnes();
    lp.A_eq = Mat::Zero(n, nv);
    if (k) lp.A_eq.leftCols(k) = generators;
    if (l) lp.A_eq.middleCols(k, l) = lineality;
    lp.A_eq.middleCols(k + l, n) = Mat::Identity(n, n);
    lp.A_eq.rightCols(n) = -Mat::Identity(n, n);
    lp.b_eq = v;
    lp.lower = Vec::Zero(nv);
    lp.lower.segment(k, l).setConstant(-kInf);
    lp.upper = Vec::Constant(nv, kInf);
    auto r = solve_lp(lp);
    return r.status == LpStatus::Optimal && r.objective <= tol * (1.0 + v.norm());
}

NormalConeDesc normal_cone(const ConvexSetDesc& set, const Vec& x, const WeightedMetric& metric, double tol) {
    const Eigen::Index n = set.dim();
    if (tol < 0.0) {
        const double diam = diameter(set);
        tol = 1e-8 * (std::isfinite(diam) && diam > 0.0 ? diam : std::max(1.0, x.norm()));
    }
    if (!contains(set, x, tol / (1.0 + x.cwiseAbs().maxCoeff())))
        throw PointNotInSet("normal_cone: point is not in the set");
    const ConicForm f = conic_form(set);
    const Mat& Minv = metric.inverse();
    std::vector<Vec> gens;
    for (Eigen::Index i = 0; i < f.A.rows(); ++i) {
        const double nr = f.A.row(i).norm();
        if (nr == 0.0) continue;
        if ((f.A.row(i).dot(x) - f.b(i)) / nr >= -tol) gens.push_back(Minv * f.A.row(i).transpose() / nr);
    }
    for (const auto& t : f.soc) {
        const Vec d = t.S * x - t.c;
        const double rhs = t.r + (t.h.size() ? t.h.dot(x) : 0.0);
        if (d.norm() - rhs >= -tol && d.norm() > 0.0) {
            Vec g = t.S.transpose() * d / d.norm();
            if (t.h.size()) g -= t.h;
            gens.push_back(Minv * g);
        }
    }
    for (auto& g : gens) g /= std::max(g.norm(), 1e-300);

    std::vector<Vec> lin;
    for (Eigen::Index i = 0; i < f.Aeq.rows(); ++i) lin.push_back(Minv * f.Aeq.row(i).transpose());
    std::vector<bool> paired(gens.size(), false);
    for (std::size_t i = 0; i < gens.size(); ++i)
        for (std::size_t j = i + 1; j < gens.size(); ++j)
            if (!paired[i] && !paired[j] && (gens[i] + gens[j]).norm() <= 1e-10) {
                paired[i] = paired[j] = true;
                lin.push_back(gens[i]);
            }
    NormalConeDesc nc;
    nc.base = x;
    Mat L(n, static_cast<Eigen::Index>(lin.size()));
    for (std::size_t j = 0; j < lin.size(); ++j) L.col(static_cast<Eigen::Index>(j)) = lin[j];
    nc.lineality = L.cols() ? range_space(L) : Mat(n, 0);
    std::vector<Vec> keep;
    for (std::size_t i = 0; i < gens.size(); ++i) {
        if (paired[i]) continue;
        // Drop generators already inside the lineality space.
        const Vec rest = nc.lineality.cols() ? Vec(gens[i] - nc.lineality * (nc.lineality.transpose() * gens[i])) : gens[i];
        if (rest.norm() > 1e-12) keep.push_back(gens[i]);
    }
    nc.generators.resize(n, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) nc.generators.col(static_cast<Eigen::Index>(j)) = keep[j];
    return nc;
}

bool in_normal_cone(const ConvexSetDesc& set, const Vec& x, const Vec& v, const WeightedMetric& metric, double tol) {
    const Vec d = metric.matrix() * v;
    const double s = support_function(set, d);
    if (!std::isfinite(s)) return false;
    return s - d.dot(x) <= tol * (1.0 + d.norm() * (1.0 + x.norm()));
}

std::vector<Vec> enumerate_vertices(const ReducedPolytope& p, double tol) {
    const Eigen::Index k = p.N.cols();
    const Eigen::Index m = p.A.rows();
    if (k > 3) throw Unsupported("vertex enumeration limited to dimension 3");
    std::vector<Vec> out;
    if (k == 0) {
        if (m && p.b.minCoeff() < -tol) throw EmptySet("polytope is empty");
        out.push_back(p.x0);
        return out;
    }
    // Boundedness and nonemptiness via LPs along the coordinate directions.
    for (Eigen::Index i = 0; i < k; ++i)
        for (double sgn : {1.0, -1.0}) {
            LinearProgram lp;
            lp.c = -sgn * Vec::Unit(k, i);
            lp.A_ub = p.A;
            lp.b_ub = p.b;
            lp.lower = Vec::Constant(k, -kInf);
            lp.upper = Vec::Constant(k, kInf);
            auto r = solve_lp(lp);
            if (r.status == LpStatus::Unbounded) throw Unbounded("polytope is unbounded");
            if (r.status == LpStatus::Infeasible) throw EmptySet("polytope is empty");
        }
    const double scale = std::max(1.0, p.b.cwiseAbs().maxCoeff());
    std::vector<Vec> zs;
    std::vector<Eigen::Index> idx(k);
    std::function<void(Eigen::Index, Eigen::Index)> rec = [&](Eigen::Index start, Eigen::Index depth) {
        if (depth == k) {
            Mat S(k, k);
            Vec r(k);
            for (Eigen::Index j = 0; j < k; ++j) {
                S.row(j) = p.A.row(idx[j]);
                r(j) = p.b(idx[j]);
            }
            Eigen::FullPivLU<Mat> lu(S);
            lu.setThreshold(1e-12);
            if (lu.rank() < k) return;
            const Vec z = lu.solve(r);
            if (((p.A * z - p.b).array() > tol * scale).any()) return;
            for (const auto& w : zs)
                if ((w - z).norm() <= tol * (1.0 + z.norm())) return;
            zs.push_back(z);
            return;
        }
        for (Eigen::Index i = start; i < m; ++i) {
            idx[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
    for (const auto& z : zs) out.push_back(p.x0 + p.N * z);
    return out;
}

double hausdorff_distance(const ReducedPolytope& p1, const ReducedPolytope& p2, const WeightedMetric& metric) {
    double d = 0.0;
    for (const auto& v : enumerate_vertices(p1)) d = std::max(d, metric.norm(v - project_reduced(p2, v, metric)));
    for (const auto& v : enumerate_vertices(p2)) d = std::max(d, metric.norm(v - project_reduced(p1, v, metric)));
    return d;
}

double hausdorff_distance(const ConvexSetDesc& s1, const ConvexSetDesc& s2, const WeightedMetric& metric) {
    if (!is_polyhedral(s1) || !is_polyhedral(s2)) throw Unsupported("hausdorff_distance: polytopes only");
    return hausdorff_distance(reduce(conic_form(s1)), reduce(conic_form(s2)), metric);
}

} // namespace sweepplast
