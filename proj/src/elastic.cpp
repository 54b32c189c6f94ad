#include "sweepplast/elastic.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "sweepplast/errors.hpp"

namespace sweepplast {

PiecewiseLinear PiecewiseLinear::constant(const Vec& v) {
    PiecewiseLinear p;
    p.times = {0.0};
    p.values = v.transpose();
    return p;
}

Vec PiecewiseLinear::operator()(double t) const {
    const auto n = times.size();
    if (n == 0) return Vec::Zero(values.cols());
    if (n == 1 || t <= times.front()) return values.row(0).transpose();
    if (t >= times.back()) return values.row(static_cast<Eigen::Index>(n - 1)).transpose();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const auto i = static_cast<Eigen::Index>(it - times.begin());
    const double t0 = times[i - 1], t1 = times[i];
    const double w = (t - t0) / (t1 - t0);
    return ((1.0 - w) * values.row(i - 1) + w * values.row(i)).transpose();
}

double PiecewiseLinear::lipschitz() const {
    double L = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        L = std::max(L, (values.row(r) - values.row(r - 1)).norm() / (times[i] - times[i - 1]));
    }
    return L;
}

void PiecewiseLinear::validate(const std::string& what) const {
    if (times.empty()) throw ParseError(what + ": empty breakpoint table");
    if (static_cast<Eigen::Index>(times.size()) != values.rows())
        throw ParseError(what + ": breakpoint and value counts differ");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw ParseError(what + ": breakpoints must be strictly increasing");
    if (!values.allFinite()) throw ParseError(what + ": non-finite value");
}

std::vector<double> LoadProgram::breakpoints() const {
    std::vector<double> t = prescribed.times;
    t.insert(t.end(), forces.times.begin(), forces.times.end());
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
}

const char* to_string(KinematicClass k) {
    switch (k) {
        case KinematicClass::Determinate: return "kinematically-determinate";
        case KinematicClass::InfinitesimallyRigid: return "infinitesimally-rigid";
        case KinematicClass::Mechanism: return "mechanism";
    }
    return "?";
}

FundamentalDecomposition assemble_network(const NetworkModel& model) {
    const Eigen::Index m = model.elements(), n = model.nodes();
    if (model.stiffness.size() != m) throw InvalidModel("stiffness count differs from element count");
    if ((model.stiffness.array() <= 0.0).any()) throw InvalidModel("stiffness must be positive");
    if (model.sigma_minus.size() || model.sigma_plus.size()) {
        if (model.sigma_minus.size() != m || model.sigma_plus.size() != m)
            throw InvalidModel("yield bound count differs from element count");
        if ((model.sigma_minus.array() >= model.sigma_plus.array()).any())
            throw InvalidModel("yield bounds must satisfy sigma- < sigma+");
    }
    FundamentalDecomposition d;
    d.stiffness = model.stiffness;
    d.metric = WeightedMetric::diagonal(model.stiffness.cwiseInverse());
    d.E = model.E;
    if (model.R.rows() == 0) {
        d.Ru = Mat(0, n);
    } else if (model.constraint_kind == ConstraintKind::Displacement) {
        if (model.R.cols() != n) throw InvalidModel("constraint matrix must act on node displacements");
        d.Ru = model.R;
    } else {
        if (model.R.cols() != m) throw InvalidModel("constraint matrix must act on elongations");
        d.Ru = model.R * model.E;
    }
    if (d.Ru.rows() && numerical_rank(d.Ru) < d.Ru.rows()) throw RankError("constraint rows are dependent");
    d.Ru_pinv = d.Ru.rows() ? pinv(d.Ru) : Mat(Mat::Zero(n, 0));
    d.R0 = d.Ru.rows() ? null_space(d.Ru) : Mat(Mat::Identity(n, n));
    d.ER0 = d.E * d.R0;
    d.basis_U = range_space(model.stiffness.asDiagonal() * d.ER0);
    d.basis_V = null_space(d.ER0.transpose());
    if (d.basis_V.cols() == 0) d.basis_V = Mat(m, 0);
    d.P_U = weighted_projector(d.basis_U, d.metric);
    d.P_V = weighted_projector(d.basis_V, d.metric);
    d.G = d.P_V * model.stiffness.asDiagonal();

    const Eigen::Index x0dim = d.R0.cols();
    d.kernel_dim = x0dim - numerical_rank(d.ER0);
    if (d.kernel_dim == 0) {
        d.kinematic_class = KinematicClass::Determinate;
    } else {
        const Mat K = d.R0 * null_space(d.ER0);
        const Vec ones = Vec::Ones(n) / std::sqrt(static_cast<double>(n));
        const bool rigid = d.kernel_dim == 1 && std::abs(std::abs(K.col(0).normalized().dot(ones)) - 1.0) < 1e-10;
        d.kinematic_class = rigid ? KinematicClass::InfinitesimallyRigid : KinematicClass::Mechanism;
    }
    return d;
}

Vec dirichlet_offset(const FundamentalDecomposition& dec, const Vec& prescribed) {
    if (prescribed.size() != dec.Ru.rows()) throw PreconditionError("prescribed value count differs from constraint rows");
    if (dec.Ru.rows() == 0) return Vec::Zero(dec.E.rows());
    return dec.E * (dec.Ru_pinv * prescribed);
}

Vec resolve_force(const FundamentalDecomposition& dec, const Vec& forces) {
    const Eigen::Index m = dec.E.rows();
    if (forces.size() != dec.E.cols()) throw PreconditionError("force vector size differs from node count");
    const Vec f = dec.R0.transpose() * forces;
    if (dec.basis_U.cols() == 0) {
        if (f.norm() > 1e-10 * std::max(1.0, forces.norm())) throw UnresolvableLoad("force is not resolvable");
        return Vec::Zero(m);
    }
    const Mat D = dec.ER0.transpose() * dec.basis_U;
    const Vec a = D.colPivHouseholderQr().solve(f);
    const double resid = (D * a - f).norm();
    if (resid > 1e-10 * std::max(1.0, forces.norm())) throw UnresolvableLoad("force is not resolvable");
    return dec.basis_U * a;
}

Vec elastic_stress(const FundamentalDecomposition& dec, const Vec& prescribed, const Vec& forces) {
    return dec.G * dirichlet_offset(dec, prescribed) + resolve_force(dec, forces);
}

Vec elastic_stress(const FundamentalDecomposition& dec, const LoadProgram& loads, double t) {
    const Vec d = loads.prescribed.times.empty() ? Vec::Zero(dec.Ru.rows()) : loads.prescribed(t);
    const Vec F = loads.forces.times.empty() ? Vec::Zero(dec.E.cols()) : loads.forces(t);
    return elastic_stress(dec, d, F);
}

Vec elastic_strain(const Vec& stiffness, const Vec& stress) { return stress.cwiseQuotient(stiffness); }

// ---- rod -------------------------------------------------------------------

double poly_eval(const Poly& p, double x) {
    double v = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * x + *it;
    return v;
}

Poly poly_antiderivative(const Poly& p) {
    Poly q(p.size() + 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) q[i + 1] = p[i] / static_cast<double>(i + 1);
    return q;
}

void RodSpec::validate() const {
    if (!(b > a)) throw InvalidModel("rod: need a < b");
    if (N < 2) throw InvalidModel("rod: need at least two elements");
    u_a.validate("u_a");
    u_b.validate("u_b");
    for (const auto& term : body_force) term.amplitude.validate("force amplitude");
    // Sign conditions at the sampled midpoints and a dense check of stiffness.
    const double hh = h();
    for (int j = 0; j < N; ++j) {
        const double x = a + (j + 0.5) * hh;
        if (!(poly_eval(stiffness, x) > 0.0)) throw InvalidModel("rod: stiffness must be positive");
        if (!(poly_eval(sigma_minus, x) < 0.0 && poly_eval(sigma_plus, x) > 0.0))
            throw InvalidModel("rod: need sigma- < 0 < sigma+");
    }
}

namespace {

std::vector<double> merged_times(const RodSpec& s) {
    std::vector<double> t = s.u_a.times;
    t.insert(t.end(), s.u_b.times.begin(), s.u_b.times.end());
    for (const auto& term : s.body_force) t.insert(t.end(), term.amplitude.times.begin(), term.amplitude.times.end());
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
}

double body_force(const RodSpec& s, double t, double x) {
    double F = 0.0;
    for (const auto& term : s.body_force) F += poly_eval(term.shape, x) * term.amplitude(t)(0);
    return F;
}

// Composite 5-point Gauss-Legendre on [a, b].
template <class F>
double integrate(F&& f, double a, double b, int panels = 256) {
    static const double xg[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
    static const double wg[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665, 0.2369268850561891};
    const double hp = (b - a) / panels;
    double s = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double c = a + (p + 0.5) * hp;
        for (int i = 0; i < 5; ++i) s += wg[i] * f(c + 0.5 * hp * xg[i]);
    }
    return 0.5 * hp * s;
}

} // namespace

AssembledRod assemble_rod(const RodSpec& spec) {
    spec.validate();
    const int N = spec.N;
    const double h = spec.h();
    AssembledRod out;
    out.h = h;
    out.midpoints.resize(N);
    for (int j = 0; j < N; ++j) out.midpoints(j) = spec.a + (j + 0.5) * h;

    NetworkModel& m = out.model;
    m.E = Mat::Zero(N, N + 1);
    for (int j = 0; j < N; ++j) {
        m.E(j, j) = -1.0;
        m.E(j, j + 1) = 1.0;
    }
    m.constraint_kind = ConstraintKind::Displacement;
    m.R = Mat::Zero(2, N + 1);
    m.R(0, 0) = 1.0;
    m.R(1, N) = 1.0;
    m.stiffness.resize(N);
    m.sigma_minus.resize(N);
    m.sigma_plus.resize(N);
    for (int j = 0; j < N; ++j) {
        const double x = out.midpoints(j);
        m.stiffness(j) = poly_eval(spec.stiffness, x) / h;
        m.sigma_minus(j) = poly_eval(spec.sigma_minus, x);
        m.sigma_plus(j) = poly_eval(spec.sigma_plus, x);
    }
    m.margin_note = "discrete-only margin";

    const std::vector<double> times = merged_times(spec);
    const auto T = static_cast<Eigen::Index>(times.size());
    out.loads.prescribed.times = times;
    out.loads.prescribed.values.resize(T, 2);
    out.loads.forces.times = times;
    out.loads.forces.values = Mat::Zero(T, N + 1);
    for (Eigen::Index k = 0; k < T; ++k) {
        const double t = times[static_cast<std::size_t>(k)];
        out.loads.prescribed.values(k, 0) = spec.u_a(t)(0);
        out.loads.prescribed.values(k, 1) = spec.u_b(t)(0);
        for (int i = 1; i < N; ++i)
            out.loads.forces.values(k, i) =
                0.5 * h * (body_force(spec, t, out.midpoints(i - 1)) + body_force(spec, t, out.midpoints(i)));
    }
    return out;
}

Vec rod_exact_stress(const RodSpec& spec, double t, const Vec& xs) {
    const double a = spec.a, b = spec.b;
    auto inv_c = [&](double x) { return 1.0 / poly_eval(spec.stiffness, x); };
    const double w0 = 1.0 / integrate(inv_c, a, b);
    // Phi(x) = int_a^x F(t, y) dy, linear in the amplitudes.
    std::vector<Poly> anti;
    std::vector<double> amp;
    for (const auto& term : spec.body_force) {
        anti.push_back(poly_antiderivative(term.shape));
        amp.push_back(term.amplitude(t)(0));
    }
    auto Phi = [&](double x) {
        double v = 0.0;
        for (std::size_t k = 0; k < anti.size(); ++k) v += amp[k] * (poly_eval(anti[k], x) - poly_eval(anti[k], a));
        return v;
    };
    const double inner = integrate([&](double z) { return inv_c(z) * Phi(z); }, a, b);
    const double base = w0 * (spec.u_b(t)(0) - spec.u_a(t)(0) + inner);
    Vec out(xs.size());
    for (Eigen::Index i = 0; i < xs.size(); ++i) out(i) = base - Phi(xs(i));
    return out;
}

std::function<Vec(double)> rod_elastic_path(const RodSpec& spec, ElasticPath path) {
    if (path == ElasticPath::ExactIntegral) {
        Vec mids(spec.N);
        for (int j = 0; j < spec.N; ++j) mids(j) = spec.a + (j + 0.5) * spec.h();
        return [spec, mids](double t) { return rod_exact_stress(spec, t, mids); };
    }
    auto rod = std::make_shared<AssembledRod>(assemble_rod(spec));
    auto dec = std::make_shared<FundamentalDecomposition>(assemble_network(rod->model));
    return [rod, dec](double t) { return elastic_stress(*dec, rod->loads, t); };
}

} // namespace sweepplast
