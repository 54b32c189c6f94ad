#include "sweepplast/strain.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <thread>

#include "sweepplast/errors.hpp"

namespace sweepplast {

OmegaResult recover_omega(const Vec& y, const Vec& ydot, const ConvexSetDesc& sigma, const Vec& sigma_tilde,
                          const Mat& basis_U, const WeightedMetric& metric, double tol) {
    const Eigen::Index m = y.size();
    const YieldRows rows = yield_rows(sigma);
    const Vec s = rows.A * (y + sigma_tilde) - rows.b;
    OmegaResult out;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) >= -tol * std::max(1.0, std::abs(rows.b(i)))) out.active.push_back(i);

    // U is the M-orthogonal complement of V, so omega in U iff B_V^T M omega = 0.
    const Mat BV = basis_U.cols() ? null_space(basis_U.transpose() * metric.matrix()) : Mat(Mat::Identity(m, m));
    const auto na = static_cast<Eigen::Index>(out.active.size());
    Mat Aact(na, m);
    for (Eigen::Index k = 0; k < na; ++k) Aact.row(k) = rows.A.row(out.active[static_cast<std::size_t>(k)]);
    const Vec rhs = -BV.transpose() * (metric.matrix() * ydot);

    if (BV.cols() == 0 || (na == 0 && rhs.norm() <= tol * std::max(1.0, ydot.norm()))) {
        out.feasible = true;
        out.lambda = Vec::Zero(na);
        out.omega = ydot;
        if (BV.cols() && na == 0) out.omega.setZero();
        out.residual = BV.cols() ? (BV.transpose() * metric.matrix() * out.omega).norm() : 0.0;
        return out;
    }

    LinearProgram lp;
    lp.c = Vec::Ones(na);
    lp.A_eq = BV.transpose() * Aact.transpose();
    lp.b_eq = rhs;
    auto res = solve_lp(lp);
    if (res.status != LpStatus::Optimal) {
        out.feasible = false;
        out.farkas = res.farkas_eq;
        out.omega = Vec::Zero(m);
        out.lambda = Vec::Zero(na);
        return out;
    }
    out.feasible = true;
    out.lambda = res.x;
    out.omega = metric.inverse() * (Aact.transpose() * res.x) + ydot;
    out.residual = (BV.transpose() * metric.matrix() * out.omega).norm();
    return out;
}

bool StrainRecord::all_feasible() const {
    for (bool f : feasible)
        if (!f) return false;
    return true;
}

Vec default_initial_strain(const Vec& stiffness, const Vec& sigma_tilde0) { return sigma_tilde0.cwiseQuotient(stiffness); }

StrainRecord recover_strain(const SweepTrajectory& tr, const ConvexSetDesc& sigma, const Mat& basis_U,
                            const WeightedMetric& metric, const Vec& stiffness, const Vec& eps0, double tol) {
    StrainRecord rec;
    if (tr.size() == 0) return rec;
    const Eigen::Index m = tr.y[0].size();
    if (eps0.size() != m || stiffness.size() != m) throw PreconditionError("recover_strain: size mismatch");
    const Vec compat = stiffness.cwiseProduct(eps0) - tr.sigma_tilde[0];
    if (basis_U.cols() < m) {
        const Mat BV = null_space(basis_U.transpose() * metric.matrix());
        if ((BV.transpose() * metric.matrix() * compat).norm() > 1e-8 * std::max(1.0, compat.norm()))
            throw InitialConditionError("initial strain is not compatible");
    }
    Vec acc = Vec::Zero(m);
    for (std::size_t k = 0; k < tr.size(); ++k) {
        Vec omega = Vec::Zero(m);
        bool ok = true;
        if (k > 0) {
            const double dt = tr.times[k] - tr.times[k - 1];
            const Vec ydot = (tr.y[k] - tr.y[k - 1]) / dt;
            auto r = recover_omega(tr.y[k], ydot, sigma, tr.sigma_tilde[k], basis_U, metric, tol);
            ok = r.feasible;
            omega = r.omega;
            acc += omega * dt;
        }
        const Vec eps = eps0 + (tr.sigma_tilde[k] - tr.sigma_tilde[0] + acc).cwiseQuotient(stiffness);
        const Vec eps_el = tr.sigma[k].cwiseQuotient(stiffness);
        rec.times.push_back(tr.times[k]);
        rec.omega.push_back(omega);
        rec.eps.push_back(eps);
        rec.eps_el.push_back(eps_el);
        rec.eps_p.push_back(eps - eps_el);
        rec.feasible.push_back(ok);
        rec.max_omega = std::max(rec.max_omega, omega.cwiseAbs().maxCoeff());
    }
    return rec;
}

void write_csv(std::ostream& os, const StrainRecord& rec) {
    if (rec.times.empty()) return;
    const Eigen::Index m = rec.eps[0].size();
    os << "t";
    for (const char* name : {"omega", "eps", "eps_el", "eps_p"})
        for (Eigen::Index j = 0; j < m; ++j) os << ',' << name << j;
    os << ",feasible\n" << std::setprecision(17);
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
        os << rec.times[k];
        for (const auto* v : {&rec.omega[k], &rec.eps[k], &rec.eps_el[k], &rec.eps_p[k]})
            for (Eigen::Index j = 0; j < m; ++j) os << ',' << (*v)(j);
        os << ',' << (rec.feasible[k] ? 1 : 0) << '\n';
    }
}

double fit_exponent(const std::vector<RefinementRow>& rows) {
    std::vector<double> xs, ys;
    for (const auto& r : rows)
        if (r.max_omega > 1e-12) {
            xs.push_back(std::log(1.0 / r.h));
            ys.push_back(std::log(r.max_omega));
        }
    if (xs.size() < 2) return 0.0;
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) sx += xs[i], sy += ys[i], sxx += xs[i] * xs[i], sxy += xs[i] * ys[i];
    const double den = n * sxx - sx * sx;
    return den > 0 ? (n * sxy - sx * sy) / den : 0.0;
}

RefinementStudy refinement_study(const std::vector<int>& meshes, const std::function<RefinementRow(int)>& run) {
    RefinementStudy st;
    st.rows.resize(meshes.size());
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SWEEPPLAST_THREADS")) threads = std::max(1, std::atoi(env));
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, meshes.size())));
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(meshes.size());
    auto worker = [&] {
        for (std::size_t i; (i = next++) < meshes.size();) {
            try {
                st.rows[i] = run(meshes[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    st.exponent = fit_exponent(st.rows);
    st.regularity_lost = st.exponent >= 0.9;
    return st;
}

double plastic_concentration(const StrainRecord& rec, double h) {
    if (rec.eps_p.size() < 2) return 0.0;
    Vec total = Vec::Zero(rec.eps_p[0].size());
    for (std::size_t k = 1; k < rec.eps_p.size(); ++k) total += h * (rec.eps_p[k] - rec.eps_p[k - 1]).cwiseAbs();
    const double sum = total.sum();
    return sum > 0 ? total.maxCoeff() / sum : 0.0;
}

RefinementRow rod_plastic_run(const RodSpec& base, int N, double dt, double t_end, ElasticPath path) {
    RodSpec spec = base;
    spec.N = N;
    auto rod = assemble_rod(spec);
    auto dec = assemble_network(rod.model);
    MovingSetSpec ms;
    ms.yield_set = make_box(rod.model.sigma_minus, rod.model.sigma_plus);
    ms.basis_V = dec.basis_V;
    ms.sigma_tilde = rod_elastic_path(spec, path);
    ms.metric = dec.metric;
    ms.margin_note = rod.model.margin_note;
    auto tr = catch_up(ms, Vec::Zero(N), uniform_grid(0.0, t_end, dt));
    auto rec = recover_strain(tr, ms.yield_set, dec.basis_U, dec.metric, dec.stiffness,
                              default_initial_strain(dec.stiffness, tr.sigma_tilde[0]));
    RefinementRow row;
    row.N = N;
    row.h = rod.h;
    row.max_omega = rec.max_omega;
    row.concentration = plastic_concentration(rec, rod.h);
    row.feasible = rec.all_feasible();
    return row;
}

void write_csv(std::ostream& os, const RefinementStudy& st) {
    os << "N,h,max_omega,concentration,feasible\n" << std::setprecision(17);
    for (const auto& r : st.rows)
        os << r.N << ',' << r.h << ',' << r.max_omega << ',' << r.concentration << ',' << (r.feasible ? 1 : 0) << '\n';
    os << "# exponent," << st.exponent << ",regularity_lost," << (st.regularity_lost ? 1 : 0) << '\n';
}

} // namespace sweepplast
