#include "sweepplast/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>

#include "sweepplast/errors.hpp"

namespace sweepplast {

MovingSetSpec Problem::moving_set() const {
    MovingSetSpec ms;
    ms.yield_set = yield_set;
    ms.basis_V = dec.basis_V;
    ms.sigma_tilde = sigma_tilde;
    ms.metric = dec.metric;
    ms.margin_note = margin_note;
    return ms;
}

Problem assemble_problem(const Scenario& sc, int mesh) {
    Problem p;
    p.scenario = sc;
    NetworkModel model;
    if (sc.model == ModelKind::Network) {
        model = sc.network;
        p.dec = assemble_network(model);
        auto dec = p.dec;
        auto loads = sc.loads;
        p.sigma_tilde = [dec, loads](double t) { return elastic_stress(dec, loads, t); };
    } else {
        if (mesh > 0) p.scenario.rod.N = mesh;
        auto rod = assemble_rod(p.scenario.rod);
        model = rod.model;
        p.dec = assemble_network(model);
        p.sigma_tilde = rod_elastic_path(p.scenario.rod, sc.rod_path);
        p.midpoints = rod.midpoints;
        p.h = rod.h;
    }
    p.margin_note = model.margin_note;
    const Eigen::Index m = p.dec.stiffness.size();
    if (sc.plasticity != PlasticityKind::None) p.yield_set = make_box(model.sigma_minus, model.sigma_plus);
    if (sc.plasticity == PlasticityKind::Hardening) {
        HardenedModel hm;
        hm.spec = sc.hardening.resolved(m, model.sigma_minus, model.sigma_plus);
        hm.basis_V = p.dec.basis_V;
        hm.sigma_tilde = p.sigma_tilde;
        hm.metric = p.dec.metric;
        hm.xi_weights = sc.model == ModelKind::Rod ? Vec::Constant(m, p.h) : Vec::Ones(m);
        p.hardened = std::move(hm);
    }
    return p;
}

std::vector<double> time_grid(const Problem&, double t_end, double dt) { return uniform_grid(0.0, t_end, dt); }

void write_elastic_csv(std::ostream& os, const Problem& p, const std::vector<double>& grid) {
    const Eigen::Index m = p.elements();
    os << "t";
    for (Eigen::Index j = 0; j < m; ++j) os << ",sigma_tilde" << j;
    os << '\n' << std::setprecision(17);
    for (double t : grid) {
        const Vec s = p.sigma_tilde(t);
        os << t;
        for (Eigen::Index j = 0; j < m; ++j) os << ',' << s(j);
        os << '\n';
    }
}

SweepTrajectory solve_sweeping(const Problem& p, const std::vector<double>& grid) {
    const Eigen::Index m = p.elements();
    if (p.hardened) return hardened_sweep(*p.hardened, grid, Vec::Zero(m), Vec::Zero(m));
    if (p.scenario.plasticity == PlasticityKind::Perfect) return catch_up(p.moving_set(), Vec::Zero(m), grid);
    SweepTrajectory tr;
    for (double t : grid) {
        tr.times.push_back(t);
        tr.y.push_back(Vec::Zero(m));
        tr.sigma_tilde.push_back(p.sigma_tilde(t));
        tr.sigma.push_back(tr.sigma_tilde.back());
        tr.step_norm.push_back(0.0);
        tr.active.push_back("0");
        tr.certificate_residual.push_back(0.0);
    }
    return tr;
}

StrainRecord solve_strain(const Problem& p, const SweepTrajectory& tr, double tol) {
    const Vec& k = p.dec.stiffness;
    if (tr.size() == 0) return {};
    const Vec eps0 = default_initial_strain(k, tr.sigma_tilde[0]);
    if (p.hardened) return hardened_strain_recovery(tr, *p.hardened, k, eps0, tol);
    if (p.scenario.plasticity == PlasticityKind::Perfect)
        return recover_strain(tr, p.yield_set, p.dec.basis_U, p.dec.metric, k, eps0, tol);
    StrainRecord rec;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        rec.times.push_back(tr.times[i]);
        rec.omega.push_back(Vec::Zero(k.size()));
        rec.eps.push_back(tr.sigma[i].cwiseQuotient(k));
        rec.eps_el.push_back(rec.eps.back());
        rec.eps_p.push_back(Vec::Zero(k.size()));
        rec.feasible.push_back(true);
    }
    return rec;
}

RefinementStudy refine_study(const Scenario& sc, const std::vector<int>& meshes, double t_end, double dt) {
    if (sc.model != ModelKind::Rod) throw ParseError("refine-study needs a rod scenario");
    if (sc.plasticity == PlasticityKind::None) throw ParseError("refine-study needs plasticity");
    if (sc.plasticity == PlasticityKind::Hardening)
        return refinement_study(meshes, [&](int N) {
            return hardened_rod_run(sc.rod, N, dt, t_end, sc.rod_path, sc.hardening);
        });
    return refinement_study(meshes, [&](int N) { return rod_plastic_run(sc.rod, N, dt, t_end, sc.rod_path); });
}

CQVerdict check_cq(const Problem& p, double t, double tol) {
    CqOptions opts;
    opts.tol = tol;
    const Vec st = p.sigma_tilde(t);
    const Eigen::Index m = st.size();
    if (p.hardened) {
        Vec shift = Vec::Zero(2 * m);
        shift.head(m) = -st;
        auto c1 = translate(hardened_yield_set(p.hardened->spec, m), shift);
        auto c2 = product({make_subspace(p.dec.basis_V), make_subspace(Mat::Identity(m, m))});
        return cq_test(c1, c2, opts);
    }
    if (p.scenario.plasticity == PlasticityKind::None) throw ParseError("check-cq needs a yield set");
    return cq_test(translate(p.yield_set, -st), make_subspace(p.dec.basis_V), opts);
}

void write_cq_report(std::ostream& os, const CQVerdict& v, const SafeLoadResult* safe) {
    const std::pair<const char*, const CqItem*> items[] = {
        {"slater1", &v.slater1}, {"slater2", &v.slater2}, {"rockafellar", &v.rockafellar},
        {"attouch_brezis", &v.attouch_brezis}};
    for (const auto& [name, it] : items) {
        os << std::left << std::setw(16) << name << to_string(it->status);
        if (it->margin > 0.0) os << "  margin " << std::setprecision(6) << it->margin;
        if (!it->note.empty()) os << "  (" << it->note << ')';
        os << '\n';
    }
    os << "--- cq ---\n";
    for (const auto& [name, it] : items) os << name << '=' << to_string(it->status) << '\n';
    if (safe) {
        os << "safe_load=" << to_string(safe->status) << '\n';
        os << "safe_load_margin=" << std::setprecision(17) << safe->margin << '\n';
        if (!safe->note.empty()) os << "safe_load_note=" << safe->note << '\n';
    }
    os << "chain_consistent=" << (v.chain_consistent() ? "true" : "false") << '\n';
    os << "--- end ---\n";
}

void write_sweep_report(std::ostream& os, const Problem& p, const SweepTrajectory& tr) {
    const auto& sc = p.scenario;
    os << "scenario " << sc.name << ": " << (sc.model == ModelKind::Rod ? "rod" : "network") << ", "
       << p.elements() << " elements, dim V = " << p.dec.basis_V.cols() << ", " << to_string(p.dec.kinematic_class)
       << '\n';
    if (tr.size() == 0) return;
    os << "steps " << tr.size() - 1 << ", t in [" << tr.times.front() << ", " << tr.times.back() << "]\n";
    if (tr.yield_onset)
        os << "yield onset t* = " << std::setprecision(10) << *tr.yield_onset << '\n';
    else
        os << "no yielding on the grid\n";
    const Vec& s = tr.sigma.back();
    const Vec& st = tr.sigma_tilde.back();
    os << "terminal stress at t = " << std::setprecision(10) << tr.times.back() << '\n';
    os << (p.midpoints.size() ? "x" : "element") << ",sigma,sigma_tilde\n" << std::setprecision(10);
    for (Eigen::Index j = 0; j < s.size(); ++j) {
        if (p.midpoints.size()) os << p.midpoints(j);
        else os << j;
        os << ',' << s(j) << ',' << st(j) << '\n';
    }
}

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Data-to-pixel map for one panel.
struct Panel {
    double x0, y0, w, h;  // pixels
    double xmin, xmax, ymin, ymax;

    double px(double x) const { return x0 + (x - xmin) / (xmax - xmin) * w; }
    double py(double y) const { return y0 + h - (y - ymin) / (ymax - ymin) * h; }

    void frame(std::ostream& os, const std::string& title, const std::string& xl, const std::string& yl) const {
        os << "<rect x='" << x0 << "' y='" << y0 << "' width='" << w << "' height='" << h
           << "' fill='none' stroke='#444'/>\n";
        os << "<text x='" << x0 + w / 2 << "' y='" << y0 - 8 << "' text-anchor='middle' font-size='14'>" << title
           << "</text>\n";
        os << "<text x='" << x0 + w / 2 << "' y='" << y0 + h + 34 << "' text-anchor='middle' font-size='12'>" << xl
           << "</text>\n";
        os << "<text x='" << x0 - 40 << "' y='" << y0 + h / 2 << "' text-anchor='middle' font-size='12' transform='rotate(-90 "
           << x0 - 40 << ' ' << y0 + h / 2 << ")'>" << yl << "</text>\n";
        for (int k = 0; k <= 4; ++k) {
            const double xv = xmin + (xmax - xmin) * k / 4.0, yv = ymin + (ymax - ymin) * k / 4.0;
            os << "<text x='" << px(xv) << "' y='" << y0 + h + 16 << "' text-anchor='middle' font-size='10'>" << num(xv)
               << "</text>\n";
            os << "<text x='" << x0 - 6 << "' y='" << py(yv) + 3 << "' text-anchor='end' font-size='10'>" << num(yv)
               << "</text>\n";
        }
    }

    void polyline(std::ostream& os, const std::vector<double>& xs, const std::vector<double>& ys,
                  const std::string& colour, const std::string& extra = "") const {
        os << "<polyline fill='none' stroke='" << colour << "' stroke-width='1.5' " << extra << " points='";
        for (std::size_t i = 0; i < xs.size(); ++i) os << num(px(xs[i])) << ',' << num(py(ys[i])) << ' ';
        os << "'/>\n";
    }
};

void range_of(const std::vector<double>& v, double& lo, double& hi) {
    for (double x : v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
}

void pad(double& lo, double& hi) {
    if (!(hi > lo)) {
        lo -= 1.0;
        hi += 1.0;
    }
    const double d = 0.05 * (hi - lo);
    lo -= d;
    hi += d;
}

const char* kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

} // namespace

void write_svg(std::ostream& os, const Problem& p, const SweepTrajectory& tr) {
    const Eigen::Index m = p.elements();
    const double W = 1000, H = 460;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
       << "' font-family='sans-serif'>\n<rect width='100%' height='100%' fill='white'/>\n";
    std::vector<double> ts = tr.times;

    // Left panel: stress time series for up to eight elements.
    std::vector<Eigen::Index> picks;
    const Eigen::Index shown = std::min<Eigen::Index>(m, 8);
    for (Eigen::Index k = 0; k < shown; ++k) picks.push_back(shown == m ? k : k * (m - 1) / (shown - 1));
    double lo = kInf, hi = -kInf;
    std::vector<std::vector<double>> series;
    for (auto j : picks) {
        std::vector<double> s;
        for (const auto& v : tr.sigma) s.push_back(v(j));
        range_of(s, lo, hi);
        series.push_back(std::move(s));
    }
    double tlo = ts.empty() ? 0.0 : ts.front(), thi = ts.empty() ? 1.0 : ts.back();
    pad(lo, hi);
    Panel left{70, 40, 380, 360, tlo, thi > tlo ? thi : tlo + 1, lo, hi};
    left.frame(os, "stress history", "t", "sigma");
    for (std::size_t k = 0; k < series.size(); ++k) {
        left.polyline(os, ts, series[k], kColours[k % 8]);
        os << "<text x='" << left.x0 + 8 << "' y='" << left.y0 + 14 + 13 * static_cast<double>(k)
           << "' font-size='11' fill='" << kColours[k % 8] << "'>"
           << (p.midpoints.size() ? "x = " + num(p.midpoints(picks[k])) : "element " + std::to_string(picks[k]))
           << "</text>\n";
    }
    if (tr.yield_onset)
        os << "<line x1='" << left.px(*tr.yield_onset) << "' y1='" << left.y0 << "' x2='" << left.px(*tr.yield_onset)
           << "' y2='" << left.y0 + left.h << "' stroke='#888' stroke-dasharray='4 3'/>\n";

    // Right panel: the stress plane for two elements, otherwise the terminal profile.
    if (m == 2 && p.scenario.plasticity != PlasticityKind::None && tr.size()) {
        const auto& box = std::get<Box>(p.yield_set.v);
        std::vector<double> xs{box.lower(0), box.upper(0)}, ys{box.lower(1), box.upper(1)};
        for (std::size_t i = 0; i < tr.size(); ++i) {
            xs.push_back(tr.sigma_tilde[i](0));
            ys.push_back(tr.sigma_tilde[i](1));
        }
        double xl = kInf, xh = -kInf, yl = kInf, yh = -kInf;
        range_of(xs, xl, xh);
        range_of(ys, yl, yh);
        pad(xl, xh);
        pad(yl, yh);
        Panel right{580, 40, 360, 360, xl, xh, yl, yh};
        right.frame(os, "stress plane", "sigma_0", "sigma_1");
        os << "<rect x='" << right.px(box.lower(0)) << "' y='" << right.py(box.upper(1)) << "' width='"
           << right.px(box.upper(0)) - right.px(box.lower(0)) << "' height='"
           << right.py(box.lower(1)) - right.py(box.upper(1)) << "' fill='#eef' stroke='#336'/>\n";
        // Affine lines sigma_tilde(t) + V at a few snapshot times.
        if (p.dec.basis_V.cols() == 1) {
            const Vec v = p.dec.basis_V.col(0).normalized();
            os << "<clipPath id='plane'><rect x='" << right.x0 << "' y='" << right.y0 << "' width='" << right.w
               << "' height='" << right.h << "'/></clipPath>\n";
            for (int k = 0; k <= 4; ++k) {
                const std::size_t i = (tr.size() - 1) * static_cast<std::size_t>(k) / 4;
                const Vec c = tr.sigma_tilde[i];
                const double L = 4.0 * std::max(xh - xl, yh - yl);
                os << "<line x1='" << num(right.px(c(0) - L * v(0))) << "' y1='" << num(right.py(c(1) - L * v(1)))
                   << "' x2='" << num(right.px(c(0) + L * v(0))) << "' y2='" << num(right.py(c(1) + L * v(1)))
                   << "' stroke='#aaa' stroke-dasharray='3 3' clip-path='url(#plane)'/>\n";
            }
        }
        std::vector<double> a, b, c, d;
        for (std::size_t i = 0; i < tr.size(); ++i) {
            a.push_back(tr.sigma_tilde[i](0));
            b.push_back(tr.sigma_tilde[i](1));
            c.push_back(tr.sigma[i](0));
            d.push_back(tr.sigma[i](1));
        }
        right.polyline(os, a, b, "#999");
        right.polyline(os, c, d, "#d62728");
        os << "<text x='" << right.x0 + 8 << "' y='" << right.y0 + 14 << "' font-size='11' fill='#999'>elastic path</text>\n";
        os << "<text x='" << right.x0 + 8 << "' y='" << right.y0 + 27
           << "' font-size='11' fill='#d62728'>stress path</text>\n";
    } else if (tr.size()) {
        std::vector<double> xs, s, st;
        for (Eigen::Index j = 0; j < m; ++j) {
            xs.push_back(p.midpoints.size() ? p.midpoints(j) : static_cast<double>(j));
            s.push_back(tr.sigma.back()(j));
            st.push_back(tr.sigma_tilde.back()(j));
        }
        double xl = kInf, xh = -kInf, yl = kInf, yh = -kInf;
        range_of(xs, xl, xh);
        range_of(s, yl, yh);
        range_of(st, yl, yh);
        pad(xl, xh);
        pad(yl, yh);
        Panel right{580, 40, 360, 360, xl, xh, yl, yh};
        right.frame(os, "terminal stress, t = " + num(tr.times.back()), p.midpoints.size() ? "x" : "element", "sigma");
        right.polyline(os, xs, st, "#999");
        right.polyline(os, xs, s, "#d62728");
        os << "<text x='" << right.x0 + 8 << "' y='" << right.y0 + 14 << "' font-size='11' fill='#999'>elastic</text>\n";
        os << "<text x='" << right.x0 + 8 << "' y='" << right.y0 + 27 << "' font-size='11' fill='#d62728'>plastic</text>\n";
    }
    os << "</svg>\n";
}

} // namespace sweepplast
