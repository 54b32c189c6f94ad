// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "sweepplast/duality.hpp"
#include "sweepplast/errors.hpp"
#include "sweepplast/runner.hpp"
#include "random_instances.hpp"

using namespace sweepplast;
using namespace sweepplast::fixtures;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

PiecewiseLinear table(std::vector<double> t, std::vector<double> v) {
    PiecewiseLinear p;
    p.times = t;
    p.values.resize(static_cast<Eigen::Index>(v.size()), 1);
    for (std::size_t i = 0; i < v.size(); ++i) p.values(static_cast<Eigen::Index>(i), 0) = v[i];
    return p;
}

// Rod on (-1, 1), unit stiffness and limits; u_b ramps to 2 over [1, 3]; F = 2x, switched on over [0, 1].
RodSpec rod_data(int N) {
    RodSpec s;
    s.N = N;
    s.u_a = table({0.0}, {0.0});
    s.u_b = table({0, 1, 3}, {0, 0, 2});
    s.body_force.push_back({Poly{0.0, 2.0}, table({0, 1, 3}, {0, 1, 1})});
    return s;
}

// Closed-form elastic stress of rod_data: with C = 1 the weight is 1/2 and the inner integral of 2y from -1 is z^2 - 1.
double rod_closed_form(double t, double x) {
    const double amp = std::min(t, 1.0);
    const double ub = t <= 1.0 ? 0.0 : t - 1.0;
    return 0.5 * (ub + amp * (-4.0 / 3.0)) - amp * (x * x - 1.0);
}

MovingSetSpec rod_moving_set(const RodSpec& rs, ElasticPath path) {
    auto rod = assemble_rod(rs);
    auto dec = assemble_network(rod.model);
    MovingSetSpec s;
    s.yield_set = make_box(rod.model.sigma_minus, rod.model.sigma_plus);
    s.basis_V = dec.basis_V;
    s.sigma_tilde = rod_elastic_path(rs, path);
    s.metric = dec.metric;
    return s;
}

NetworkModel two_springs(double k1, double k2) {
    NetworkModel m;
    m.E = Mat{{-1, 1, 0}, {0, -1, 1}};
    m.R = Mat{{1, 0, 0}, {0, 0, 1}};
    m.stiffness = Vec{{k1, k2}};
    return m;
}

NetworkModel three_springs(double k1, double k2, double k3) {
    NetworkModel m;
    m.E = Mat{{-1, 1, 0, 0}, {0, -1, 1, 0}, {0, 0, -1, 1}};
    m.constraint_kind = ConstraintKind::Elongation;
    m.R = Mat{{1, 1, 0}, {0, 1, 1}};
    m.stiffness = Vec{{k1, k2, k3}};
    return m;
}

double rel_err(const Vec& got, const Vec& want) { return (got - want).norm() / std::max(1.0, want.norm()); }

std::string scenario_path(const char* name) { return std::string(SWEEPPLAST_SCENARIO_DIR) + "/" + name; }

// ---------------------------------------------------------------------------

void pseudoinverse(Outcome& o) {
    const auto t0 = Clock::now();
    std::mt19937 rng(1);
    std::normal_distribution<double> nd;
    std::uniform_int_distribution<int> dim(1, 20);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int r = dim(rng), c = dim(rng);
        Mat A;
        if (trial % 2) {
            const int k = std::uniform_int_distribution<int>(1, std::min(r, c))(rng);
            A = Mat::NullaryExpr(r, k, [&] { return nd(rng); }) * Mat::NullaryExpr(k, c, [&] { return nd(rng); });
        } else {
            A = Mat::NullaryExpr(r, c, [&] { return nd(rng); });
        }
        worst = std::max(worst, penrose_residual(A, pinv(A)));
    }
    const Mat R{{1, 0, 0}, {0, 0, 1}};
    const Mat R_plus{{1, 0}, {0, 0}, {0, 1}};
    const Mat RE = Mat{{1, 1, 0}, {0, 1, 1}} * Mat{{-1, 1, 0, 0}, {0, -1, 1, 0}, {0, 0, -1, 1}};
    const Mat RE_plus = 0.5 * Mat{{-1, 0}, {0, -1}, {1, 0}, {0, 1}};
    const double e1 = (pinv(R) - R_plus).cwiseAbs().maxCoeff();
    const double e2 = (pinv(RE) - RE_plus).cwiseAbs().maxCoeff();
    const double secs = seconds_since(t0);
    o.detail << "max Penrose residual " << worst << ", R+ err " << e1 << ", (RE)+ err " << e2 << ", " << secs << " s";
    o.require(worst <= 1e-9, "Penrose residual");
    o.require(e1 <= 1e-12 && e2 <= 1e-12, "displayed pseudoinverses");
    o.require(secs < 1.0, "runtime");
}

void discrete_elasticity(Outcome& o) {
    const auto t0 = Clock::now();
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> kd(0.1, 10.0), ld(-5.0, 5.0);
    double worst1 = 0.0, worst2 = 0.0;
    int rejected = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const double k1 = kd(rng), k2 = kd(rng), l = ld(rng), F2 = ld(rng);
        auto d = assemble_network(two_springs(k1, k2));
        const Vec want = l / (1 / k1 + 1 / k2) * Vec{{1.0, 1.0}} + F2 / (k1 + k2) * Vec{{k1, -k2}};
        worst1 = std::max(worst1, rel_err(elastic_stress(d, Vec{{0.0, l}}, Vec{{ld(rng), F2, ld(rng)}}), want));
    }
    for (int trial = 0; trial < 100; ++trial) {
        const double k1 = kd(rng), k2 = kd(rng), k3 = kd(rng), l1 = ld(rng), l2 = ld(rng);
        const double F1 = ld(rng), F2 = ld(rng), F3 = ld(rng);
        const Vec F{{F1, F2, F3, -(F1 + F2 + F3)}};
        auto d = assemble_network(three_springs(k1, k2, k3));
        const double c1 = 1 / k1, c2 = 1 / k2, c3 = 1 / k3;
        const Mat G = Mat{{c2 + c3, -c2}, {c3, c1}, {-c2, c1 + c2}} / (c1 * c2 + c2 * c3 + c1 * c3);
        const Vec want = G * Vec{{l1, l2}} + (F1 + F3) / (k1 + k2 + k3) * Vec{{-k1, k2, -k3}};
        worst2 = std::max(worst2, rel_err(elastic_stress(d, Vec{{l1, l2}}, F), want));
        Vec bad = F;
        bad(3) += 0.1 + std::abs(ld(rng));
        try {
            elastic_stress(d, Vec{{l1, l2}}, bad);
        } catch (const UnresolvableLoad&) {
            ++rejected;
        }
    }
    const double secs = seconds_since(t0);
    o.detail << "example 1 rel err " << worst1 << ", example 2 rel err " << worst2 << ", unresolvable rejected "
             << rejected << "/100, " << secs << " s";
    o.require(worst1 <= 1e-10 && worst2 <= 1e-10, "closed forms");
    o.require(rejected == 100, "resolvability");
    o.require(secs < 1.0, "runtime");
}

void rod_convergence(Outcome& o) {
    const auto t0 = Clock::now();
    std::vector<double> errs;
    for (int N : {10, 20, 40, 80}) {
        auto rs = rod_data(N);
        auto rod = assemble_rod(rs);
        const Vec s = rod_elastic_path(rs, ElasticPath::Discrete)(1.0);
        double e = 0.0;
        for (Eigen::Index j = 0; j < N; ++j) e = std::max(e, std::abs(s(j) - rod_closed_form(1.0, rod.midpoints(j))));
        errs.push_back(e);
    }
    double min_factor = 1e300;
    for (std::size_t i = 1; i < errs.size(); ++i) min_factor = std::min(min_factor, errs[i - 1] / errs[i]);
    const double secs = seconds_since(t0);
    o.detail << "errors";
    for (double e : errs) o.detail << ' ' << e;
    o.detail << ", min factor " << min_factor << ", " << secs << " s";
    o.require(min_factor >= 3.0, "convergence factor");
    o.require(secs < 5.0, "runtime");
}

void rod_timeline(Outcome& o) {
    const auto t0 = Clock::now();
    const int N = 160;
    auto rs = rod_data(N);
    auto rod = assemble_rod(rs);
    auto tr = catch_up(rod_moving_set(rs, ElasticPath::ExactIntegral), Vec::Zero(N), uniform_grid(0, 3, 1e-3));
    const std::size_t K = tr.size() - 1;
    const double onset = tr.yield_onset.value_or(-1.0);
    const double slope = (tr.y[K](0) - tr.y[K - 1](0)) / (tr.times[K] - tr.times[K - 1]);
    double terminal = 0.0;
    for (Eigen::Index j = 0; j < N; ++j)
        terminal = std::max(terminal, std::abs(tr.sigma[K](j) - (1 - rod.midpoints(j) * rod.midpoints(j))));
    const double secs = seconds_since(t0);
    o.detail << "t* " << onset << " (err " << std::abs(onset - 7.0 / 3.0) << "), slope " << slope
             << ", terminal err " << terminal << " vs 2h = " << 2 * rod.h << ", " << secs << " s";
    o.require(std::abs(onset - 7.0 / 3.0) <= 1e-4, "onset");
    o.require(std::abs(slope + 0.5) <= 1e-6, "slope");
    o.require(terminal <= 2 * rod.h, "terminal stress");
    o.require(secs < 30.0, "runtime");
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + SWEEPPLAST_CLI + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void regularity_lost(Outcome& o) {
    const auto t0 = Clock::now();
    const RodSpec base = rod_data(10);
    auto st = refinement_study({10, 20, 40, 80, 160},
                               [&](int N) { return rod_plastic_run(base, N, 1e-2, 3.0, ElasticPath::ExactIntegral); });
    double worst = 0.0;
    for (const auto& r : st.rows) worst = std::max(worst, std::abs(r.max_omega / (1 / r.h - 0.5) - 1));
    const auto out = std::filesystem::temp_directory_path() / "sweepplast_acceptance";
    const int code = run_cli("refine-study \"" + scenario_path("rod_section52.scn") +
                             "\" --mesh 10,20,40,80,160 --dt 0.01 --out \"" + out.string() + "\"");
    const double secs = seconds_since(t0);
    o.detail << "max|omega|";
    for (const auto& r : st.rows) o.detail << ' ' << r.max_omega;
    o.detail << ", p " << st.exponent << ", worst rel dev from 1/h - 1/2 " << worst << ", cli exit " << code << ", "
             << secs << " s";
    o.require(st.exponent >= 0.9 && st.exponent <= 1.1, "exponent");
    o.require(worst <= 0.05, "formula");
    o.require(st.regularity_lost, "detector");
    o.require(code == 4, "exit code");
}

// Scalar return mapping for one spring with linear kinematic hardening of modulus Hb.
struct ReturnMap {
    double k, Hb, sy, eps_p = 0.0, alpha = 0.0;
    double update(double eps) {
        const double trial = k * (eps - eps_p);
        const double f = std::abs(trial - alpha) - sy;
        if (f > 0) {
            const double sgn = trial - alpha > 0 ? 1.0 : -1.0;
            const double dg = f / (k + Hb);
            eps_p += sgn * dg;
            alpha += sgn * Hb * dg;
        }
        return k * (eps - eps_p);
    }
};

void hardening_bounded(Outcome& o) {
    const auto t0 = Clock::now();
    HardeningSpec spec;
    spec.H = Vec::Constant(1, 1.0);
    spec.eta = 1.0;
    const RodSpec base = rod_data(10);
    std::vector<double> peaks;
    bool feasible = true;
    for (int N : {10, 20, 40, 80, 160}) {
        auto row = hardened_rod_run(base, N, 1e-2, 3.0, ElasticPath::ExactIntegral, spec);
        feasible = feasible && row.feasible;
        peaks.push_back(row.max_omega);
    }
    const auto [lo, hi] = std::minmax_element(peaks.begin(), peaks.end());
    const double spread = *hi / std::max(*lo, 1e-300);

    double tangent_err = 0.0, oracle_err = 0.0;
    for (double k : {0.5, 1.0, 2.0, 4.0}) {
        NetworkModel m;
        m.E = Mat{{-1, 1}};
        m.R = Mat::Identity(2, 2);
        m.stiffness = Vec::Constant(1, k);
        auto dec = assemble_network(m);
        HardenedModel hm;
        hm.spec = spec.resolved(1, Vec::Constant(1, -1.0), Vec::Constant(1, 1.0));
        hm.basis_V = dec.basis_V;
        hm.metric = dec.metric;
        hm.xi_weights = Vec::Ones(1);
        hm.sigma_tilde = [dec](double t) { return elastic_stress(dec, Vec{{0.0, t}}, Vec::Zero(2)); };
        auto tr = hardened_sweep(hm, uniform_grid(0, 3, 0.01), Vec::Zero(1), Vec::Zero(1));
        ReturnMap rm{k, 1.0, 1.0};
        for (std::size_t i = 0; i < tr.size(); ++i)
            oracle_err = std::max(oracle_err, std::abs(tr.sigma[i](0) - rm.update(tr.times[i])));
        const std::size_t K = tr.size() - 1;
        const double slope = (tr.sigma[K](0) - tr.sigma[K - 1](0)) / (tr.times[K] - tr.times[K - 1]);
        tangent_err = std::max(tangent_err, std::abs(slope - k * 1.0 / (k + 1.0)));
    }
    const double secs = seconds_since(t0);
    o.detail << "max|omega|";
    for (double p : peaks) o.detail << ' ' << p;
    o.detail << ", spread " << spread << ", tangent err " << tangent_err << ", return-map err " << oracle_err << ", "
             << secs << " s";
    o.require(feasible, "feasibility");
    o.require(spread <= 2.0, "spread");
    o.require(tangent_err <= 1e-8 && oracle_err <= 1e-8, "tangent modulus");
    o.require(secs < 60.0, "runtime");
}

void duality_equivalence(Outcome& o) {
    const auto t0 = Clock::now();
    std::mt19937 rng(7);
    int agree = 0, strong = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        auto in = random_instance(rng);
        const bool oracle = brute_force_split(in);
        const auto d = duality_check(in.box, in.sub, in.x, in.v, in.metric);
        const auto a = additivity_check(in.box, in.sub, in.x, in.v, in.metric);
        const bool dual = d.verdict == DualityVerdict::StrongDuality;
        if (dual == a.holds && a.holds == oracle) ++agree;
        strong += dual;
    }
    const auto disc = make_ball(Vec::Zero(2), 1.0);
    const auto seg = make_box(Vec{{-1.0, -1.0}}, Vec{{1.0, -1.0}});
    const Vec x{{0.0, -1.0}}, v{{1.0, 0.0}};
    const auto I = WeightedMetric::identity(2);
    const bool tangency = duality_check(disc, seg, x, v, I).verdict == DualityVerdict::GapOrNonAttainment &&
                          !additivity_check(disc, seg, x, v, I).holds;
    const double secs = seconds_since(t0);
    o.detail << agree << "/1000 agree (" << strong << " strong duality), tangency "
             << (tangency ? "GapOrNonAttainment" : "wrong") << ", " << secs << " s";
    o.require(agree == 1000, "agreement");
    o.require(tangency, "tangency instance");
    o.require(secs < 30.0, "runtime");
}

// Open-interval feasibility gap for the two examples; positive means strictly safe.
double example1_gap(const Scenario& sc, double F2) {
    const Vec& k = sc.network.stiffness;
    const Vec &lo = sc.network.sigma_minus, &hi = sc.network.sigma_plus;
    const double K = k.sum();
    return std::min(hi(0) - F2 * k(0) / K, hi(1) + F2 * k(1) / K) -
           std::max(lo(0) - F2 * k(0) / K, lo(1) + F2 * k(1) / K);
}

// y2 = y1 + y3 with each y_i in its shifted open interval.
double example2_gap(const Scenario& sc, double S) {
    const Vec& k = sc.network.stiffness;
    const Vec &lo = sc.network.sigma_minus, &hi = sc.network.sigma_plus;
    const double K = k.sum();
    const double lo1 = lo(0) + k(0) * S / K, hi1 = hi(0) + k(0) * S / K;
    const double lo2 = lo(1) - k(1) * S / K, hi2 = hi(1) - k(1) * S / K;
    const double lo3 = lo(2) + k(2) * S / K, hi3 = hi(2) + k(2) * S / K;
    return std::min(hi1 + hi3, hi2) - std::max(lo1 + lo3, lo2);
}

void cq_chain(Outcome& o) {
    const auto t0 = Clock::now();
    int checked = 0, broken = 0;
    std::mt19937 rng(7);
    for (int trial = 0; trial < 1000; ++trial) {
        auto in = random_instance(rng);
        broken += !cq_test(in.box, in.sub).chain_consistent();
        ++checked;
    }
    // Round and degenerate pairs, where the conditions can separate.
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(0.2, 1.5);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 2;
        Vec c = Vec::NullaryExpr(n, [&] { return 0.5 * nd(rng); });
        auto ball = make_ball(c, ud(rng));
        Vec lo = Vec::NullaryExpr(n, [&] { return -ud(rng); });
        Vec hi = Vec::NullaryExpr(n, [&] { return ud(rng); });
        if (trial % 3 == 0) hi(0) = lo(0);  // flat box
        auto other = trial % 2 ? make_box(lo, hi) : make_subspace(Mat::NullaryExpr(n, 1, [&] { return nd(rng); }), c + Vec::NullaryExpr(n, [&] { return nd(rng); }));
        broken += !cq_test(ball, other).chain_consistent();
        ++checked;
    }

    // Example scenarios against the interval oracles.
    int safe_ok = 0, safe_total = 0, unsafe_ok = 0, unsafe_total = 0;
    std::uniform_real_distribution<double> kd(0.5, 3.0), sd(0.5, 2.0), fd(-6.0, 6.0);
    for (int trial = 0; trial < 200; ++trial) {
        const bool first = trial % 2 == 0;
        Scenario sc = load_scenario(scenario_path(first ? "example1.scn" : "example2.scn"));
        const Eigen::Index m = sc.network.elements();
        for (Eigen::Index i = 0; i < m; ++i) {
            sc.network.stiffness(i) = kd(rng);
            sc.network.sigma_minus(i) = -sd(rng);
            sc.network.sigma_plus(i) = sd(rng);
        }
        double gap;
        if (first) {
            const double F2 = fd(rng);
            sc.loads.forces = PiecewiseLinear::constant(Vec{{0.0, F2, 0.0}});
            sc.loads.prescribed = PiecewiseLinear::constant(Vec{{0.0, fd(rng)}});
            gap = example1_gap(sc, F2);
        } else {
            const double F1 = fd(rng), F2 = fd(rng), F3 = fd(rng);
            sc.loads.forces = PiecewiseLinear::constant(Vec{{F1, F2, F3, -(F1 + F2 + F3)}});
            sc.loads.prescribed = PiecewiseLinear::constant(Vec{{fd(rng), fd(rng)}});
            gap = example2_gap(sc, F1 + F3);
        }
        if (std::abs(gap) < 1e-6) continue;
        auto p = assemble_problem(sc);
        const auto v = check_cq(p, 0.0);
        const auto safe = safe_load_check(p.moving_set(), 0.0);
        broken += !v.chain_consistent();
        ++checked;
        const bool all_hold = v.slater1.status == CqStatus::Holds && v.slater2.status == CqStatus::Holds &&
                              v.rockafellar.status == CqStatus::Holds && v.attouch_brezis.status == CqStatus::Holds;
        if (gap > 0) {
            ++safe_total;
            safe_ok += all_hold && safe.status == SafeLoadStatus::StrictOk;
        } else {
            ++unsafe_total;
            unsafe_ok += safe.status == SafeLoadStatus::Violated && v.slater1.status == CqStatus::Fails;
        }
    }
    const double secs = seconds_since(t0);
    o.detail << "chain broken " << broken << "/" << checked << ", safe all-Holds " << safe_ok << "/" << safe_total
             << ", beyond threshold Violated " << unsafe_ok << "/" << unsafe_total << ", " << secs << " s";
    o.require(broken == 0, "monotone chain");
    o.require(safe_ok == safe_total && safe_total > 0, "safe loads");
    o.require(unsafe_ok == unsafe_total && unsafe_total > 0, "unsafe loads");
}

void catch_up_order(Outcome& o) {
    const auto t0 = Clock::now();
    const int N = 40;
    const auto spec = rod_moving_set(rod_data(N), ElasticPath::ExactIntegral);
    SweepOptions opts;
    opts.refine_depth = 0;
    std::vector<Vec> terminal;
    for (double dt = 0.1; dt > 0.1 / 32 * 0.99; dt /= 2)
        terminal.push_back(catch_up(spec, Vec::Zero(N), uniform_grid(0, 3, dt), opts).y.back());
    std::vector<double> diffs;
    for (std::size_t i = 1; i < terminal.size(); ++i) diffs.push_back((terminal[i] - terminal[i - 1]).cwiseAbs().maxCoeff());
    double min_ratio = 1e300;
    for (std::size_t i = 1; i < diffs.size(); ++i)
        min_ratio = std::min(min_ratio, diffs[i] > 0 ? diffs[i - 1] / diffs[i] : 0.0);
    const double secs = seconds_since(t0);
    o.detail << "terminal differences";
    for (double d : diffs) o.detail << ' ' << d;
    o.detail << ", min ratio " << min_ratio << ", " << secs << " s";
    o.require(min_ratio >= 1.8, "halving ratio");
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
        {"pseudoinverse", pseudoinverse},
        {"discrete elasticity closed forms", discrete_elasticity},
        {"rod elastic convergence", rod_convergence},
        {"rod yield timeline", rod_timeline},
        {"regularity-lost detector", regularity_lost},
        {"hardening keeps rates bounded", hardening_bounded},
        {"duality equivalence", duality_equivalence},
        {"constraint-qualification chain", cq_chain},
        {"catch-up order", catch_up_order},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        failed += !o.pass;
        std::printf("criterion %zu %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                    o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed ? 1 : 0;
}
