#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "sweepplast/errors.hpp"
#include "sweepplast/strain.hpp"

using namespace sweepplast;

namespace {

PiecewiseLinear scalar_table(std::vector<double> t, std::vector<double> v) {
    PiecewiseLinear p;
    p.times = t;
    p.values.resize(static_cast<Eigen::Index>(v.size()), 1);
    for (std::size_t i = 0; i < v.size(); ++i) p.values(static_cast<Eigen::Index>(i), 0) = v[i];
    return p;
}

RodSpec rod_section() {
    RodSpec s;
    s.u_a = scalar_table({0.0}, {0.0});
    s.u_b = scalar_table({0, 1, 3}, {0, 0, 2});
    s.body_force.push_back({Poly{0.0, 2.0}, scalar_table({0, 1, 3}, {0, 1, 1})});
    return s;
}

struct TwoSpringRun {
    FundamentalDecomposition dec;
    MovingSetSpec ms;
    SweepTrajectory tr;
    StrainRecord rec;
};

// Unit springs, l(t) = t, no force; yield limits as given.
TwoSpringRun two_spring_run(Vec lower, Vec upper, double t_end, double dt) {
    NetworkModel m;
    m.E = Mat{{-1, 1, 0}, {0, -1, 1}};
    m.R = Mat{{1, 0, 0}, {0, 0, 1}};
    m.stiffness = Vec::Ones(2);
    TwoSpringRun r{assemble_network(m), {}, {}, {}};
    r.ms.yield_set = make_box(lower, upper);
    r.ms.basis_V = r.dec.basis_V;
    r.ms.metric = r.dec.metric;
    auto dec = r.dec;
    r.ms.sigma_tilde = [dec](double t) { return elastic_stress(dec, Vec{{0.0, t}}, Vec::Zero(3)); };
    r.tr = catch_up(r.ms, Vec::Zero(2), uniform_grid(0, t_end, dt));
    r.rec = recover_strain(r.tr, r.ms.yield_set, r.dec.basis_U, r.dec.metric, r.dec.stiffness,
                           default_initial_strain(r.dec.stiffness, r.tr.sigma_tilde[0]));
    return r;
}

void check_invariants(const TwoSpringRun& r) {
    const auto& rec = r.rec;
    const Mat BV = r.dec.basis_V;
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
        EXPECT_TRUE(rec.feasible[k]);
        EXPECT_LT((rec.eps[k] - rec.eps_el[k] - rec.eps_p[k]).norm(), 1e-12);
        EXPECT_LT((r.dec.stiffness.cwiseProduct(rec.eps_el[k]) - r.tr.sigma[k]).norm(), 1e-12);
        const Vec compat = r.dec.stiffness.cwiseProduct(rec.eps[k]) - r.tr.sigma_tilde[k];
        EXPECT_LT((BV.transpose() * r.dec.metric.matrix() * compat).norm(), 1e-10);
        EXPECT_LT((BV.transpose() * r.dec.metric.matrix() * rec.omega[k]).norm(), 1e-10);
        if (k) {
            const Vec dp = rec.eps_p[k] - rec.eps_p[k - 1];
            EXPECT_TRUE(in_normal_cone(r.ms.yield_set, r.tr.sigma[k], dp, WeightedMetric::identity(2), 1e-9));
        }
    }
}

} // namespace

TEST(Strain, ElasticPhaseGivesZeroOmega) {
    auto r = recover_omega(Vec::Zero(2), Vec::Zero(2), make_box(-Vec::Ones(2), Vec::Ones(2)), Vec{{0.3, 0.3}},
                           Mat(Vec{{1.0, -1.0}}), WeightedMetric::identity(2));
    EXPECT_TRUE(r.feasible);
    EXPECT_TRUE(r.active.empty());
    EXPECT_LT(r.omega.norm(), 1e-15);
}

TEST(Strain, InfeasibleCarriesCertificate) {
    // The state moves along V with no active face: the inclusion has no solution.
    auto r = recover_omega(Vec::Zero(2), Vec{{-0.5, -0.5}}, make_box(-Vec::Ones(2), Vec::Ones(2)), Vec{{0.3, 0.3}},
                           Mat(Vec{{1.0, -1.0}}), WeightedMetric::identity(2));
    EXPECT_FALSE(r.feasible);
    EXPECT_GT(r.farkas.size(), 0);
}

TEST(Strain, SingleSpringYielding) {
    // Spring 1 yields at t = 2; afterwards sigma = (1, 1), eps = (t - 1, 1), eps_p = (t - 2, 0).
    auto r = two_spring_run(Vec{{-1.0, -2.0}}, Vec{{1.0, 2.0}}, 4.0, 0.01);
    check_invariants(r);
    for (std::size_t k = 0; k < r.rec.times.size(); ++k) {
        const double t = r.rec.times[k];
        const Vec eps = t <= 2 ? Vec{{t / 2, t / 2}} : Vec{{t - 1, 1.0}};
        const Vec eps_p = t <= 2 ? Vec::Zero(2) : Vec{{t - 2, 0.0}};
        EXPECT_LT((r.rec.eps[k] - eps).norm(), 1e-9) << t;
        EXPECT_LT((r.rec.eps_p[k] - eps_p).norm(), 1e-9) << t;
        if (t > 2.0 + 1e-9) EXPECT_LT((r.rec.omega[k] - Vec{{0.5, -0.5}}).norm(), 1e-9) << t;
    }
}

TEST(Strain, SymmetricYieldingAnySelectionPasses) {
    auto r = two_spring_run(-Vec::Ones(2), Vec::Ones(2), 4.0, 0.02);
    check_invariants(r);
    for (std::size_t k = 0; k < r.rec.times.size(); ++k)
        EXPECT_NEAR(r.rec.eps[k].sum(), r.rec.times[k], 1e-9);  // total elongation tracks l(t)
}

TEST(Strain, PurelyElasticIntegration) {
    auto r = two_spring_run(-Vec::Constant(2, 10.0), Vec::Constant(2, 10.0), 3.0, 0.1);
    for (std::size_t k = 0; k < r.rec.times.size(); ++k) {
        EXPECT_LT(r.rec.omega[k].norm(), 1e-15);
        EXPECT_LT((r.rec.eps[k] - r.tr.sigma_tilde[k]).norm(), 1e-12);
    }
    EXPECT_EQ(r.rec.max_omega, 0.0);
}

TEST(Strain, RodPeakRateFormula) {
    for (int N : {10, 20, 40}) {
        RodSpec s = rod_section();
        s.N = N;
        auto rod = assemble_rod(s);
        auto dec = assemble_network(rod.model);
        MovingSetSpec ms;
        ms.yield_set = make_box(rod.model.sigma_minus, rod.model.sigma_plus);
        ms.basis_V = dec.basis_V;
        ms.sigma_tilde = rod_elastic_path(s, ElasticPath::ExactIntegral);
        ms.metric = dec.metric;
        auto tr = catch_up(ms, Vec::Zero(N), uniform_grid(0, 3, 0.01));
        auto rec = recover_strain(tr, ms.yield_set, dec.basis_U, dec.metric, dec.stiffness,
                                  default_initial_strain(dec.stiffness, tr.sigma_tilde[0]));
        const double h = rod.h;
        ASSERT_TRUE(rec.all_feasible());
        EXPECT_NEAR(rec.max_omega, 1.0 / h - 0.5, 1e-8);
        const Vec& w = rec.omega.back();
        Eigen::Index jstar;
        w.maxCoeff(&jstar);
        for (Eigen::Index j = 0; j < N; ++j)
            if (j != jstar) EXPECT_NEAR(w(j), -0.5, 1e-9);
        EXPECT_NEAR(h * w.sum(), 0.0, 1e-9);  // mass balance
        EXPECT_NEAR(std::abs(rod.midpoints(jstar)), h / 2, 1e-12);
        EXPECT_NEAR(plastic_concentration(rec, h), 1.0, 1e-9);
    }
}

TEST(Strain, ExponentFit) {
    std::vector<RefinementRow> rows;
    for (int N : {10, 20, 40, 80}) rows.push_back({N, 2.0 / N, N / 2.0 - 0.5, 1.0, true});
    EXPECT_NEAR(fit_exponent(rows), 1.0, 0.05);
    for (auto& r : rows) r.max_omega = 0.0;
    EXPECT_EQ(fit_exponent(rows), 0.0);
    for (auto& r : rows) r.max_omega = 3.0;
    EXPECT_NEAR(fit_exponent(rows), 0.0, 1e-12);
}

TEST(Strain, RefinementStudyFlagsRod) {
    const RodSpec s = rod_section();
    auto st = refinement_study({10, 20, 40}, [&](int N) { return rod_plastic_run(s, N, 0.02, 3.0, ElasticPath::ExactIntegral); });
    ASSERT_EQ(st.rows.size(), 3u);
    EXPECT_EQ(st.rows[0].N, 10);
    EXPECT_TRUE(st.regularity_lost);
    EXPECT_GE(st.exponent, 0.9);
    EXPECT_LE(st.exponent, 1.1);
    auto elastic = refinement_study({10, 20}, [&](int N) { return rod_plastic_run(s, N, 0.05, 2.0, ElasticPath::ExactIntegral); });
    EXPECT_FALSE(elastic.regularity_lost);
    EXPECT_EQ(elastic.exponent, 0.0);
    for (const auto& r : elastic.rows) EXPECT_EQ(r.max_omega, 0.0);
    std::ostringstream os;
    write_csv(os, st);
    EXPECT_NE(os.str().find("exponent"), std::string::npos);
}
