#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "sweepplast/duality.hpp"
#include "sweepplast/errors.hpp"
#include "random_instances.hpp"

using namespace sweepplast;
using namespace sweepplast::fixtures;

namespace {

ConvexSetDesc unit_disc() { return make_ball(Vec::Zero(2), 1.0); }
ConvexSetDesc bottom_segment() { return make_box(Vec{{-1.0, -1.0}}, Vec{{1.0, -1.0}}); }

} // namespace

TEST(Duality, BoxAndLine) {
    auto box = make_box(-Vec::Ones(2), Vec::Ones(2));
    auto line = make_subspace(Mat(Vec{{1.0, 1.0}}));
    const Vec x{{1.0, 1.0}}, v{{1.0, 1.0}};
    auto r = duality_check(box, line, x, v, WeightedMetric::identity(2));
    EXPECT_NEAR(r.p_star, -2.0, 1e-9);
    EXPECT_NEAR(r.d_star, -2.0, 1e-9);
    EXPECT_TRUE(r.attained);
    ASSERT_TRUE(r.y_star.has_value());
    EXPECT_LT((*r.y_star - Vec{{1.0, 1.0}}).norm(), 1e-8);
    EXPECT_EQ(r.verdict, DualityVerdict::StrongDuality);
    auto a = additivity_check(box, line, x, v, WeightedMetric::identity(2));
    EXPECT_TRUE(a.holds);
    EXPECT_LT((a.n1 + a.n2 - v).norm(), 1e-9);
}

TEST(Duality, DiscSegmentTangency) {
    const Vec x{{0.0, -1.0}}, v{{1.0, 0.0}};
    auto r = duality_check(unit_disc(), bottom_segment(), x, v, WeightedMetric::identity(2));
    EXPECT_NEAR(r.p_star, 0.0, 1e-12);
    EXPECT_LE(r.d_star, r.p_star + 1e-9);
    EXPECT_GT(r.d_star, -1e-3);  // infimum 0 is approached
    EXPECT_FALSE(r.attained);
    EXPECT_EQ(r.verdict, DualityVerdict::GapOrNonAttainment);
    EXPECT_FALSE(additivity_check(unit_disc(), bottom_segment(), x, v, WeightedMetric::identity(2)).holds);
}

TEST(Duality, ZeroNormal) {
    auto r = duality_check(unit_disc(), bottom_segment(), Vec{{0.0, -1.0}}, Vec::Zero(2), WeightedMetric::identity(2));
    EXPECT_NEAR(r.p_star, 0.0, 1e-12);
    EXPECT_NEAR(r.d_star, 0.0, 1e-9);
    EXPECT_TRUE(r.attained);
    EXPECT_LT(r.y_star->norm(), 1e-8);
    EXPECT_EQ(r.verdict, DualityVerdict::StrongDuality);
}

TEST(Duality, PreconditionViolations) {
    auto box = make_box(-Vec::Ones(2), Vec::Ones(2));
    auto line = make_subspace(Mat(Vec{{1.0, 1.0}}));
    const auto I = WeightedMetric::identity(2);
    EXPECT_THROW(duality_check(box, line, Vec{{1.0, 1.0}}, Vec{{-1.0, 0.0}}, I), PreconditionError);
    EXPECT_THROW(duality_check(box, line, Vec{{0.5, 0.0}}, Vec::Zero(2), I), PreconditionError);
}

TEST(Duality, NormalOfFirstSetOnly) {
    auto box = make_box(-Vec::Ones(2), Vec::Ones(2));
    auto plane = make_subspace(Mat::Identity(2, 2), Vec::Zero(2));
    auto a = additivity_check(box, plane, Vec{{1.0, 0.3}}, Vec{{2.0, 0.0}}, WeightedMetric::identity(2));
    EXPECT_TRUE(a.holds);
    EXPECT_LT(a.n2.norm(), 1e-12);
    EXPECT_LT((a.n1 - Vec{{2.0, 0.0}}).norm(), 1e-9);
}

TEST(Duality, RandomBoxSubspaceAgreesWithFaceEnumeration) {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 150; ++trial) {
        auto in = random_instance(rng);
        auto r = duality_check(in.box, in.sub, in.x, in.v, in.metric);
        auto a = additivity_check(in.box, in.sub, in.x, in.v, in.metric);
        const bool oracle = brute_force_split(in);
        EXPECT_TRUE(oracle) << trial;
        EXPECT_EQ(a.holds, oracle) << trial;
        EXPECT_EQ(r.verdict == DualityVerdict::StrongDuality, oracle) << trial;
        EXPECT_GE(r.p_star, r.d_star - 1e-9 * (1.0 + std::abs(r.p_star))) << trial << " gap " << r.gap;
        if (a.holds) {
            EXPECT_LT((a.n1 + a.n2 - in.v).norm(), 1e-7);
            EXPECT_TRUE(in_normal_cone(in.box, in.x, a.n1, in.metric, 1e-7));
            EXPECT_TRUE(in_normal_cone(in.sub, in.x, a.n2, in.metric, 1e-7));
        }
        if (r.y_star) {
            // y* splits v into normals of the two sets.
            EXPECT_TRUE(in_normal_cone(in.box, in.x, *r.y_star, in.metric, 1e-6)) << trial;
            EXPECT_TRUE(in_normal_cone(in.sub, in.x, in.v - *r.y_star, in.metric, 1e-6)) << trial;
        }
    }
}

TEST(Cq, TwoSpringNetworkAllHold) {
    // Box of yield limits shifted by a safe elastic stress, against V = span(1, 1).
    const Vec st{{0.3, 0.1}};
    auto c1 = make_box(-Vec::Ones(2) - st, Vec::Ones(2) - st);
    auto c2 = make_subspace(Mat(Vec{{1.0, 1.0}}));
    auto cq = cq_test(c1, c2);
    EXPECT_EQ(cq.slater1.status, CqStatus::Holds);
    EXPECT_EQ(cq.slater2.status, CqStatus::Holds);
    EXPECT_EQ(cq.rockafellar.status, CqStatus::Holds);
    EXPECT_EQ(cq.attouch_brezis.status, CqStatus::Holds);
    // Points c(1, 1) with a rho-ball in the box: -1.1 + rho <= c <= 0.7 - rho, so rho = 0.9.
    EXPECT_NEAR(cq.slater1.margin, 0.9, 1e-8);
    EXPECT_TRUE(cq.chain_consistent());
}

TEST(Cq, DiscSegmentAllFail) {
    auto cq = cq_test(unit_disc(), bottom_segment());
    EXPECT_EQ(cq.slater1.status, CqStatus::Fails);
    EXPECT_EQ(cq.slater2.status, CqStatus::Fails);
    EXPECT_EQ(cq.rockafellar.status, CqStatus::Fails);
    EXPECT_EQ(cq.attouch_brezis.status, CqStatus::Fails);
    ASSERT_EQ(cq.rockafellar.witness.size(), 2);
    EXPECT_LT((cq.rockafellar.witness - Vec{{0.0, -1.0}}).norm(), 1e-6);
}

TEST(Cq, IdenticalBoxes) {
    auto b = make_box(-Vec::Ones(3), Vec::Ones(3));
    auto cq = cq_test(b, b);
    EXPECT_EQ(cq.slater1.status, CqStatus::Holds);
    EXPECT_NEAR(cq.slater1.margin, 1.0, 1e-9);
    EXPECT_TRUE(cq.chain_consistent());
}

TEST(Cq, TouchingBoxesSatisfyOnlyTheGeneralCondition) {
    // Polyhedral sets meeting in a corner: cone(C1 - C2) is a closed halfplane-free
    // quadrant, so nothing holds; two lines through a point give a subspace.
    auto a = make_box(Vec::Zero(2), Vec::Ones(2));
    auto b = make_box(-Vec::Ones(2), Vec::Zero(2));
    auto cq = cq_test(a, b);
    EXPECT_EQ(cq.slater1.status, CqStatus::Fails);
    EXPECT_EQ(cq.rockafellar.status, CqStatus::Fails);
    EXPECT_EQ(cq.attouch_brezis.status, CqStatus::Fails);

    auto l1 = make_subspace(Mat(Vec{{1.0, 0.0, 0.0}}), Vec::Zero(3));
    auto l2 = make_subspace(Mat(Vec{{0.0, 1.0, 0.0}}), Vec::Zero(3));
    auto cq2 = cq_test(l1, l2);
    EXPECT_EQ(cq2.slater1.status, CqStatus::Fails);
    EXPECT_EQ(cq2.slater2.status, CqStatus::Fails);
    EXPECT_EQ(cq2.rockafellar.status, CqStatus::Fails);
    EXPECT_EQ(cq2.attouch_brezis.status, CqStatus::Holds);
}

TEST(Cq, DisjointSets) {
    auto cq = cq_test(make_box(Vec::Zero(2), Vec::Ones(2)), make_ball(Vec::Constant(2, 5.0), 1.0));
    EXPECT_EQ(cq.slater1.status, CqStatus::Fails);
    EXPECT_EQ(cq.attouch_brezis.status, CqStatus::Fails);
}

TEST(Cq, ChainOnRandomInstances) {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        auto in = random_instance(rng);
        auto cq = cq_test(in.box, in.sub);
        EXPECT_TRUE(cq.chain_consistent()) << trial;
        // The subspace passes through an interior point of the box.
        EXPECT_EQ(cq.slater1.status, CqStatus::Holds) << trial;
    }
    // Lower-dimensional boxes meeting a subspace on a face.
    for (int trial = 0; trial < 20; ++trial) {
        auto b = make_box(Vec{{0.0, -1.0, -1.0}}, Vec{{0.0, 1.0, 1.0}});
        std::normal_distribution<double> g;
        Mat B(3, 2);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 2; ++j) B(i, j) = g(rng);
        auto cq = cq_test(b, make_subspace(B, Vec::Zero(3)));
        EXPECT_TRUE(cq.chain_consistent()) << trial;
        EXPECT_EQ(cq.attouch_brezis.status, CqStatus::Holds) << trial;
    }
}

TEST(Growth, LinearCurvesPass) {
    for (double H : {0.5, 1.0, 4.0}) {
        PlCurve plus{{-2, 0, 3}, {-2 / H, 0, 3 / H}};
        PlCurve minus{{-2, 0, 3}, {2 / H, 0, -3 / H}};
        auto r = hardening_growth_check(minus, plus, 0.0, 1.0 / H);
        EXPECT_TRUE(r.ok) << r.violation;
        EXPECT_FALSE(hardening_growth_check(minus, plus, 0.0, 0.5 / H).ok);
    }
}

TEST(Growth, QuadraticFails) {
    PlCurve plus{{0, 1, 2, 3, 4, 5}, {0, 1, 4, 9, 16, 25}};
    PlCurve minus{{0, 5}, {0, -5}};
    auto r = hardening_growth_check(minus, plus, 1.0, 1.0);
    EXPECT_FALSE(r.ok);
    EXPECT_NE(r.violation.find("xi+"), std::string::npos);
}

TEST(Growth, ConstantCurveRejected) {
    PlCurve flat{{0, 1}, {2, 2}};
    PlCurve minus{{0, 1}, {0, -1}};
    EXPECT_THROW(hardening_growth_check(minus, flat, 1.0, 1.0), MalformedCurve);
}
