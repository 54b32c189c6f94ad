#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "sweepplast/errors.hpp"
#include "sweepplast/runner.hpp"

using namespace sweepplast;

namespace {

std::string scn(const std::string& name) { return std::string(SWEEPPLAST_SCENARIO_DIR) + "/" + name; }

Scenario from_text(const std::string& text) {
    std::istringstream is(text);
    return parse_scenario(is, "inline");
}

const char* kMinimal = R"([model]
kind = network
E = -1 1 0; 0 -1 1
R = 1 0 0; 0 0 1
stiffness = 1 1
sigma_minus = -1 -1
sigma_plus = 1 1
[loads]
prescribed_times = 0 1
prescribed_values = 0 0; 0 1
[time]
t_end = 1
dt = 0.1
)";

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    if (pos != std::string::npos) s.replace(pos, from.size(), to);
    return s;
}

} // namespace

TEST(Scenario, ShippedFilesParseAndRoundTrip) {
    for (const char* name : {"example1.scn", "example2.scn", "rod_section52.scn", "rod_hardening.scn"}) {
        const Scenario a = load_scenario(scn(name));
        std::ostringstream os;
        write_scenario(os, a);
        const Scenario b = from_text(os.str());
        EXPECT_TRUE(same_scenario(a, b)) << name;
        std::ostringstream os2;
        write_scenario(os2, b);
        EXPECT_EQ(os.str(), os2.str()) << name;
    }
}

TEST(Scenario, RoundTripKeepsEveryBit) {
    Scenario a = from_text(kMinimal);
    a.loads.prescribed.values(1, 1) = 0.1 + 0.2;  // not representable in few digits
    a.dt = 1.0 / 3.0;
    a.hardening.kind = HardeningKind::PiecewiseLinearIsotropic;
    a.plasticity = PlasticityKind::Hardening;
    a.hardening.xi_plus = {PlCurve{{0.0, 1.0, 2.0}, {0.0, 1.0 / 7.0, 3.0}}};
    a.hardening.xi_minus = {PlCurve{{-2.0, 0.0}, {2.0, 0.0}}};
    std::ostringstream os;
    write_scenario(os, a);
    const Scenario b = from_text(os.str());
    EXPECT_TRUE(same_scenario(a, b));
    EXPECT_EQ(b.dt, 1.0 / 3.0);
    EXPECT_EQ(b.loads.prescribed.values(1, 1), 0.1 + 0.2);
}

TEST(Scenario, Defaults) {
    const Scenario s = from_text(kMinimal);
    EXPECT_EQ(s.plasticity, PlasticityKind::Perfect);
    EXPECT_EQ(s.loads.forces.width(), 3);
    EXPECT_EQ(s.loads.forces(0.5).norm(), 0.0);
    EXPECT_EQ(s.network.constraint_kind, ConstraintKind::Displacement);
}

TEST(Scenario, Malformed) {
    const std::string base = kMinimal;
    EXPECT_THROW(from_text(replace(base, "prescribed_times = 0 1", "prescribed_times = 1 0")), ParseError);
    EXPECT_THROW(from_text(replace(base, "prescribed_times = 0 1", "prescribed_times = 0 0")), ParseError);
    EXPECT_THROW(from_text(replace(base, "dt = 0.1", "dt = 0.1x")), ParseError);
    EXPECT_THROW(from_text(replace(base, "dt = 0.1", "dt = -1")), ParseError);
    EXPECT_THROW(from_text(replace(base, "t_end = 1", "t_end = 0")), ParseError);
    EXPECT_THROW(from_text(replace(base, "stiffness = 1 1", "stiffness = 1")), ParseError);
    EXPECT_THROW(from_text(replace(base, "sigma_minus = -1 -1", "sigma_minus = 0.5 -1")), ParseError);
    EXPECT_THROW(from_text(replace(base, "E = -1 1 0; 0 -1 1", "E = -1 1 0; 0 -1")), ParseError);
    EXPECT_THROW(from_text(base + "bogus = 1\n"), ParseError);
    EXPECT_THROW(from_text(base + "[extra]\nx = 1\n"), ParseError);
    EXPECT_THROW(from_text(replace(base, "kind = network", "kind = truss")), ParseError);
    EXPECT_THROW(from_text(replace(base, "[time]", "[time]\nno equals sign")), ParseError);
    EXPECT_THROW(from_text(base + "[plasticity]\nkind = hardening\n"), ParseError);
    EXPECT_THROW(load_scenario("/nonexistent/file.scn"), ParseError);
}

TEST(Scenario, HardeningModulusBelowBound) {
    std::string text = kMinimal;
    text += "[plasticity]\nkind = hardening\n[hardening]\nkind = kinematic\nH = 0.5\neta = 1\n";
    EXPECT_THROW(from_text(text), ParseError);
}

TEST(Runner, ExampleOneElasticCsvMatchesClosedForm) {
    const Scenario sc = load_scenario(scn("example1.scn"));
    auto p = assemble_problem(sc);
    const double k1 = sc.network.stiffness(0), k2 = sc.network.stiffness(1);
    std::ostringstream os;
    write_elastic_csv(os, p, time_grid(p, sc.t_end, 0.5));
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "t,sigma_tilde0,sigma_tilde1");
    int rows = 0;
    while (std::getline(is, line)) {
        double t, s0, s1;
        char c1, c2;
        std::istringstream ls(line);
        ls >> t >> c1 >> s0 >> c2 >> s1;
        const double l = sc.loads.prescribed(t)(1), F2 = sc.loads.forces(t)(1);
        EXPECT_NEAR(s0, l / (1 / k1 + 1 / k2) + F2 * k1 / (k1 + k2), 1e-12);
        EXPECT_NEAR(s1, l / (1 / k1 + 1 / k2) - F2 * k2 / (k1 + k2), 1e-12);
        ++rows;
    }
    EXPECT_EQ(rows, 9);
}

TEST(Runner, DeterministicCsv) {
    const Scenario sc = load_scenario(scn("example2.scn"));
    auto run = [&] {
        auto p = assemble_problem(sc);
        auto tr = solve_sweeping(p, time_grid(p, sc.t_end, sc.dt));
        auto rec = solve_strain(p, tr);
        std::ostringstream os;
        write_csv(os, tr);
        write_csv(os, rec);
        return os.str();
    };
    EXPECT_EQ(run(), run());
}

TEST(Runner, ExampleTwoConstraintQualifications) {
    const Scenario sc = load_scenario(scn("example2.scn"));
    auto p = assemble_problem(sc);
    EXPECT_EQ(p.dec.kinematic_class, KinematicClass::InfinitesimallyRigid);
    for (double t : {0.0, 1.5, 3.0}) {
        auto v = check_cq(p, t);
        EXPECT_EQ(v.slater1.status, CqStatus::Holds);
        EXPECT_EQ(v.slater2.status, CqStatus::Holds);
        EXPECT_EQ(v.rockafellar.status, CqStatus::Holds);
        EXPECT_EQ(v.attouch_brezis.status, CqStatus::Holds);
    }
    std::ostringstream os;
    auto v = check_cq(p, 3.0);
    auto safe = safe_load_check(p.moving_set(), 3.0);
    write_cq_report(os, v, &safe);
    EXPECT_NE(os.str().find("attouch_brezis=Holds"), std::string::npos);
    EXPECT_NE(os.str().find("safe_load=StrictOk"), std::string::npos);
}

TEST(Runner, RodReportAndSvg) {
    Scenario sc = load_scenario(scn("rod_section52.scn"));
    auto p = assemble_problem(sc, 10);
    auto tr = solve_sweeping(p, time_grid(p, 3.0, 0.01));
    std::ostringstream rep;
    write_sweep_report(rep, p, tr);
    EXPECT_NE(rep.str().find("yield onset t* = "), std::string::npos) << rep.str();
    ASSERT_TRUE(tr.yield_onset.has_value());
    // midpoint quadrature on 10 elements shifts the onset by O(h^2)
    EXPECT_NEAR(*tr.yield_onset, 7.0 / 3.0, 0.05);
    for (Eigen::Index j = 0; j < 10; ++j) {
        const double x = p.midpoints(j);
        EXPECT_NEAR(tr.sigma.back()(j), 1 - x * x, 0.2);
    }
    std::ostringstream svg;
    write_svg(svg, p, tr);
    EXPECT_EQ(svg.str().rfind("<svg", 0), 0u);
    EXPECT_NE(svg.str().find("</svg>"), std::string::npos);
}

TEST(Runner, ExampleOnePlaneSvg) {
    const Scenario sc = load_scenario(scn("example1.scn"));
    auto p = assemble_problem(sc);
    auto tr = solve_sweeping(p, time_grid(p, sc.t_end, 0.1));
    std::ostringstream svg;
    write_svg(svg, p, tr);
    EXPECT_NE(svg.str().find("stress plane"), std::string::npos);
    EXPECT_NE(svg.str().find("clipPath"), std::string::npos);
}

TEST(Runner, RefineStudyRejectsNetworks) {
    const Scenario sc = load_scenario(scn("example1.scn"));
    EXPECT_THROW(refine_study(sc, {10, 20}, 1.0, 0.1), ParseError);
}

TEST(Runner, OverloadIsASafeLoadViolation) {
    Scenario sc = load_scenario(scn("example1_overload.scn"));
    auto p = assemble_problem(sc);
    try {
        solve_sweeping(p, time_grid(p, sc.t_end, 0.01));
        FAIL() << "expected SafeLoadViolation";
    } catch (const SafeLoadViolation& e) {
        EXPECT_NEAR(e.time, 2.5, 0.011);
    }
    // the same load held constant from t = 0
    sc.loads.forces = PiecewiseLinear::constant(Vec{{0.0, 3.0, 0.0}});
    p = assemble_problem(sc);
    EXPECT_THROW(solve_sweeping(p, time_grid(p, 1.0, 0.1)), SafeLoadViolation);
}
