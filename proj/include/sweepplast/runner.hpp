#pragma once

#include <iosfwd>
#include <optional>

#include "sweepplast/duality.hpp"
#include "sweepplast/scenario.hpp"
#include "sweepplast/strain.hpp"
#include "sweepplast/sweep.hpp"

namespace sweepplast {

// A scenario with its model assembled.
struct Problem {
    Scenario scenario;
    FundamentalDecomposition dec;
    ConvexSetDesc yield_set;  // perfect plasticity; a box
    std::function<Vec(double)> sigma_tilde;
    Vec midpoints;  // rod only
    double h = 0.0;
    std::string margin_note;
    std::optional<HardenedModel> hardened;

    Eigen::Index elements() const { return dec.stiffness.size(); }
    MovingSetSpec moving_set() const;
};

// mesh > 0 overrides the rod's element count.
Problem assemble_problem(const Scenario& sc, int mesh = 0);

std::vector<double> time_grid(const Problem& p, double t_end, double dt);

void write_elastic_csv(std::ostream& os, const Problem& p, const std::vector<double>& grid);

// Plasticity none yields y = 0 throughout.
SweepTrajectory solve_sweeping(const Problem& p, const std::vector<double>& grid);
StrainRecord solve_strain(const Problem& p, const SweepTrajectory& traj, double tol = 1e-9);

// Rod scenarios only; throws ParseError otherwise.
RefinementStudy refine_study(const Scenario& sc, const std::vector<int>& meshes, double t_end, double dt);

// C1 = Sigma - sigma_tilde(t) and C2 = V, or their hardened counterparts.
CQVerdict check_cq(const Problem& p, double t, double tol = 1e-7);

void write_cq_report(std::ostream& os, const CQVerdict& v, const SafeLoadResult* safe);
void write_sweep_report(std::ostream& os, const Problem& p, const SweepTrajectory& traj);

// Time series, plus the stress-plane picture with Sigma, V and the paths when there are two elements.
void write_svg(std::ostream& os, const Problem& p, const SweepTrajectory& traj);

} // namespace sweepplast
