#pragma once

#include <functional>
#include <ostream>
#include <vector>

#include "sweepplast/elastic.hpp"
#include "sweepplast/sweep.hpp"

namespace sweepplast {

struct OmegaResult {
    bool feasible = false;
    Vec omega;
    Vec lambda;                          // one per active row
    std::vector<Eigen::Index> active;    // indices into yield_rows(Sigma)
    Vec farkas;                          // certificate over the V-coordinates when infeasible
    double residual = 0.0;               // |B_V^T M omega|
};

// omega in (N^M_{Sigma - sigma_tilde}(y) + ydot) ∩ U, minimizing the total multiplier mass.
OmegaResult recover_omega(const Vec& y, const Vec& ydot, const ConvexSetDesc& sigma, const Vec& sigma_tilde,
                          const Mat& basis_U, const WeightedMetric& metric, double tol = 1e-9);

struct StrainRecord {
    std::vector<double> times;
    std::vector<Vec> omega, eps, eps_el, eps_p;
    std::vector<bool> feasible;
    double max_omega = 0.0;  // max_k ||omega_k||_inf

    bool all_feasible() const;
};

Vec default_initial_strain(const Vec& stiffness, const Vec& sigma_tilde0);

// Backward-difference rates on each interval, then
// eps_k = eps0 + C^{-1}(sigma_tilde_k - sigma_tilde_0 + sum_{j<=k} omega_j dt_j).
StrainRecord recover_strain(const SweepTrajectory& traj, const ConvexSetDesc& sigma, const Mat& basis_U,
                            const WeightedMetric& metric, const Vec& stiffness, const Vec& eps0, double tol = 1e-9);

void write_csv(std::ostream& os, const StrainRecord& rec);

struct RefinementRow {
    int N = 0;
    double h = 0.0;
    double max_omega = 0.0;
    double concentration = 0.0;  // share of plastic elongation carried by one element
    bool feasible = true;
};

struct RefinementStudy {
    std::vector<RefinementRow> rows;
    double exponent = 0.0;  // p in max|omega| ~ h^{-p}
    bool regularity_lost = false;
};

// One run per mesh, executed on SWEEPPLAST_THREADS worker threads (default: hardware concurrency).
RefinementStudy refinement_study(const std::vector<int>& meshes, const std::function<RefinementRow(int)>& run);
double fit_exponent(const std::vector<RefinementRow>& rows);

// Perfectly plastic rod at N elements: catch-up followed by strain recovery.
RefinementRow rod_plastic_run(const RodSpec& base, int N, double dt, double t_end, ElasticPath path);
double plastic_concentration(const StrainRecord& rec, double h);

void write_csv(std::ostream& os, const RefinementStudy& study);

} // namespace sweepplast
