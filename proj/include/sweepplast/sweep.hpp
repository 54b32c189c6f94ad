#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sweepplast/convex.hpp"

namespace sweepplast {

// C(t) = (Sigma - sigma_tilde(t)) ∩ V, all in stress coordinates.
struct MovingSetSpec {
    ConvexSetDesc yield_set;
    Mat basis_V;  // m x d, orthonormal columns preferred
    std::function<Vec(double)> sigma_tilde;
    WeightedMetric metric;
    std::string margin_note;

    ConvexSetDesc at(double t) const;
};

struct SweepOptions {
    int refine_depth = 4;          // bisections allowed where the active set changes
    double onset_tol = 1e-6;       // width of the final yield-onset bracket
    double active_tol = 1e-9;      // relative slack counted as active
    double motion_tol = 1e-12;     // step norms below this count as stationary
};

struct SweepTrajectory {
    std::vector<double> times;
    std::vector<Vec> y, sigma, sigma_tilde;
    std::vector<double> step_norm;             // ||y_k - y_{k-1}||_M, zero at k = 0
    std::vector<std::string> active;           // hex bitmask over the yield rows
    std::vector<double> certificate_residual;  // normal-cone residual of each catch-up step
    std::optional<double> yield_onset;
    std::vector<Vec> xi;                       // internal variables, hardening runs only

    std::size_t size() const { return times.size(); }
};

std::vector<double> uniform_grid(double t0, double t1, double dt);

// Moreau catch-up: y_{k+1} = proj_M(C(t_{k+1}), y_k).
// Throws InitialConditionError when y0 is outside C(t0) and SafeLoadViolation
// when some C(t_k) is empty.
SweepTrajectory catch_up(const MovingSetSpec& spec, const Vec& y0, const std::vector<double>& grid,
                         const SweepOptions& opts = {});

// max_i d_H(C(t_i), C(t_{i+1})) / (t_{i+1} - t_i); polyhedral sets, dim V <= 3.
double lipschitz_estimate(const MovingSetSpec& spec, const std::vector<double>& grid);

enum class SafeLoadStatus { StrictOk, DegenerateOk, Violated };
const char* to_string(SafeLoadStatus s);

struct SafeLoadResult {
    SafeLoadStatus status = SafeLoadStatus::Violated;
    double margin = 0.0;  // signed inscribed radius, Euclidean stress units
    Vec witness;          // y attaining the margin
    std::string note;
};

// Largest rho with a ball of radius rho around some sigma_tilde(t) + y, y in V, inside Sigma.
SafeLoadResult safe_load_check(const MovingSetSpec& spec, double t, double tol = 1e-10);

void write_csv(std::ostream& os, const SweepTrajectory& traj);

// ---- building blocks shared with the hardening solver -----------------------

// Yield rows A sigma <= b of a polyhedral yield set, equalities doubled.
struct YieldRows {
    Mat A;
    Vec b;
};
YieldRows yield_rows(const ConvexSetDesc& sigma);
std::string hex_mask(const std::vector<bool>& bits);

} // namespace sweepplast
