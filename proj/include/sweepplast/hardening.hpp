#pragma once

#include <functional>
#include <vector>

#include "sweepplast/convex.hpp"
#include "sweepplast/strain.hpp"
#include "sweepplast/sweep.hpp"

namespace sweepplast {

// Piecewise-linear curve with linear extrapolation beyond the end samples.
struct PlCurve {
    std::vector<double> x, y;

    double operator()(double s) const;
    double slope(std::size_t segment) const;
    std::size_t segments() const { return x.size() - 1; }
    // Throws MalformedCurve unless strictly monotone in the given direction and convex.
    void validate(bool increasing, const char* what) const;
};

enum class HardeningKind { LinearKinematic, PiecewiseLinearIsotropic };

// Per-element data; vectors of size 1 are broadcast to every element.
struct HardeningSpec {
    HardeningKind kind = HardeningKind::LinearKinematic;
    Vec H;                              // kinematic moduli
    Vec offset_minus, offset_plus;      // kinematic offsets; empty selects the model's yield limits
    std::vector<PlCurve> xi_minus;      // isotropic: decreasing convex curves xi(sigma)
    std::vector<PlCurve> xi_plus;       // isotropic: increasing convex curves xi(sigma)
    double eta = 0.0;                   // lower bound for H

    // Broadcasts and fills defaults for m elements; throws InvalidModel or MalformedCurve.
    HardeningSpec resolved(Eigen::Index m, const Vec& sigma_minus, const Vec& sigma_plus) const;
};

// a_sigma * sigma_j + a_xi * xi_j <= b.
struct ElementRow {
    Eigen::Index element;
    double a_sigma, a_xi, b;
};
std::vector<ElementRow> hardening_rows(const HardeningSpec& resolved, Eigen::Index m);

// The augmented elastic range in (sigma, xi) coordinates.
ConvexSetDesc hardened_yield_set(const HardeningSpec& resolved, Eigen::Index m);
// (Sigma_hat - (sigma_tilde, 0)) ∩ (V x R^m).
ConvexSetDesc hardened_moving_set(const HardeningSpec& resolved, const Vec& sigma_tilde, const Mat& basis_V);

struct HardenedModel {
    HardeningSpec spec;  // resolved
    Mat basis_V;
    std::function<Vec(double)> sigma_tilde;
    WeightedMetric metric;  // C^{-1} on the stress block
    Vec xi_weights;         // diagonal metric on xi; 1 for networks, h for the rod
};

// Catch-up in the product metric; trajectory.xi holds the internal variables.
SweepTrajectory hardened_sweep(const HardenedModel& model, const std::vector<double>& grid, const Vec& y0,
                               const Vec& xi0, const SweepOptions& opts = {});

// Throws InternalError if some step has an empty right-hand side.
StrainRecord hardened_strain_recovery(const SweepTrajectory& traj, const HardenedModel& model, const Vec& stiffness,
                                      const Vec& eps0, double tol = 1e-9);

RefinementRow hardened_rod_run(const RodSpec& base, int N, double dt, double t_end, ElasticPath path,
                               const HardeningSpec& spec);

} // namespace sweepplast
