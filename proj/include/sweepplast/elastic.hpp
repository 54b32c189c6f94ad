#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sweepplast/linalg.hpp"

namespace sweepplast {

// Piecewise-linear map t -> R^k given by breakpoint rows; clamped outside the table.
struct PiecewiseLinear {
    std::vector<double> times;
    Mat values;  // times.size() x k

    static PiecewiseLinear constant(const Vec& v);
    Eigen::Index width() const { return values.cols(); }
    Vec operator()(double t) const;
    // Largest slope over all segments, per component max-abs.
    double lipschitz() const;
    void validate(const std::string& what) const;
};

enum class ConstraintKind { Displacement, Elongation };

struct NetworkModel {
    Mat E;  // elements x nodes
    ConstraintKind constraint_kind = ConstraintKind::Displacement;
    Mat R;  // constraint rows, acting on u (Displacement) or on E u (Elongation)
    Vec stiffness;
    Vec sigma_minus, sigma_plus;  // empty when no yield data
    std::string margin_note;

    Eigen::Index elements() const { return E.rows(); }
    Eigen::Index nodes() const { return E.cols(); }
};

// Prescribed constraint values d(t) (R u = d or R E u = d) and nodal forces F(t).
struct LoadProgram {
    PiecewiseLinear prescribed;
    PiecewiseLinear forces;

    std::vector<double> breakpoints() const;
};

enum class KinematicClass { Determinate, InfinitesimallyRigid, Mechanism };
const char* to_string(KinematicClass k);

struct FundamentalDecomposition {
    WeightedMetric metric;  // C^{-1}
    Vec stiffness;
    Mat E, Ru, Ru_pinv, R0, ER0;
    Mat basis_U, basis_V;
    Mat P_U, P_V, G;
    Eigen::Index kernel_dim = 0;
    KinematicClass kinematic_class = KinematicClass::Determinate;
};

FundamentalDecomposition assemble_network(const NetworkModel& model);

Vec dirichlet_offset(const FundamentalDecomposition& dec, const Vec& prescribed);
// The element of U balancing the nodal forces.  Throws UnresolvableLoad.
Vec resolve_force(const FundamentalDecomposition& dec, const Vec& forces);
Vec elastic_stress(const FundamentalDecomposition& dec, const Vec& prescribed, const Vec& forces);
Vec elastic_stress(const FundamentalDecomposition& dec, const LoadProgram& loads, double t);
Vec elastic_strain(const Vec& stiffness, const Vec& stress);

// ---- discretized rod ------------------------------------------------------

using Poly = std::vector<double>;  // ascending coefficients
double poly_eval(const Poly& p, double x);
Poly poly_antiderivative(const Poly& p);

struct BodyForceTerm {
    Poly shape;                 // F(t, x) += shape(x) * amplitude(t)
    PiecewiseLinear amplitude;  // width 1
};

struct RodSpec {
    double a = -1.0, b = 1.0;
    int N = 10;
    Poly stiffness{1.0};
    Poly sigma_minus{-1.0}, sigma_plus{1.0};
    PiecewiseLinear u_a, u_b;  // width 1
    std::vector<BodyForceTerm> body_force;

    double h() const { return (b - a) / N; }
    void validate() const;
};

struct AssembledRod {
    NetworkModel model;
    LoadProgram loads;
    Vec midpoints;
    double h = 0.0;
};

AssembledRod assemble_rod(const RodSpec& spec);

// Closed-form continuum stress at time t sampled at the points xs.
Vec rod_exact_stress(const RodSpec& spec, double t, const Vec& xs);

enum class ElasticPath { Discrete, ExactIntegral };
std::function<Vec(double)> rod_elastic_path(const RodSpec& spec, ElasticPath path);

} // namespace sweepplast
