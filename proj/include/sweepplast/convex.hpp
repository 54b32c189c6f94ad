#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "sweepplast/linalg.hpp"
#include "sweepplast/lp.hpp"

namespace sweepplast {

struct ConvexSetDesc;

struct Box {
    Vec lower, upper;
};
struct Ball {
    Vec center;
    double radius = 1.0;
};
struct AffineSubspace {
    Mat basis;  // columns span the direction space (may be 0 columns)
    Vec offset;
};
struct Polyhedron {
    Mat A;
    Vec b;
};
struct Translate {
    std::shared_ptr<const ConvexSetDesc> inner;
    Vec shift;
};
struct Intersection {
    std::vector<ConvexSetDesc> parts;
};
struct Product {
    std::vector<ConvexSetDesc> parts;
};

struct ConvexSetDesc {
    std::variant<Box, Ball, AffineSubspace, Polyhedron, Translate, Intersection, Product> v;

    Eigen::Index dim() const;
    int depth() const;  // leaves have depth 0
};

// Validating constructors.  Throw InvalidSet on violated invariants.
ConvexSetDesc make_box(Vec lower, Vec upper);
ConvexSetDesc make_ball(Vec center, double radius);
ConvexSetDesc make_subspace(Mat basis, Vec offset);
ConvexSetDesc make_subspace(Mat basis);
ConvexSetDesc make_polyhedron(Mat A, Vec b);
ConvexSetDesc translate(ConvexSetDesc inner, Vec shift);
ConvexSetDesc intersect(std::vector<ConvexSetDesc> parts);
ConvexSetDesc product(std::vector<ConvexSetDesc> parts);

// ||S x - c|| <= r + h^T x.  Euclidean norm.
struct SocTerm {
    Mat S;
    Vec c;
    double r = 0.0;
    Vec h;  // empty means zero
};

// {x : Aeq x = beq, A x <= b, every SocTerm holds}.
struct ConicForm {
    Eigen::Index n = 0;
    Mat Aeq;
    Vec beq;
    Mat A;
    Vec b;
    std::vector<SocTerm> soc;

    bool polyhedral() const { return soc.empty(); }
};

ConicForm conic_form(const ConvexSetDesc& set);
bool is_polyhedral(const ConvexSetDesc& set);

// Polytope in coordinates z with x = x0 + N z and A z <= b.
struct ReducedPolytope {
    Vec x0;
    Mat N;
    Mat A;
    Vec b;
};
// Eliminates the equalities of a polyhedral set.  Throws EmptySet when they are inconsistent.
ReducedPolytope reduce(const ConicForm& form);

// max c^T x over a conic form; LP plus outer cutting planes for the SOC terms.
// Returns +inf when unbounded and -inf when empty.
double maximize_linear(const ConicForm& form, const Vec& c, Vec* argmax = nullptr);

bool is_empty(const ConvexSetDesc& set);
bool contains(const ConvexSetDesc& set, const Vec& x, double tol = 1e-9);
double diameter(const ConvexSetDesc& set);

Vec project(const ConvexSetDesc& set, const Vec& point, const WeightedMetric& metric);
double support_function(const ConvexSetDesc& set, const Vec& direction);

struct NormalConeDesc {
    Mat generators;  // columns; M^{-1}-weighted outward directions
    Mat lineality;   // columns
    Vec base;

    bool is_zero() const { return generators.cols() == 0 && lineality.cols() == 0; }
    bool contains(const Vec& v, double tol = 1e-9) const;
};

// tol < 0 selects 1e-8 * diameter (or 1e-8 * max(1, |x|) when unbounded).
// For intersections with round parts this is the sum of the component cones,
// which can be strictly smaller than the true cone at tangencies.
NormalConeDesc normal_cone(const ConvexSetDesc& set, const Vec& point, const WeightedMetric& metric,
                           double tol = -1.0);

// <v, c - x>_M <= 0 for all c in the set, checked through the support function.
bool in_normal_cone(const ConvexSetDesc& set, const Vec& x, const Vec& v, const WeightedMetric& metric,
                    double tol = 1e-9);

std::vector<Vec> enumerate_vertices(const ReducedPolytope& p, double tol = 1e-9);
double hausdorff_distance(const ReducedPolytope& p1, const ReducedPolytope& p2, const WeightedMetric& metric);
double hausdorff_distance(const ConvexSetDesc& s1, const ConvexSetDesc& s2, const WeightedMetric& metric);

} // namespace sweepplast
