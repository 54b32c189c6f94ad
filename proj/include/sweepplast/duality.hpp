#pragma once

#include <optional>
#include <string>

#include "sweepplast/convex.hpp"
#include "sweepplast/hardening.hpp"

namespace sweepplast {

enum class DualityVerdict { StrongDuality, GapOrNonAttainment };
const char* to_string(DualityVerdict v);

struct DualityOptions {
    double tol = 1e-7;
    double cap_small = 1e3;  // multiplier caps for the attainment slope test
    double cap_large = 1e6;
};

struct DualityReport {
    double p_star = 0.0;
    double d_star = 0.0;
    bool attained = false;
    std::optional<Vec> y_star;  // metric coordinates: v = y* + (v - y*)
    double gap = 0.0;
    DualityVerdict verdict = DualityVerdict::GapOrNonAttainment;
};

// Primal  inf { -<v, z>_M : z in C1 ∩ C2 },  dual  sup_y -(s1(M y) + s2(M (v - y))).
// Throws PreconditionError unless x is in both sets and v is normal to the intersection at x.
DualityReport duality_check(const ConvexSetDesc& C1, const ConvexSetDesc& C2, const Vec& x, const Vec& v,
                            const WeightedMetric& metric, const DualityOptions& opts = {});

struct AdditivityResult {
    bool holds = false;
    Vec n1, n2;  // v = n1 + n2 when holds
    double residual = 0.0;
};

AdditivityResult additivity_check(const ConvexSetDesc& C1, const ConvexSetDesc& C2, const Vec& x, const Vec& v,
                                  const WeightedMetric& metric, double tol = 1e-8);

enum class CqStatus { Holds, Fails, Undecided };
const char* to_string(CqStatus s);

struct CqItem {
    CqStatus status = CqStatus::Undecided;
    double margin = 0.0;  // inscribed radius or minimal support gap where meaningful
    Vec witness;          // interior point, or a polar direction for failures
    std::string note;
};

struct CQVerdict {
    CqItem slater1, slater2, rockafellar, attouch_brezis;

    // Holds propagates down the chain i => ii => iii => iv.
    bool chain_consistent() const;
};

struct CqOptions {
    double tol = 1e-7;
    unsigned seed = 20240611u;
    int directions_per_dim = 64;
};

// The conditions are metric independent; margins are Euclidean.
CQVerdict cq_test(const ConvexSetDesc& C1, const ConvexSetDesc& C2, const CqOptions& opts = {});

struct GrowthResult {
    bool ok = true;
    std::string violation;  // empty when ok
};

// |xi±(s)| <= psi + c |s| at every node and end slopes bounded by c.
// Throws MalformedCurve unless xi+ is increasing and xi- decreasing.
GrowthResult hardening_growth_check(const PlCurve& xi_minus, const PlCurve& xi_plus, double psi, double c);

} // namespace sweepplast
