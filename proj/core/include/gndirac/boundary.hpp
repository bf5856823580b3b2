#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gndirac/model.hpp"

namespace gndirac {

/// Moving boundary x = z(t) with reflection coefficient lambda(t), imposing
/// u(z(t),t) = lambda(t) v(z(t),t).
struct BoundaryCurve {
    enum class Kind { static_wall, linear, collapsing, custom };

    Kind kind = Kind::static_wall;
    std::function<double(double)> z;
    std::function<double(double)> z_t;
    std::function<double(double)> z_tt;
    std::function<complex(double)> lambda;
    std::function<complex(double)> lambda_t;

    // preset parameters, kept for serialization
    double c = 0.0;
    double T0 = 1.0;
    complex lambda_const = 1.0;
    bool equality_case = false;

    static BoundaryCurve static_wall(complex lambda);
    static BoundaryCurve linear(double c, complex lambda);
    /// z_t = -tanh(t/T0), z = -T0 log cosh(t/T0). The boundary accelerates
    /// towards the speed of light.
    static BoundaryCurve collapsing(double T0, complex lambda);

    /// Same geometry with lambda replaced by the (H2) equality value.
    BoundaryCurve with_equality_lambda() const;
};

std::string to_string(BoundaryCurve::Kind kind);
BoundaryCurve::Kind boundary_kind_from_string(const std::string& name);

/// lambda(t) = sqrt((1+z_t)/(1-z_t)).
double equality_lambda(double z_t);

struct ValidationReport {
    bool h1_ok = true;
    bool h2_ok = true;
    bool h2_equality_everywhere = true;
    double h1_margin = 0.0;  ///< min over samples of 1 - |z_t|
    double h2_margin = 0.0;  ///< min over samples of (1+z_t) - |lambda|^2 (1-z_t)
    double z0 = 0.0;
    double max_lambda_sq = 0.0;
    std::string message;
};

/// Check (H1) and (H2) on n_samples uniform points of [0, t_final] plus
/// any extra times. Never throws on a violation.
ValidationReport validate_assumptions(const BoundaryCurve& curve, double t_final, int n_samples,
                                      const std::vector<double>& extra_times = {},
                                      double equality_tol = 1e-10);

/// Root of z(t) - t = b for b <= 0.
double solve_p(const BoundaryCurve& curve, double b);

struct Foot {
    bool on_boundary = false;
    double x = 0.0;
    double t = 0.0;
};

/// Where the u-characteristic through (x,t) starts: on t = 0 or on the boundary.
Foot foot_of_u_characteristic(const BoundaryCurve& curve, double x, double t);

struct TriangleClass {
    enum class Kind { interior, right_edge_hit, left_edge_hit, disjoint };
    Kind kind = Kind::interior;
    double tau = 0.0;  ///< crossing time (right or left edge hit)
    double i_begin = 0.0;
    double i_end = 0.0;
};

std::string to_string(TriangleClass::Kind kind);

TriangleClass classify_triangle(const BoundaryCurve& curve, const TriangleDomain& tri);

/// z_a(t) = max(a + t - t0, z(t)).
double left_limit(const BoundaryCurve& curve, const TriangleDomain& tri, double t);

/// Root of a strictly decreasing f on [lo, hi] with f(lo) >= 0 >= f(hi):
/// bisection down to a narrow bracket, then Newton polish with df.
double decreasing_root(const std::function<double(double)>& f,
                       const std::function<double(double)>& df, double lo, double hi,
                       double tol);

}  // namespace gndirac
