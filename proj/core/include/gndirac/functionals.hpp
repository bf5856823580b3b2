#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gndirac/boundary.hpp"
#include "gndirac/model.hpp"
#include "gndirac/solver.hpp"

namespace gndirac {

struct FunctionalConfig {
    double K0 = 4.0;
    double C0 = 10.0;
    double K1 = 4.0;
    double C1 = 10.0;
    double delta0 = 0.01;
    double c_star = 1.0;

    /// K0 = K1 = max_t [((1-z_t)|lambda|^2 + 2)/(1+z_t)] + 1,
    /// C0 = C1 = max(2 c_* + 2, 10), delta0 = 0.01, c_* from estimate_c_star.
    static FunctionalConfig defaults(const BoundaryCurve& curve, double t_final,
                                     const NonlinearityParams& params);

    /// Throws ConfigError unless K0, K1 satisfy
    /// max_t [(1-z_t)|lambda|^2 - K (1+z_t)] < -2 on sampled t in [0, t_final].
    void validate(const BoundaryCurve& curve, double t_final) const;
};

/// Smallest admissible K (plus margin 1) for the curve on [0, t_final].
double default_K(const BoundaryCurve& curve, double t_final, int samples = 513);

/// Empirical constant for
///   |2 Re(-i (N_k(u,v) - N_k(u',v')) conj(W))| <= c_* r2(x,x),  W = U or V,
/// as 1.1 times the worst ratio over random unit samples, floored at 1e-3.
double estimate_c_star(const NonlinearityParams& params, int samples = 20000,
                       std::uint64_t seed = 20240611);

enum class Component { u, v };

/// Exact integral over {x < y} of f(x) g(y), f and g piecewise linear on xs.
/// O(N) by a right-to-left running sum.
double ordered_pair_integral(std::span<const double> xs, std::span<const double> f,
                             std::span<const double> g);

/// Exact integral of the product of two piecewise-linear functions on xs.
double product_integral(std::span<const double> xs, std::span<const double> f,
                        std::span<const double> g);

/// Nodal data restricted to [lo, hi], with linear interpolation at the cut points.
struct ClippedProfile {
    std::vector<double> xs;
    std::vector<std::vector<double>> cols;
};

ClippedProfile clip_profile(std::span<const double> xs,
                            const std::vector<std::vector<double>>& cols, double lo, double hi);

/// L(t, w, Delta): integral of |w|^2 over [z_a(t), b - t + t0].
double L_norm(const SpinorField& slice, Component w, const TriangleDomain& tri,
              const BoundaryCurve& curve);

/// Q0(t, Delta) = double integral of |u(x)|^2 |v(y)|^2 over z_a(t) < x < y < b - t + t0.
double bony_Q0(const SpinorField& slice_u, const SpinorField& slice_v, const TriangleDomain& tri,
               const BoundaryCurve& curve);

/// D0(t, Delta) = integral of |u|^2 |v|^2 over [z_a(t), b - t + t0].
double interaction_D0(const SpinorField& slice, const TriangleDomain& tri,
                      const BoundaryCurve& curve);

double glimm_F0(double L_u, double L_v, double Q0, const FunctionalConfig& fc);
double glimm_F0(const SpinorField& slice, const TriangleDomain& tri, const BoundaryCurve& curve,
                const FunctionalConfig& fc);

/// r0 = m(|u|^2 + |v|^2) + 8|beta| |u|^2 |v|^2 at node i.
double density_r0(const NonlinearityParams& params, const SpinorField& slice, std::size_t i);

/// r2(x,y) = |U(x)|^2 (|v(y)|^2 + |v'(y)|^2) + (|u(x)|^2 + |u'(x)|^2) |V(y)|^2.
double density_r2(complex U_x, complex V_y, complex u_x, complex up_x, complex v_y, complex vp_y);

struct FunctionalReport {
    TriangleDomain triangle;
    TriangleClass klass;
    FunctionalConfig constants;
    std::vector<double> times;
    std::vector<double> L_u, L_v, L0, D0, Q0, F0;
    std::vector<double> v_left;  ///< |v(z_a(t), t)|^2
    bool has_difference = false;
    std::vector<double> L1, D1, Q1, F1;
    std::vector<std::string> notes;

    std::size_t size() const { return times.size(); }
};

/// Values on every stored slice with time in I_Delta. A disjoint triangle
/// gives an empty report with a note.
FunctionalReport compute_functionals(const Trajectory& traj, const TriangleDomain& tri,
                                     const FunctionalConfig& fc);

/// Functionals of the difference of two runs on the same grid.
FunctionalReport diff_functionals(const Trajectory& a, const Trajectory& b,
                                  const TriangleDomain& tri, const FunctionalConfig& fc);

/// Single-slice difference functionals (L1, D1, Q1, F1) on common nodes.
struct DifferenceValues {
    double L_U = 0.0, L_V = 0.0, L1 = 0.0, D1 = 0.0, Q1 = 0.0, F1 = 0.0;
};
DifferenceValues difference_values(const SpinorField& a, const SpinorField& b,
                                   const TriangleDomain& tri, const BoundaryCurve& curve,
                                   const FunctionalConfig& fc);

}  // namespace gndirac
