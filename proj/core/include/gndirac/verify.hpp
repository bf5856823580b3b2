#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gndirac/boundary.hpp"
#include "gndirac/functionals.hpp"
#include "gndirac/model.hpp"
#include "gndirac/solver.hpp"

namespace gndirac {

enum class CheckStatus { pass, fail, skipped, refused, reported };

std::string to_string(CheckStatus s);

struct CheckResult {
    std::string name;
    CheckStatus status = CheckStatus::reported;
    bool asserted = false;  ///< a failing asserted check fails the suite
    double measured = 0.0;
    double bound = 0.0;
    double margin = 0.0;  ///< bound - measured
    std::string context;
    std::string note;

    bool failed() const { return asserted && status == CheckStatus::fail; }
};

/// passed <=> measured <= bound + tol
CheckResult make_check(std::string name, double measured, double bound, double tol, bool asserted,
                       std::string context = {});

/// Values of u and v between stored time levels, interpolated along the
/// characteristic that carries each component. Requires every step stored.
class CharacteristicSampler {
public:
    explicit CharacteristicSampler(const Trajectory& traj);
    std::optional<complex> u(double x, double t) const;
    std::optional<complex> v(double x, double t) const;
    /// Values at the boundary point (z(t), t).
    std::pair<complex, complex> boundary(double t) const;
    const Trajectory& trajectory() const { return tr_; }

private:
    std::optional<complex> along(bool is_u, double x, double t) const;
    const Trajectory& tr_;
    double h_;
};

struct ConservationBalance {
    double bottom = 0.0;    ///< integral of rho on the base
    double right = 0.0;     ///< 2|u|^2 along the right edge
    double left = 0.0;      ///< 2|v|^2 along the left edge
    double boundary = 0.0;  ///< (1+z_t)|v|^2 - (1-z_t)|u|^2 along the boundary
    double residual = 0.0;  ///< |right + left + boundary - bottom|
};

/// Contour integral of the flux pair (|u|^2+|v|^2, |u|^2-|v|^2) around the
/// boundary of Delta intersected with the domain.
ConservationBalance conservation_balance(const Trajectory& traj, const TriangleDomain& tri);
double conservation_residual(const Trajectory& traj, const TriangleDomain& tri);

/// Nodewise exponential bounds on |v|^2 and on |u|^2 (direct and reflected
/// branches) over all stored slices.
std::vector<CheckResult> pointwise_bounds(const Trajectory& traj, double E0);

struct CharSegment {
    enum class Family {
        gamma_v,  ///< x = x0 + t0 - s, integrand |u|^2
        gamma_u   ///< x = x0 - t0 + s, integrand |v|^2
    };
    Family family = Family::gamma_v;
    double x0 = 0.0;
    double t0 = 0.0;
    double t1 = 0.0;
};

double characteristic_line_integral(const Trajectory& traj, const CharSegment& seg);
CheckResult characteristic_line_charge(const Trajectory& traj, const CharSegment& seg, double E0,
                                       double tol = 1e-8);

/// Segments from (x0, t_final) back to t = 0 (or to the boundary) for a
/// lattice of x0 with the given spacing.
std::vector<CharSegment> sample_segments(const Trajectory& traj, double spacing);

/// (a) L0(t) <= L0(t0); (b) interior integral inequality for Q0;
/// (c) boundary inequality for F0 with the empirical slope reported.
std::vector<CheckResult> glimm_monotonicity(const Trajectory& traj, const TriangleDomain& tri,
                                            const FunctionalConfig& fc, double tol = 1e-8);

struct StabilityRow {
    double eps = 0.0;
    double L_diff0 = 0.0;
    double ratio_t = 0.0;
    double ratio_Q = 0.0;
    double max_abs_diff = 0.0;
};

struct StabilityReport {
    std::vector<StabilityRow> rows;
    std::vector<CheckResult> checks;
};

/// Runs (f, f + eps g) for every eps and compares, over Delta:
///   ratio_t = sup_t L2diff(t) / L2diff(0),  ratio_Q = int int |uv - u'v'|^2 / L2diff(0).
StabilityReport stability_experiment(const SolverConfig& config, const InitialData& data,
                                     const InitialData& perturbation,
                                     const std::vector<double>& eps_list, const TriangleDomain& tri);

/// Smooth test function of (x, t) with its partial derivatives.
struct TestFunction {
    std::function<complex(double, double)> f;
    std::function<complex(double, double)> f_t;
    std::function<complex(double, double)> f_x;
};

/// (x - z(t)) * B((x-xc)/rx) * B((t-tc)/rt) * exp(i theta), B(s) = (1-s^2)^4 on |s|<1.
/// Vanishes on the boundary by construction.
TestFunction make_test_function(const BoundaryCurve& curve, double xc, double tc, double rx,
                                double rt, double theta = 0.0);

/// Residuals of the weak identities
///   int int (i u (phi_t + phi_x) - m v phi + N1 phi) + i int u0 phi(x,0),
///   int int (i v (psi_t - psi_x) - m u psi + N2 psi) + i int v0 psi(x,0),
/// by trapezoid quadrature over the stored slices.
std::pair<double, double> weak_residual(const Trajectory& traj, const TestFunction& phi,
                                        const TestFunction& psi);

/// Theorem-level identity: in the (H2) equality case the charge is constant.
CheckResult charge_identity(const Trajectory& traj, const ValidationReport& validation,
                            double C = 1.0);

/// Charge nonincreasing step to step up to tol.
CheckResult charge_monotonicity(const Trajectory& traj, double tol = 1e-10);

struct ConvergenceResult {
    enum class Status { ok, exact, not_asymptotic };
    Status status = Status::ok;
    double order = 0.0;
    double e12 = 0.0;
    double e23 = 0.0;
};

std::string to_string(ConvergenceResult::Status s);

/// Discrete L2 distance between two slices on the nodes of the coarser one
/// (grid nodes only; both grids must be nested).
double slice_l2_distance(const SpinorField& coarse, double h_coarse, const SpinorField& fine,
                         double h_fine);

/// p = log2(|S_h - S_h/2| / |S_h/2 - S_h/4|).
ConvergenceResult convergence_order(const SpinorField& s1, double h1, const SpinorField& s2,
                                    double h2, const SpinorField& s3, double h3);

/// Observed order from errors against a reference at h and h/2.
double observed_order(double e_h, double e_h2);

/// All triangles with b - a in widths, a and t0 on multiples of spacing,
/// a >= x_lo, b <= x_hi and apex time <= t_final.
std::vector<TriangleDomain> triangle_lattice(double x_lo, double x_hi, double t_final,
                                             const std::vector<double>& widths = {0.5, 1.0, 2.0},
                                             double spacing = 0.5);

struct SmallnessWindow {
    double r = 0.0;
    double worst_direct = 0.0;     ///< left side of the direct condition at r
    double worst_reflected = 0.0;  ///< left side of the reflected condition at r
};

/// Largest r such that every interval of length 4r below A satisfies the
/// two data conditions (charge E0 standing in for the undefined constant).
SmallnessWindow smallness_window(const SpinorField& initial, const BoundaryCurve& curve,
                                 const NonlinearityParams& params, double E0, double A,
                                 double delta0);

/// Everything a suite needs to run.
struct SuiteContext {
    SolverConfig config;
    InitialData data;
    FunctionalConfig functionals;
    std::vector<TriangleDomain> triangles;  ///< empty: use triangle_lattice over the window
    std::vector<double> eps_list = {1e-2, 1e-3, 1e-4};
    std::optional<InitialData> perturbation;  ///< default swaps the u and v profiles
};

const std::vector<std::string>& suite_names();

/// Run one named suite; throws ConfigError for an unknown name.
std::vector<CheckResult> run_suite(const std::string& name, const SuiteContext& ctx);

}  // namespace gndirac
