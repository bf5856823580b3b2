#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gndirac/boundary.hpp"
#include "gndirac/model.hpp"

namespace gndirac {

struct SolverConfig {
    NonlinearityParams params;
    GridSpec grid;
    BoundaryCurve curve = BoundaryCurve::static_wall(1.0);
    double picard_tol = 1e-12;
    int picard_max_iters = 8;
    /// Keep every k-th slice; 0 keeps only the first and last.
    int snapshot_stride = 1;

    void validate() const;
};

/// (N1, N2) of the cubic nonlinearity.
std::pair<complex, complex> eval_nonlinear(const NonlinearityParams& p, complex u, complex v);

struct CompatibilityResidual {
    double res0 = 0.0;
    std::optional<double> res1;  ///< empty when derivative data is unavailable
};

CompatibilityResidual check_compatibility(const InitialData& data, const BoundaryCurve& curve,
                                          const NonlinearityParams& params);

struct StepStats {
    int max_iters = 0;
    std::size_t cells = 0;
    std::size_t unconverged = 0;
};

/// Advance one slice by h. Interior nodes use the square-cell midpoint rule:
/// on the cell with corners (x_j,t), (x_j+1,t), (x_j,t+h), (x_j+1,t+h),
///   u(x_j+1,t+h) = u(x_j,t)   + h F(U,V),   U = mean of u on the Gamma_u diagonal,
///   v(x_j,t+h)   = v(x_j+1,t) + h G(U,V),   V = mean of v on the Gamma_v diagonal,
/// with F = i(m v - N1), G = i(m u - N2), solved by Picard iteration.
/// Boundary-adjacent nodes are closed by characteristic sub-steps.
SpinorField step(const SpinorField& field, const SolverConfig& config, StepStats* stats = nullptr);

/// Values (u, v) at the new boundary point (z(t+h), t+h).
std::pair<complex, complex> boundary_closure(const SpinorField& field, const SolverConfig& config);

struct RunStats {
    std::size_t steps = 0;
    int max_picard_iters = 0;
    std::size_t cells = 0;
    std::size_t unconverged_cells = 0;
    double wall_seconds = 0.0;
};

struct Trajectory {
    SolverConfig config;
    std::vector<SpinorField> slices;
    std::vector<double> times;    ///< every step, including t = 0
    std::vector<double> charges;  ///< total_charge at every step
    double E0 = 0.0;
    RunStats stats;
    CompatibilityResidual compatibility;
    std::vector<std::string> warnings;
    std::string config_hash;

    double max_drift() const;          ///< max_t |charge(t) - E0|
    double max_charge_increase() const;  ///< max over steps of charge(n+1) - charge(n)
    /// Stored slice at step n; requires that step to have been kept.
    const SpinorField& at_step(std::size_t n) const;
    bool has_every_step() const { return config.snapshot_stride == 1; }
};

/// Integrate from t = 0 to t_final. Throws ConfigError for (H1)/(H2)
/// violations or data not supported in the window, StepFailure if Picard
/// iteration blows up.
Trajectory run(const SolverConfig& config, const InitialData& data);

/// Canonical text of the numerical configuration (used for hashing).
std::string config_fingerprint(const SolverConfig& config);

std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t value);

}  // namespace gndirac
