#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gndirac {

using complex = std::complex<double>;

/// Mass and couplings of the cubic self-interaction
///   W(u,v) = alpha |u|^2 |v|^2 + beta (conj(u) v + u conj(v))^2.
struct NonlinearityParams {
    double m = 0.0;
    double alpha = 0.0;
    double beta = 0.0;

    static NonlinearityParams thirring(double m) { return {m, 1.0, 0.0}; }
    static NonlinearityParams gross_neveu(double m) { return {m, 0.0, 0.25}; }
    static NonlinearityParams free(double m = 0.0) { return {m, 0.0, 0.0}; }

    bool is_linear() const { return alpha == 0.0 && beta == 0.0; }
    void validate() const;
};

/// Uniform light-cone grid. The time step always equals h so that both
/// characteristic families pass through grid nodes.
struct GridSpec {
    double x_min = 0.0;
    double x_max = 1.0;
    double h = 0.01;
    double t_final = 1.0;

    double dt() const { return h; }
    std::size_t cells() const;
    std::size_t nodes() const { return cells() + 1; }
    std::size_t steps() const;
    double node(long j) const { return x_min + static_cast<double>(j) * h; }

    /// Throws ConfigError unless the window holds an integer number of cells,
    /// t_final is an integer number of steps, and h > 0.
    void validate() const;
};

/// Window for data supported in [0, extent]: the right edge is pushed out by
/// t_final plus one cell (nothing reaches it), the left edge is the largest multiple of h
/// not exceeding min_z, the leftmost boundary position over [0, t_final].
GridSpec make_window(double extent, double h, double t_final, double min_z);

/// One time slice of the solution on [max(z(t), x_min), x_max].
///
/// When first_node_on_boundary is set, xs[0] == z(t) and the remaining
/// nodes are consecutive grid nodes starting at grid index grid_first.
/// A grid node closer to z(t) than the snap tolerance is represented by the
/// boundary node itself.
struct SpinorField {
    double t = 0.0;
    std::vector<double> xs;
    std::vector<complex> u;
    std::vector<complex> v;
    bool first_node_on_boundary = false;
    long grid_first = -1;

    std::size_t size() const { return xs.size(); }
    bool empty() const { return xs.empty(); }

    /// Sizes agree, xs strictly increasing, values finite.
    void check_invariants() const;
};

/// Values of (u, v) at an arbitrary abscissa by linear interpolation.
/// Points right of the slice are outside the support and read as zero;
/// points left of xs.front() (beyond tolerance) return nullopt.
std::optional<std::pair<complex, complex>> interpolate(const SpinorField& slice, double x,
                                                       double tol = 1e-12);

/// Backward characteristic triangle
///   Delta(a,b,t0) = {(x,t) : a - t0 + t < x < b + t0 - t, t0 < t < (b-a)/2 + t0}.
struct TriangleDomain {
    double a = 0.0;
    double b = 1.0;
    double t0 = 0.0;

    double apex_x() const { return 0.5 * (a + b); }
    double apex_t() const { return 0.5 * (b - a) + t0; }
    double left_edge(double t) const { return a - t0 + t; }
    double right_edge(double t) const { return b + t0 - t; }
    bool contains(double x, double t) const {
        return t > t0 && t < apex_t() && x > left_edge(t) && x < right_edge(t);
    }
    double area() const { return 0.25 * (b - a) * (b - a); }
    void validate() const;
};

using ComplexFn = std::function<complex(double)>;

/// Initial data (u0, v0) on [0, inf). Derivatives are optional and only
/// used by the compatibility check.
struct InitialData {
    ComplexFn u;
    ComplexFn v;
    ComplexFn du;
    ComplexFn dv;

    static InitialData zero();
    InitialData scaled(complex factor) const;
    InitialData plus(const InitialData& other, complex eps) const;
    InitialData phase_rotated(double theta) const { return scaled(std::polar(1.0, theta)); }
};

/// Closed-form profiles used by scenario presets.
struct Profile {
    enum class Shape { zero, box, gaussian, bump };

    Shape shape = Shape::zero;
    double amplitude = 1.0;
    double center = 1.0;
    double width = 0.1;       ///< box half-width, gaussian variance-like scale, bump radius
    double phase = 0.0;       ///< constant phase, radians
    double wavenumber = 0.0;  ///< carrier exp(i k x)

    complex operator()(double x) const;
    complex derivative(double x) const;
    /// Right end of the support (gaussian: where it drops below 1e-17 of its peak).
    double support_right() const;

    static Profile gaussian(double amplitude, double center, double width);
    static Profile box(double amplitude, double center, double half_width);
    static Profile bump(double amplitude, double center, double radius);
};

std::string to_string(Profile::Shape shape);
Profile::Shape profile_shape_from_string(const std::string& name);

InitialData make_initial_data(const Profile& u, const Profile& v);

/// Tabulated data (x, u, v), linearly interpolated and zero outside the table.
struct TabulatedData {
    std::vector<double> x;
    std::vector<complex> u;
    std::vector<complex> v;

    InitialData to_initial_data() const;
    void validate() const;
};

/// Sample (u0, v0) onto the t = 0 slice of the grid. The slice starts at
/// max(0, x_min) with a boundary node at z(0) = 0.
/// Throws ConfigError on non-finite samples.
SpinorField sample_initial_data(const ComplexFn& f_u, const ComplexFn& f_v, const GridSpec& grid);

/// Composite trapezoid of |u|^2 + |v|^2 over the slice.
double total_charge(const SpinorField& field);

/// Composite trapezoid of piecewise-linear nodal data restricted to [lo, hi]
/// with linear interpolation at off-node limits.
double trapezoid(std::span<const double> xs, std::span<const double> f, double lo, double hi);

/// Trapezoid over all nodes.
double trapezoid(std::span<const double> xs, std::span<const double> f);

}  // namespace gndirac
