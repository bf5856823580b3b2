#pragma once

#include <cmath>
#include <vector>

#include "gndirac/boundary.hpp"
#include "gndirac/model.hpp"
#include "gndirac/solver.hpp"

namespace fixture {

using namespace gndirac;

inline SpinorField constant_field(double x0, double x1, double h, complex u, complex v, double t = 0.0) {
    SpinorField s;
    s.t = t;
    long n = std::lround((x1 - x0) / h);
    for (long j = 0; j <= n; ++j) {
        s.xs.push_back(x0 + j * h);
        s.u.push_back(u);
        s.v.push_back(v);
    }
    s.first_node_on_boundary = x0 == 0.0;
    s.grid_first = s.first_node_on_boundary ? 1 : 0;
    return s;
}

/// Solver setup for data supported in [0, extent].
inline SolverConfig config(NonlinearityParams p, BoundaryCurve curve, double extent, double h,
                           double T, int stride = 1) {
    double zmin = 0.0;
    for (long k = 0; k <= std::lround(T / h); ++k) zmin = std::min(zmin, curve.z(k * h));
    SolverConfig c;
    c.params = p;
    c.curve = std::move(curve);
    c.grid = make_window(extent, h, T, zmin);
    c.snapshot_stride = stride;
    return c;
}

/// Gross-Neveu m = 1 bump pair used throughout.
inline InitialData gn_bump(double amplitude = 1.0) {
    return make_initial_data(Profile::bump(amplitude, 1.0, 0.6), Profile::bump(amplitude, 1.5, 0.6));
}

inline InitialData gn_gauss(double amplitude = 1.0) {
    return make_initial_data(Profile::gaussian(amplitude, 1.0, 0.05),
                             Profile::gaussian(0.8 * amplitude, 1.4, 0.05));
}

}  // namespace fixture
