#include "gndirac/boundary.hpp"

#include <algorithm>
#include <cmath>

#include "gndirac/errors.hpp"

namespace gndirac {

namespace {

// log cosh without overflow
double log_cosh(double y) {
    double a = std::abs(y);
    return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

double sech2(double y) {
    double c = std::cosh(std::min(std::abs(y), 350.0));
    return 1.0 / (c * c);
}

}  // namespace

BoundaryCurve BoundaryCurve::static_wall(complex lambda) {
    BoundaryCurve b;
    b.kind = Kind::static_wall;
    b.lambda_const = lambda;
    b.z = [](double) { return 0.0; };
    b.z_t = [](double) { return 0.0; };
    b.z_tt = [](double) { return 0.0; };
    b.lambda = [lambda](double) { return lambda; };
    b.lambda_t = [](double) { return complex{}; };
    return b;
}

BoundaryCurve BoundaryCurve::linear(double c, complex lambda) {
    BoundaryCurve b;
    b.kind = Kind::linear;
    b.c = c;
    b.lambda_const = lambda;
    b.z = [c](double t) { return c * t; };
    b.z_t = [c](double) { return c; };
    b.z_tt = [](double) { return 0.0; };
    b.lambda = [lambda](double) { return lambda; };
    b.lambda_t = [](double) { return complex{}; };
    return b;
}

BoundaryCurve BoundaryCurve::collapsing(double T0, complex lambda) {
    if (!(T0 > 0.0)) throw ConfigError("collapsing boundary: T0 must be positive");
    BoundaryCurve b;
    b.kind = Kind::collapsing;
    b.T0 = T0;
    b.lambda_const = lambda;
    b.z = [T0](double t) { return -T0 * log_cosh(t / T0); };
    b.z_t = [T0](double t) { return -std::tanh(t / T0); };
    b.z_tt = [T0](double t) { return -sech2(t / T0) / T0; };
    b.lambda = [lambda](double) { return lambda; };
    b.lambda_t = [](double) { return complex{}; };
    return b;
}

double equality_lambda(double z_t) { return std::sqrt((1.0 + z_t) / (1.0 - z_t)); }

BoundaryCurve BoundaryCurve::with_equality_lambda() const {
    BoundaryCurve b = *this;
    b.equality_case = true;
    if (kind == Kind::collapsing) {
        // sqrt((1 - tanh)/(1 + tanh)) = exp(-t/T0)
        double T = T0;
        b.lambda = [T](double t) { return complex(std::exp(-t / T), 0.0); };
        b.lambda_t = [T](double t) { return complex(-std::exp(-t / T) / T, 0.0); };
        return b;
    }
    auto zt = z_t;
    auto ztt = z_tt;
    b.lambda = [zt](double t) { return complex(equality_lambda(zt(t)), 0.0); };
    b.lambda_t = [zt, ztt](double t) {
        double s = zt(t);
        double lam = equality_lambda(s);
        return complex(ztt(t) / ((1.0 - s) * (1.0 - s) * lam), 0.0);
    };
    return b;
}

std::string to_string(BoundaryCurve::Kind k) {
    switch (k) {
        case BoundaryCurve::Kind::static_wall: return "static";
        case BoundaryCurve::Kind::linear: return "linear";
        case BoundaryCurve::Kind::collapsing: return "collapsing";
        case BoundaryCurve::Kind::custom: return "custom";
    }
    return "custom";
}

BoundaryCurve::Kind boundary_kind_from_string(const std::string& name) {
    if (name == "static") return BoundaryCurve::Kind::static_wall;
    if (name == "linear") return BoundaryCurve::Kind::linear;
    if (name == "collapsing") return BoundaryCurve::Kind::collapsing;
    if (name == "custom") return BoundaryCurve::Kind::custom;
    throw ConfigError("unknown boundary kind '" + name + "'");
}

ValidationReport validate_assumptions(const BoundaryCurve& curve, double t_final, int n_samples,
                                      const std::vector<double>& extra_times, double equality_tol) {
    if (n_samples < 2) throw ConfigError("validate_assumptions: need n_samples >= 2");
    ValidationReport r;
    r.h1_margin = INFINITY;
    r.h2_margin = INFINITY;
    r.z0 = curve.z(0.0);
    if (std::abs(r.z0) > 1e-14) {
        r.h1_ok = false;
        r.message = "H1: z(0) != 0";
    }
    std::vector<double> ts;
    ts.reserve(static_cast<std::size_t>(n_samples) + extra_times.size());
    for (int i = 0; i < n_samples; ++i) ts.push_back(t_final * i / (n_samples - 1));
    ts.insert(ts.end(), extra_times.begin(), extra_times.end());
    for (double t : ts) {
        double zt = curve.z_t(t);
        double l2 = std::norm(curve.lambda(t));
        double m1 = 1.0 - std::abs(zt);
        double m2 = (1.0 + zt) - l2 * (1.0 - zt);
        r.max_lambda_sq = std::max(r.max_lambda_sq, l2);
        r.h1_margin = std::min(r.h1_margin, m1);
        r.h2_margin = std::min(r.h2_margin, m2);
        if (!(m1 > 0.0) && r.h1_ok) {
            r.h1_ok = false;
            r.message = "H1: |z_t| >= 1 at t=" + std::to_string(t);
        }
        if (!(m2 >= -equality_tol) && r.h2_ok) {
            r.h2_ok = false;
            if (r.message.empty())
                r.message = "H2: |lambda|^2 (1-z_t) > 1+z_t at t=" + std::to_string(t);
        }
        if (!(std::abs(m2) <= equality_tol)) r.h2_equality_everywhere = false;
    }
    if (!r.h2_ok) r.h2_equality_everywhere = false;
    return r;
}

double decreasing_root(const std::function<double(double)>& f,
                       const std::function<double(double)>& df, double lo, double hi,
                       double tol) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo < 0.0 || fhi > 0.0) throw DomainError("root not bracketed");
    for (int it = 0; it < 200 && hi - lo > 1e-6 * (1.0 + std::abs(lo)); ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if (fm > 0.0) lo = mid;
        else hi = mid;
    }
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 50; ++it) {
        double ft = f(t);
        if (std::abs(ft) <= 0.25 * tol) break;
        double d = df ? df(t) : 0.0;
        double next = (d < 0.0) ? t - ft / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (f(next) > 0.0) lo = next;
        else hi = next;
        if (next == t) break;
        t = next;
    }
    // settle on the better bracket end if Newton stalled
    double best = t;
    for (double cand : {lo, hi})
        if (std::abs(f(cand)) < std::abs(f(best))) best = cand;
    return best;
}

double solve_p(const BoundaryCurve& curve, double b) {
    if (b > 0.0) throw DomainError("solve_p: b must be <= 0");
    if (b == 0.0) return 0.0;
    auto f = [&](double t) { return curve.z(t) - t - b; };
    auto df = [&](double t) { return curve.z_t(t) - 1.0; };
    double hi = std::max(1.0, -b);
    const double t_max_search = 1e8;
    while (f(hi) > 0.0) {
        hi *= 2.0;
        if (hi > t_max_search) throw DomainError("solve_p: boundary never reached");
    }
    return decreasing_root(f, df, 0.0, hi, 1e-12 * (1.0 + std::abs(b)));
}

Foot foot_of_u_characteristic(const BoundaryCurve& curve, double x, double t) {
    if (t < 0.0 || x < curve.z(t) - 1e-12)
        throw DomainError("foot_of_u_characteristic: point outside the domain");
    Foot f;
    if (x - t >= 0.0) {
        f.x = x - t;
        f.t = 0.0;
        return f;
    }
    f.on_boundary = true;
    f.t = solve_p(curve, x - t);
    f.x = curve.z(f.t);
    return f;
}

std::string to_string(TriangleClass::Kind k) {
    switch (k) {
        case TriangleClass::Kind::interior: return "interior";
        case TriangleClass::Kind::right_edge_hit: return "right_edge_hit";
        case TriangleClass::Kind::left_edge_hit: return "left_edge_hit";
        case TriangleClass::Kind::disjoint: return "disjoint";
    }
    return "interior";
}

TriangleClass classify_triangle(const BoundaryCurve& curve, const TriangleDomain& tri) {
    tri.validate();
    TriangleClass c;
    double t0 = tri.t0, apex = tri.apex_t();
    c.i_begin = t0;
    c.i_end = apex;
    double z0 = curve.z(t0);
    if (z0 >= tri.b) {
        c.kind = TriangleClass::Kind::disjoint;
        c.i_end = t0;
        return c;
    }
    if (z0 <= tri.a) {
        c.kind = TriangleClass::Kind::interior;
        return c;
    }
    double tol = 1e-13 * (1.0 + std::abs(tri.a) + std::abs(tri.b) + apex);
    if (curve.z(apex) >= tri.apex_x()) {
        // boundary leaves through the right edge x = b + t0 - t
        auto f = [&](double t) { return tri.right_edge(t) - curve.z(t); };
        auto df = [&](double t) { return -1.0 - curve.z_t(t); };
        c.kind = TriangleClass::Kind::right_edge_hit;
        c.tau = (f(apex) >= 0.0) ? apex : decreasing_root(f, df, t0, apex, tol);
        c.i_end = c.tau;
    } else {
        // boundary drops behind the left edge x = a - t0 + t
        auto f = [&](double t) { return curve.z(t) - tri.left_edge(t); };
        auto df = [&](double t) { return curve.z_t(t) - 1.0; };
        c.kind = TriangleClass::Kind::left_edge_hit;
        c.tau = decreasing_root(f, df, t0, apex, tol);
    }
    return c;
}

double left_limit(const BoundaryCurve& curve, const TriangleDomain& tri, double t) {
    return std::max(tri.left_edge(t), curve.z(t));
}

}  // namespace gndirac
