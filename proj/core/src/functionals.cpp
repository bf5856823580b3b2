#include "gndirac/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gndirac/errors.hpp"

namespace gndirac {

namespace {

const complex I{0.0, 1.0};

double time_tol(double t) { return 1e-9 * (1.0 + std::abs(t)); }

void require_in_interval(const TriangleClass& c, double t) {
    if (c.kind == TriangleClass::Kind::disjoint)
        throw DomainError("triangle does not meet the domain");
    if (t < c.i_begin - time_tol(t) || t > c.i_end + time_tol(t))
        throw DomainError("slice time outside I_Delta");
}

struct Limits {
    double lo, hi;
};

Limits limits(const SpinorField& s, const TriangleDomain& tri, const BoundaryCurve& curve) {
    TriangleClass c = classify_triangle(curve, tri);
    require_in_interval(c, s.t);
    double lo = std::max(left_limit(curve, tri, s.t), s.xs.front());
    double hi = tri.right_edge(s.t);
    return {lo, hi};
}

std::vector<double> modulus_sq(const std::vector<complex>& w) {
    std::vector<double> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = std::norm(w[i]);
    return out;
}

double unit_uniform(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Box-Muller from raw engine bits, so samples do not depend on the library's distributions.
double normal(std::mt19937_64& g) {
    double a = unit_uniform(g), b = unit_uniform(g);
    if (a < 1e-300) a = 1e-300;
    return std::sqrt(-2.0 * std::log(a)) * std::cos(2.0 * M_PI * b);
}

}  // namespace

double default_K(const BoundaryCurve& curve, double t_final, int samples) {
    double worst = -INFINITY;
    for (int i = 0; i < samples; ++i) {
        double t = t_final * i / (samples - 1);
        double zt = curve.z_t(t);
        double l2 = std::norm(curve.lambda(t));
        worst = std::max(worst, ((1.0 - zt) * l2 + 2.0) / (1.0 + zt));
    }
    return worst + 1.0;
}

double estimate_c_star(const NonlinearityParams& p, int samples, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    auto draw = [&] { return complex(normal(g), normal(g)); };
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        complex u = draw(), v = draw(), up = draw(), vp = draw();
        double nrm = std::sqrt(std::norm(u) + std::norm(v) + std::norm(up) + std::norm(vp));
        u /= nrm;
        v /= nrm;
        up /= nrm;
        vp /= nrm;
        complex U = u - up, V = v - vp;
        double r2 = density_r2(U, V, u, up, v, vp);
        if (r2 < 1e-12) continue;
        auto [n1, n2] = eval_nonlinear(p, u, v);
        auto [m1, m2] = eval_nonlinear(p, up, vp);
        double a = std::abs(2.0 * (-I * (n1 - m1) * std::conj(U)).real());
        double b = std::abs(2.0 * (-I * (n2 - m2) * std::conj(V)).real());
        worst = std::max(worst, std::max(a, b) / r2);
    }
    return std::max(1.1 * worst, 1e-3);
}

FunctionalConfig FunctionalConfig::defaults(const BoundaryCurve& curve, double t_final,
                                            const NonlinearityParams& params) {
    FunctionalConfig fc;
    fc.K0 = fc.K1 = default_K(curve, t_final);
    fc.c_star = estimate_c_star(params);
    fc.C0 = fc.C1 = std::max(2.0 * fc.c_star + 2.0, 10.0);
    fc.delta0 = 0.01;
    return fc;
}

void FunctionalConfig::validate(const BoundaryCurve& curve, double t_final) const {
    if (!(K0 > 1.0) || !(K1 > 1.0)) throw ConfigError("functionals: K0, K1 must exceed 1");
    if (!(C0 > 0.0) || !(C1 > 0.0) || !(delta0 > 0.0) || !(c_star > 0.0))
        throw ConfigError("functionals: C0, C1, delta0, c_star must be positive");
    const int n = 513;
    for (int i = 0; i < n; ++i) {
        double t = t_final * i / (n - 1);
        double zt = curve.z_t(t);
        double l2 = std::norm(curve.lambda(t));
        if (!((1.0 - zt) * l2 - K0 * (1.0 + zt) < -2.0))
            throw ConfigError("functionals: K0 too small at t=" + std::to_string(t));
        if (!((1.0 - zt) * l2 - K1 * (1.0 + zt) < -2.0))
            throw ConfigError("functionals: K1 too small at t=" + std::to_string(t));
    }
}

double ordered_pair_integral(std::span<const double> xs, std::span<const double> f,
                             std::span<const double> g) {
    const std::size_t n = xs.size();
    if (n < 2) return 0.0;
    double acc = 0.0, suffix = 0.0;  // suffix = integral of g right of the current cell
    for (std::size_t i = n - 1; i-- > 0;) {
        double w = xs[i + 1] - xs[i];
        double f0 = f[i], f1 = f[i + 1], g0 = g[i], g1 = g[i + 1];
        acc += w * w * (f0 * g0 / 8.0 + f1 * g0 / 24.0 + 5.0 * f0 * g1 / 24.0 + f1 * g1 / 8.0);
        acc += 0.5 * w * (f0 + f1) * suffix;
        suffix += 0.5 * w * (g0 + g1);
    }
    return acc;
}

double product_integral(std::span<const double> xs, std::span<const double> f,
                        std::span<const double> g) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        double w = xs[i + 1] - xs[i];
        acc += w * (f[i] * g[i] / 3.0 + f[i + 1] * g[i + 1] / 3.0 +
                    (f[i] * g[i + 1] + f[i + 1] * g[i]) / 6.0);
    }
    return acc;
}

ClippedProfile clip_profile(std::span<const double> xs, const std::vector<std::vector<double>>& cols,
                            double lo, double hi) {
    ClippedProfile out;
    out.cols.resize(cols.size());
    if (xs.size() < 2) return out;
    lo = std::max(lo, xs.front());
    hi = std::min(hi, xs.back());
    if (!(hi > lo)) return out;
    auto sample = [&](double x) {
        std::size_t k = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
        k = std::clamp<std::size_t>(k, 1, xs.size() - 1);
        double w = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
        w = std::clamp(w, 0.0, 1.0);
        for (std::size_t c = 0; c < cols.size(); ++c)
            out.cols[c].push_back(cols[c][k - 1] + w * (cols[c][k] - cols[c][k - 1]));
        out.xs.push_back(x);
    };
    sample(lo);
    const double eps = 1e-12 * (1.0 + std::abs(hi - lo));
    std::size_t k = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), lo) - xs.begin());
    for (; k < xs.size() && xs[k] < hi - eps; ++k) {
        if (xs[k] <= out.xs.back() + eps) continue;
        out.xs.push_back(xs[k]);
        for (std::size_t c = 0; c < cols.size(); ++c) out.cols[c].push_back(cols[c][k]);
    }
    if (hi > out.xs.back() + eps) sample(hi);
    else {
        // replace a near-duplicate end by the exact cut value
        out.xs.pop_back();
        for (auto& c : out.cols) c.pop_back();
        sample(hi);
    }
    return out;
}

double L_norm(const SpinorField& s, Component w, const TriangleDomain& tri,
              const BoundaryCurve& curve) {
    Limits lim = limits(s, tri, curve);
    auto f = modulus_sq(w == Component::u ? s.u : s.v);
    return trapezoid(s.xs, f, lim.lo, lim.hi);
}

double bony_Q0(const SpinorField& su, const SpinorField& sv, const TriangleDomain& tri,
               const BoundaryCurve& curve) {
    if (su.xs != sv.xs) throw ConfigError("bony_Q0: slices have different nodes");
    Limits lim = limits(su, tri, curve);
    auto cp = clip_profile(su.xs, {modulus_sq(su.u), modulus_sq(sv.v)}, lim.lo, lim.hi);
    if (cp.xs.size() < 2) return 0.0;
    return ordered_pair_integral(cp.xs, cp.cols[0], cp.cols[1]);
}

double interaction_D0(const SpinorField& s, const TriangleDomain& tri, const BoundaryCurve& curve) {
    Limits lim = limits(s, tri, curve);
    auto cp = clip_profile(s.xs, {modulus_sq(s.u), modulus_sq(s.v)}, lim.lo, lim.hi);
    if (cp.xs.size() < 2) return 0.0;
    return product_integral(cp.xs, cp.cols[0], cp.cols[1]);
}

double glimm_F0(double L_u, double L_v, double Q0, const FunctionalConfig& fc) {
    return L_u + fc.K0 * L_v + fc.C0 * Q0;
}

double glimm_F0(const SpinorField& s, const TriangleDomain& tri, const BoundaryCurve& curve,
                const FunctionalConfig& fc) {
    return glimm_F0(L_norm(s, Component::u, tri, curve), L_norm(s, Component::v, tri, curve),
                    bony_Q0(s, s, tri, curve), fc);
}

double density_r0(const NonlinearityParams& p, const SpinorField& s, std::size_t i) {
    if (i >= s.size()) throw DomainError("density_r0: index out of range");
    double a = std::norm(s.u[i]), b = std::norm(s.v[i]);
    return p.m * (a + b) + 8.0 * std::abs(p.beta) * a * b;
}

double density_r2(complex U_x, complex V_y, complex u_x, complex up_x, complex v_y, complex vp_y) {
    return std::norm(U_x) * (std::norm(v_y) + std::norm(vp_y)) +
           (std::norm(u_x) + std::norm(up_x)) * std::norm(V_y);
}

FunctionalReport compute_functionals(const Trajectory& traj, const TriangleDomain& tri,
                                     const FunctionalConfig& fc) {
    FunctionalReport r;
    r.triangle = tri;
    r.constants = fc;
    const BoundaryCurve& curve = traj.config.curve;
    r.klass = classify_triangle(curve, tri);
    if (r.klass.kind == TriangleClass::Kind::disjoint) {
        r.notes.push_back("triangle is disjoint from the domain");
        return r;
    }
    for (const SpinorField& s : traj.slices) {
        if (s.t < r.klass.i_begin - time_tol(s.t) || s.t > r.klass.i_end + time_tol(s.t)) continue;
        double lu = L_norm(s, Component::u, tri, curve);
        double lv = L_norm(s, Component::v, tri, curve);
        double q = bony_Q0(s, s, tri, curve);
        r.times.push_back(s.t);
        r.L_u.push_back(lu);
        r.L_v.push_back(lv);
        r.L0.push_back(lu + lv);
        r.D0.push_back(interaction_D0(s, tri, curve));
        r.Q0.push_back(q);
        r.F0.push_back(glimm_F0(lu, lv, q, fc));
        auto at = interpolate(s, left_limit(curve, tri, s.t), 1e-9);
        r.v_left.push_back(at ? std::norm(at->second) : 0.0);
    }
    return r;
}

DifferenceValues difference_values(const SpinorField& a, const SpinorField& b,
                                   const TriangleDomain& tri, const BoundaryCurve& curve,
                                   const FunctionalConfig& fc) {
    if (a.xs.size() != b.xs.size() || std::abs(a.t - b.t) > time_tol(a.t))
        throw ConfigError("diff_functionals: mismatched grids");
    for (std::size_t i = 0; i < a.xs.size(); ++i)
        if (std::abs(a.xs[i] - b.xs[i]) > 1e-12 * (1.0 + std::abs(a.xs[i])))
            throw ConfigError("diff_functionals: mismatched grids");
    Limits lim = limits(a, tri, curve);
    const std::size_t n = a.size();
    std::vector<double> U2(n), V2(n), uu(n), vv(n);
    for (std::size_t i = 0; i < n; ++i) {
        U2[i] = std::norm(a.u[i] - b.u[i]);
        V2[i] = std::norm(a.v[i] - b.v[i]);
        uu[i] = std::norm(a.u[i]) + std::norm(b.u[i]);
        vv[i] = std::norm(a.v[i]) + std::norm(b.v[i]);
    }
    DifferenceValues d;
    auto cp = clip_profile(a.xs, {U2, V2, uu, vv}, lim.lo, lim.hi);
    if (cp.xs.size() < 2) return d;
    d.L_U = trapezoid(cp.xs, cp.cols[0]);
    d.L_V = trapezoid(cp.xs, cp.cols[1]);
    d.L1 = d.L_U + fc.K1 * d.L_V;
    d.D1 = product_integral(cp.xs, cp.cols[0], cp.cols[3]) + product_integral(cp.xs, cp.cols[2], cp.cols[1]);
    d.Q1 = ordered_pair_integral(cp.xs, cp.cols[0], cp.cols[3]) +
           ordered_pair_integral(cp.xs, cp.cols[2], cp.cols[1]);
    d.F1 = d.L1 + fc.C1 * d.Q1;
    return d;
}

FunctionalReport diff_functionals(const Trajectory& ta, const Trajectory& tb,
                                  const TriangleDomain& tri, const FunctionalConfig& fc) {
    if (ta.slices.size() != tb.slices.size()) throw ConfigError("diff_functionals: mismatched grids");
    FunctionalReport r = compute_functionals(ta, tri, fc);
    r.has_difference = true;
    const BoundaryCurve& curve = ta.config.curve;
    for (std::size_t k = 0; k < ta.slices.size(); ++k) {
        const SpinorField& a = ta.slices[k];
        if (std::find(r.times.begin(), r.times.end(), a.t) == r.times.end()) continue;
        DifferenceValues d = difference_values(a, tb.slices[k], tri, curve, fc);
        r.L1.push_back(d.L1);
        r.D1.push_back(d.D1);
        r.Q1.push_back(d.Q1);
        r.F1.push_back(d.F1);
    }
    return r;
}

}  // namespace gndirac
