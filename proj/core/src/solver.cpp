#include "gndirac/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <tuple>

#include "gndirac/errors.hpp"

namespace gndirac {

namespace {

std::string sci3(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}


const complex I{0.0, 1.0};

bool finite(complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

struct Rhs {
    const NonlinearityParams& p;
    complex F(complex u, complex v) const { return I * (p.m * v - eval_nonlinear(p, u, v).first); }
    complex G(complex u, complex v) const { return I * (p.m * u - eval_nonlinear(p, u, v).second); }
};

// Fixed-point iteration on up to two complex unknowns.
struct Picard {
    const SolverConfig& cfg;
    StepStats& stats;

    template <class Map>
    void solve(complex& a, complex& b, Map map, double x, double t) {
        double first = -1.0, d = 0.0;
        int it = 0;
        for (; it < cfg.picard_max_iters; ++it) {
            auto [na, nb] = map(a, b);
            d = std::max(std::abs(na - a), std::abs(nb - b));
            a = na;
            b = nb;
            if (!finite(a) || !finite(b)) fail(x, t);
            if (first < 0.0) first = d;
            double scale = std::max(1.0, std::abs(a) + std::abs(b));
            if (d <= cfg.picard_tol * scale) {
                ++it;
                break;
            }
        }
        stats.cells++;
        stats.max_iters = std::max(stats.max_iters, it);
        double scale = std::max(1.0, std::abs(a) + std::abs(b));
        if (d > cfg.picard_tol * scale) {
            if (it >= 2 && d > first) fail(x, t);
            stats.unconverged++;
        }
    }

    [[noreturn]] void fail(double x, double t) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "Picard iteration diverged on the cell at x=%.12g, t=%.12g", x, t);
        throw StepFailure(buf, x, t);
    }
};

// Grid index view of a slice: boundary node at xs[0], grid nodes from grid_first.
struct SliceView {
    const SpinorField& s;
    const GridSpec& grid;
    long g;
    long n;
    bool snapped;  // boundary node sits on grid node g-1

    SliceView(const SpinorField& f, const GridSpec& gr, double tol) : s(f), grid(gr) {
        g = f.grid_first;
        n = static_cast<long>(gr.cells());
        snapped = g >= 1 && std::abs(gr.node(g - 1) - f.xs[0]) <= tol;
    }
    bool present(long j) const { return j >= g || (snapped && j == g - 1); }
    complex u(long j) const {
        if (j > n) return {};
        if (j < g) return s.u[0];
        return s.u[static_cast<std::size_t>(1 + j - g)];
    }
    complex v(long j) const {
        if (j > n) return {};
        if (j < g) return s.v[0];
        return s.v[static_cast<std::size_t>(1 + j - g)];
    }
};

long first_grid_after(const GridSpec& grid, double z, double tol) {
    long j = static_cast<long>(std::floor((z - grid.x_min) / grid.h));
    if (j < 0) j = 0;
    while (j > 0 && grid.node(j - 1) > z + tol) --j;
    while (grid.node(j) <= z + tol) ++j;
    return j;
}

void require_boundary_slice(const SpinorField& f, const SolverConfig& cfg) {
    if (!f.first_node_on_boundary || f.grid_first < 0)
        throw ConfigError("step: slice must start with a boundary node");
    if (f.t + cfg.grid.h > cfg.grid.t_final + 1e-9 * cfg.grid.h)
        throw DomainError("step: t + h exceeds t_final");
}

std::pair<complex, complex> closure(const SpinorField& f, const SolverConfig& cfg, StepStats& st) {
    const double h = cfg.grid.h;
    const double t1 = f.t + h;
    const double z1 = cfg.curve.z(t1);
    const complex lam = cfg.curve.lambda(t1);
    auto foot = interpolate(f, z1 + h, 1e-9 * h);
    if (!foot) throw DomainError("boundary closure: characteristic foot outside the slice");
    auto [uf, vf] = *foot;
    Rhs r{cfg.params};
    complex gf = r.G(uf, vf);
    complex vb = vf + h * gf, dummy = 0.0;
    Picard pc{cfg, st};
    pc.solve(vb, dummy, [&](complex v, complex) {
        return std::make_pair(vf + 0.5 * h * (gf + r.G(lam * v, v)), complex{});
    }, z1, t1);
    return {lam * vb, vb};
}

}  // namespace

void SolverConfig::validate() const {
    params.validate();
    grid.validate();
    if (!(picard_tol > 0.0)) throw ConfigError("picard_tol must be positive");
    if (picard_max_iters < 1) throw ConfigError("picard_max_iters must be >= 1");
    if (snapshot_stride < 0) throw ConfigError("snapshot_stride must be >= 0");
    if (!curve.z || !curve.z_t || !curve.lambda) throw ConfigError("boundary curve is incomplete");
}

std::pair<complex, complex> eval_nonlinear(const NonlinearityParams& p, complex u, complex v) {
    double br = 2.0 * (std::conj(u) * v).real();
    double nu = std::norm(u), nv = std::norm(v);
    complex n1 = p.alpha * u * nv + 2.0 * p.beta * v * br;
    complex n2 = p.alpha * v * nu + 2.0 * p.beta * u * br;
    return {n1, n2};
}

CompatibilityResidual check_compatibility(const InitialData& data, const BoundaryCurve& curve,
                                          const NonlinearityParams& p) {
    CompatibilityResidual r;
    complex u0 = data.u ? data.u(0.0) : complex{};
    complex v0 = data.v ? data.v(0.0) : complex{};
    complex lam = curve.lambda(0.0);
    r.res0 = std::abs(u0 - lam * v0);
    if (!data.du || !data.dv) return r;
    double zt = curve.z_t(0.0);
    complex lam_t = curve.lambda_t ? curve.lambda_t(0.0) : complex{};
    auto [n1, n2] = eval_nonlinear(p, u0, v0);
    complex lhs = (1.0 - zt) * data.du(0.0) + lam * (1.0 + zt) * data.dv(0.0) +
                  I * lam * (p.m * u0 - n2) - I * (p.m * v0 - n1) + lam_t * v0;
    r.res1 = std::abs(lhs);
    return r;
}

std::pair<complex, complex> boundary_closure(const SpinorField& f, const SolverConfig& cfg) {
    require_boundary_slice(f, cfg);
    StepStats st;
    return closure(f, cfg, st);
}

SpinorField step(const SpinorField& f, const SolverConfig& cfg, StepStats* stats_out) {
    require_boundary_slice(f, cfg);
    StepStats local;
    StepStats& st = stats_out ? *stats_out : local;
    const GridSpec& grid = cfg.grid;
    const double h = grid.h;
    const double tol = 1e-9 * h;
    const double t = f.t, t1 = t + h;
    const BoundaryCurve& curve = cfg.curve;
    Rhs r{cfg.params};
    Picard pc{cfg, st};

    SliceView old(f, grid, tol);
    const long n = old.n;
    const double z1 = curve.z(t1);
    const long g1 = first_grid_after(grid, z1, tol);
    if (g1 > n) throw ConfigError("step: boundary left the window");
    if (g1 < old.g - 2 || g1 > old.g + 2)
        throw ConfigError("step: boundary moved more than one cell in a step");

    auto [ub1, vb1] = closure(f, cfg, st);
    const complex vb0 = f.v[0];

    const std::size_t count = static_cast<std::size_t>(n - g1 + 1);
    std::vector<complex> nu(count), nv(count);
    std::vector<char> u_known(count, 0), v_known(count, 0);
    auto at = [&](long j) { return static_cast<std::size_t>(j - g1); };

    // full squares: SW present at t, NW a free grid node at t+h
    for (long j = g1; j <= n; ++j) {
        if (!old.present(j)) continue;
        const complex usw = old.u(j), vse = old.v(j + 1);
        const complex f0 = r.F(usw, vse), g0 = r.G(usw, vse);
        complex un = usw + h * f0, vn = vse + h * g0;  // explicit predictor
        pc.solve(un, vn, [&](complex a, complex b) {
            complex U = 0.5 * (usw + a), V = 0.5 * (vse + b);
            return std::make_pair(usw + h * r.F(U, V), vse + h * r.G(U, V));
        }, grid.node(j) + 0.5 * h, t + 0.5 * h);
        nv[at(j)] = vn;
        v_known[at(j)] = 1;
        if (j + 1 <= n) {
            nu[at(j + 1)] = un;
            u_known[at(j + 1)] = 1;
        }
    }

    // Gamma_u sub-step from the boundary: returns the foot state for node j
    auto boundary_foot = [&](long j) {
        const double b = grid.node(j) - t1;
        auto fz = [&](double s) { return curve.z(s) - s - b; };
        auto dfz = [&](double s) { return curve.z_t(s) - 1.0; };
        double s;
        if (fz(t) <= 0.0) s = t;
        else if (fz(t1) >= 0.0) s = t1;
        else s = decreasing_root(fz, dfz, t, t1, 1e-14 * (1.0 + std::abs(b)));
        const double th = (s - t) / h;
        const complex vb = (1.0 - th) * vb0 + th * vb1;
        const complex ub = curve.lambda(s) * vb;
        return std::make_tuple(ub, vb, t1 - s);
    };

    for (long j = g1; j <= n; ++j) {
        const std::size_t k = at(j);
        if (u_known[k] && v_known[k]) continue;
        const double xj = grid.node(j);
        if (!v_known[k]) {
            // node uncovered by a receding boundary
            const complex ue = old.u(j + 1), ve = old.v(j + 1);
            const complex ge = r.G(ue, ve);
            auto [ubs, vbs, hs] = boundary_foot(j);
            const complex fb = r.F(ubs, vbs);
            complex a = u_known[k] ? nu[k] : ubs, b = ve + h * ge;
            const bool fixed_u = u_known[k];
            pc.solve(a, b, [&](complex ua, complex vb) {
                complex na = fixed_u ? ua : ubs + 0.5 * hs * (fb + r.F(ua, vb));
                return std::make_pair(na, ve + 0.5 * h * (ge + r.G(ua, vb)));
            }, xj, t1);
            nu[k] = a;
            nv[k] = b;
            u_known[k] = v_known[k] = 1;
            continue;
        }
        const complex vj = nv[k];
        complex a, dummy = 0.0;
        if (old.present(j - 1)) {
            const complex uo = old.u(j - 1), vo = old.v(j - 1);
            const complex fo = r.F(uo, vo);
            a = uo + h * fo;
            pc.solve(a, dummy, [&](complex ua, complex) {
                return std::make_pair(uo + 0.5 * h * (fo + r.F(ua, vj)), complex{});
            }, xj, t1);
        } else {
            auto [ubs, vbs, hs] = boundary_foot(j);
            const complex fb = r.F(ubs, vbs);
            a = ubs;
            pc.solve(a, dummy, [&](complex ua, complex) {
                return std::make_pair(ubs + 0.5 * hs * (fb + r.F(ua, vj)), complex{});
            }, xj, t1);
        }
        nu[k] = a;
        u_known[k] = 1;
    }

    SpinorField out;
    out.t = t1;
    out.first_node_on_boundary = true;
    out.grid_first = g1;
    out.xs.reserve(count + 1);
    out.u.reserve(count + 1);
    out.v.reserve(count + 1);
    out.xs.push_back(z1);
    out.u.push_back(ub1);
    out.v.push_back(vb1);
    for (long j = g1; j <= n; ++j) {
        out.xs.push_back(grid.node(j));
        out.u.push_back(nu[at(j)]);
        out.v.push_back(nv[at(j)]);
    }
    return out;
}

double Trajectory::max_drift() const {
    double d = 0.0;
    for (double q : charges) d = std::max(d, std::abs(q - E0));
    return d;
}

double Trajectory::max_charge_increase() const {
    double d = -INFINITY;
    for (std::size_t i = 1; i < charges.size(); ++i) d = std::max(d, charges[i] - charges[i - 1]);
    return charges.size() > 1 ? d : 0.0;
}

const SpinorField& Trajectory::at_step(std::size_t n) const {
    double t = static_cast<double>(n) * config.grid.h;
    auto it = std::lower_bound(slices.begin(), slices.end(), t - 1e-9 * config.grid.h,
                               [](const SpinorField& s, double x) { return s.t < x; });
    if (it == slices.end() || std::abs(it->t - t) > 1e-9 * config.grid.h)
        throw DomainError("trajectory: step " + std::to_string(n) + " was not stored");
    return *it;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string config_fingerprint(const SolverConfig& c) {
    std::ostringstream os;
    os.precision(17);
    os << "m=" << c.params.m << ";alpha=" << c.params.alpha << ";beta=" << c.params.beta
       << ";x_min=" << c.grid.x_min << ";x_max=" << c.grid.x_max << ";h=" << c.grid.h
       << ";t_final=" << c.grid.t_final << ";kind=" << to_string(c.curve.kind) << ";c=" << c.curve.c
       << ";T0=" << c.curve.T0 << ";lambda=" << c.curve.lambda_const.real() << ","
       << c.curve.lambda_const.imag() << ";eq=" << c.curve.equality_case
       << ";tol=" << c.picard_tol << ";iters=" << c.picard_max_iters
       << ";stride=" << c.snapshot_stride;
    return os.str();
}

Trajectory run(const SolverConfig& cfg, const InitialData& data) {
    cfg.validate();
    const GridSpec& grid = cfg.grid;
    const std::size_t steps = grid.steps();

    std::vector<double> node_times;
    node_times.reserve(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) node_times.push_back(static_cast<double>(k) * grid.h);
    ValidationReport rep = validate_assumptions(cfg.curve, grid.t_final, 257, node_times);
    if (!rep.h1_ok) throw ConfigError("assumption " + rep.message);
    if (!rep.h2_ok) throw ConfigError("assumption " + rep.message);

    Trajectory tr;
    tr.config = cfg;
    tr.config_hash = hex64(fnv1a64(config_fingerprint(cfg)));
    if (rep.max_lambda_sq > 1e6)
        tr.warnings.push_back("|lambda|^2 exceeds 1e6; boundary reflection is ill-conditioned");

    double zmin = 0.0;
    for (double t : node_times) zmin = std::min(zmin, cfg.curve.z(t));
    if (grid.x_min > zmin + 1e-9 * grid.h)
        throw ConfigError("window: x_min lies right of the boundary at some time");

    SpinorField s = sample_initial_data(data.u, data.v, grid);
    // nothing may start within reach of the right edge
    double peak = 0.0, edge = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        double a = std::max(std::abs(s.u[i]), std::abs(s.v[i]));
        peak = std::max(peak, a);
        if (s.xs[i] > grid.x_max - grid.t_final + 1e-9 * grid.h) edge = std::max(edge, a);
    }
    if (edge > 1e-14 * std::max(peak, 1e-300) && edge > 0.0)
        throw ConfigError("support: initial data is not supported away from the right window edge");

    tr.compatibility = check_compatibility(data, cfg.curve, cfg.params);
    if (tr.compatibility.res0 > 1e-10)
        tr.warnings.push_back("compatibility: |u0(0) - lambda(0) v0(0)| = " +
                              sci3(tr.compatibility.res0));
    if (tr.compatibility.res1 && *tr.compatibility.res1 > 1e-10)
        tr.warnings.push_back("compatibility: first-order residual = " +
                              sci3(*tr.compatibility.res1));

    tr.E0 = total_charge(s);
    {
        // a priori ceiling from the pointwise bounds; advisory only
        const auto& p = cfg.params;
        double T = grid.t_final;
        double lam2 = std::max(1.0, rep.max_lambda_sq);
        double ceiling = (lam2 + 1.0) * (peak * peak + p.m * tr.E0) *
                         std::exp(2.0 * p.m * T + 16.0 * std::abs(p.beta) * tr.E0);
        double coupling = std::abs(p.alpha) + 4.0 * std::abs(p.beta);
        double c = grid.h * (p.m + coupling * ceiling);
        if (!(c < 1.0))
            tr.warnings.push_back("step-size check: h*(m + coupling*ceiling) = " + sci3(c) +
                                  " >= 1 (a priori bound only; Picard residuals are monitored)");
    }

    auto keep = [&](std::size_t k) {
        if (k == 0 || k == steps) return true;
        if (cfg.snapshot_stride == 0) return false;
        return k % static_cast<std::size_t>(cfg.snapshot_stride) == 0;
    };

    auto t_start = std::chrono::steady_clock::now();
    tr.times.push_back(0.0);
    tr.charges.push_back(tr.E0);
    if (keep(0)) tr.slices.push_back(s);
    StepStats st;
    for (std::size_t k = 1; k <= steps; ++k) {
        s = step(s, cfg, &st);
        s.t = static_cast<double>(k) * grid.h;
        tr.times.push_back(s.t);
        tr.charges.push_back(total_charge(s));
        if (keep(k)) tr.slices.push_back(s);
    }
    auto t_end = std::chrono::steady_clock::now();
    tr.stats.steps = steps;
    tr.stats.max_picard_iters = st.max_iters;
    tr.stats.cells = st.cells;
    tr.stats.unconverged_cells = st.unconverged;
    tr.stats.wall_seconds = std::chrono::duration<double>(t_end - t_start).count();
    if (st.unconverged > 0)
        tr.warnings.push_back(std::to_string(st.unconverged) +
                              " cells stopped before reaching picard_tol (still contracting)");
    return tr;
}

}  // namespace gndirac
