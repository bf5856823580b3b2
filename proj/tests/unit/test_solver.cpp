#include <doctest.h>

#include <cmath>
#include <cstring>

#include "gndirac/errors.hpp"
#include "gndirac/solver.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace gndirac;

namespace {

using Exact = std::function<std::pair<complex, complex>(double)>;

double max_nodal_error(const SpinorField& s, const Exact& exact) {
    double e = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        auto [u, v] = exact(s.xs[i]);
        e = std::max({e, std::abs(s.u[i] - u), std::abs(s.v[i] - v)});
    }
    return e;
}

bool bitwise_equal(const SpinorField& a, const SpinorField& b) {
    if (a.size() != b.size()) return false;
    return std::memcmp(a.xs.data(), b.xs.data(), a.size() * sizeof(double)) == 0 &&
           std::memcmp(a.u.data(), b.u.data(), a.size() * sizeof(complex)) == 0 &&
           std::memcmp(a.v.data(), b.v.data(), a.size() * sizeof(complex)) == 0;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("nonlinear terms") {
    auto [a1, a2] = eval_nonlinear(NonlinearityParams::thirring(0.0), 1.0, 2.0);
    CHECK(a1 == complex(4.0));
    CHECK(a2 == complex(2.0));
    auto [b1, b2] = eval_nonlinear(NonlinearityParams::gross_neveu(0.0), complex(0.0, 1.0), 1.0);
    CHECK(std::abs(b1) == 0.0);
    CHECK(std::abs(b2) == 0.0);
    auto [c1, c2] = eval_nonlinear(NonlinearityParams::gross_neveu(0.0), 1.0, 1.0);
    CHECK(c1 == complex(1.0));
    CHECK(c2 == complex(1.0));
}

TEST_CASE("nonlinear terms are the conjugate gradients of W") {
    NonlinearityParams p{0.0, 0.7, -0.3};
    auto W = [&](complex u, complex v) {
        double br = 2.0 * (std::conj(u) * v).real();
        return p.alpha * std::norm(u) * std::norm(v) + p.beta * br * br;
    };
    complex u(0.3, -1.1), v(0.8, 0.4);
    const complex i(0.0, 1.0);
    double e = 1e-6;
    complex dWu = 0.5 * complex((W(u + e, v) - W(u - e, v)) / (2 * e),
                                (W(u + i * e, v) - W(u - i * e, v)) / (2 * e));
    complex dWv = 0.5 * complex((W(u, v + e) - W(u, v - e)) / (2 * e),
                                (W(u, v + i * e) - W(u, v - i * e)) / (2 * e));
    auto [n1, n2] = eval_nonlinear(p, u, v);
    CHECK(std::abs(n1 - dWu) < 1e-8);
    CHECK(std::abs(n2 - dWv) < 1e-8);
}

TEST_CASE("compatibility residuals") {
    auto stat = BoundaryCurve::static_wall(1.0);
    auto zero = check_compatibility(InitialData::zero(), stat, NonlinearityParams::gross_neveu(1.0));
    CHECK(zero.res0 == 0.0);
    REQUIRE(zero.res1);
    CHECK(*zero.res1 == 0.0);

    InitialData d;
    d.u = [](double) { return complex(1.0); };
    d.v = [](double) { return complex(2.0); };
    auto r = check_compatibility(d, stat, NonlinearityParams::free(0.0));
    CHECK(r.res0 == doctest::Approx(1.0));
    CHECK_FALSE(r.res1.has_value());

    // u0 = v0, free massless: only the derivative terms survive
    Profile g = Profile::gaussian(1.0, 0.3, 0.2);
    InitialData s = make_initial_data(g, g);
    auto q = check_compatibility(s, stat, NonlinearityParams::free(0.0));
    CHECK(q.res0 == 0.0);
    REQUIRE(q.res1);
    CHECK(*q.res1 == doctest::Approx(std::abs(2.0 * g.derivative(0.0))));
}

TEST_CASE("a step of the zero field is zero") {
    SolverConfig c = fixture::config(NonlinearityParams::gross_neveu(1.0), BoundaryCurve::static_wall(1.0), 1.0,
                                     0.125, 1.0);
    SpinorField s = sample_initial_data(InitialData::zero().u, InitialData::zero().v, c.grid);
    SpinorField n = step(s, c);
    CHECK(n.t == doctest::Approx(0.125));
    for (std::size_t i = 0; i < n.size(); ++i) {
        CHECK(n.u[i] == complex{});
        CHECK(n.v[i] == complex{});
    }
}

TEST_CASE("free transport copies along diagonals") {
    SolverConfig c = fixture::config(NonlinearityParams::free(0.0), BoundaryCurve::static_wall(1.0), 2.0,
                                     0.0625, 1.0);
    InitialData d = fixture::gn_bump();
    SpinorField s = sample_initial_data(d.u, d.v, c.grid);
    SpinorField n = step(s, c);
    REQUIRE(n.size() == s.size());
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        CHECK(n.u[i] == s.u[i - 1]);
        CHECK(n.v[i] == s.v[i + 1]);
    }
}

TEST_CASE("linear mass term: one step against the exact rotation") {
    // u = v = 1 locally: the system reduces to u' = i u
    double err[2];
    int k = 0;
    for (double h : {0.1, 0.05}) {
        SolverConfig c = fixture::config(NonlinearityParams::free(1.0), BoundaryCurve::static_wall(1.0), 3.0, h,
                                         2.0);
        SpinorField s = fixture::constant_field(c.grid.x_min, c.grid.x_max, h, 1.0, 1.0);
        SpinorField n = step(s, c);
        std::size_t mid = n.size() / 2;
        complex exact = std::polar(1.0, h);
        err[k++] = std::max(std::abs(n.u[mid] - exact), std::abs(n.v[mid] - exact));
    }
    CHECK(err[0] < 1e-3);
    CHECK(err[0] / err[1] == doctest::Approx(8.0).epsilon(0.05));
}

TEST_CASE("pure reflection at a static wall") {
    SolverConfig c = fixture::config(NonlinearityParams::free(0.0), BoundaryCurve::static_wall(1.0), 1.0, 0.125,
                                     1.0);
    complex val(0.3, -0.7);
    SpinorField s = fixture::constant_field(c.grid.x_min, c.grid.x_max, c.grid.h, val, val);
    SpinorField n = step(s, c);
    CHECK(n.first_node_on_boundary);
    CHECK(std::abs(n.u[0] - val) < 1e-15);
    CHECK(std::abs(n.v[0] - val) < 1e-15);
    auto [ub, vb] = boundary_closure(s, c);
    CHECK(std::abs(ub - val) < 1e-15);
    CHECK(std::abs(vb - val) < 1e-15);
}

TEST_CASE("lambda = 0 absorbs u at the wall") {
    SolverConfig c = fixture::config(NonlinearityParams::gross_neveu(1.0), BoundaryCurve::static_wall(0.0), 2.5,
                                     1.0 / 32, 2.0);
    Trajectory tr = run(c, fixture::gn_bump());
    for (const auto& s : tr.slices) CHECK(std::abs(s.u[0]) == 0.0);
}

TEST_CASE("box reflected by hand along characteristics") {
    // v0 box on [1,2], u0 = 0: u(x,t) = v0(t - x) for x < t
    SolverConfig c = fixture::config(NonlinearityParams::free(0.0), BoundaryCurve::static_wall(1.0), 2.0, 1.0 / 16,
                                     3.0, 0);
    InitialData d = make_initial_data(Profile{}, Profile::box(1.0, 1.5, 0.5));
    Trajectory tr = run(c, d);
    const SpinorField& f = tr.slices.back();
    CHECK(f.t == doctest::Approx(3.0));
    auto a = interpolate(f, 0.5), b = interpolate(f, 1.5);
    CHECK(std::abs(a->first) == 0.0);
    CHECK(std::abs(b->first - complex(1.0)) == 0.0);
}

TEST_CASE("free transport reproduces reflected transport exactly") {
    for (auto [u0, v0] : {std::pair{Profile::box(1.0, 1.5, 0.5), Profile::box(0.5, 1.0, 0.5)},
                          std::pair{Profile::bump(1.0, 1.0, 0.6), Profile::bump(0.7, 1.3, 0.6)}}) {
        SolverConfig c = fixture::config(NonlinearityParams::free(0.0), BoundaryCurve::static_wall(1.0), 2.0,
                                         1.0 / 64, 2.0);
        Trajectory tr = run(c, make_initial_data(u0, v0));
        auto fu = [&](double x) { return u0(x); };
        auto fv = [&](double x) { return v0(x); };
        double T = tr.slices.back().t;
        double e = max_nodal_error(tr.slices.back(),
                                   [&](double x) { return oracle::reflected_transport(fu, fv, x, T); });
        CHECK(e <= 1e-12);
        CHECK(tr.max_drift() <= 1e-12);
    }
}

TEST_CASE("zero data stays zero") {
    SolverConfig c = fixture::config(NonlinearityParams::thirring(1.0), BoundaryCurve::collapsing(4.0, 1.0)
                                                                          .with_equality_lambda(),
                                     2.0, 1.0 / 32, 2.0);
    Trajectory tr = run(c, InitialData::zero());
    CHECK(tr.E0 == 0.0);
    CHECK(tr.max_drift() == 0.0);
    for (const auto& s : tr.slices)
        for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(s.u[i]) + std::abs(s.v[i]) == 0.0);
}

TEST_CASE("linear massive system against the spectral solution") {
    // interior data: nothing reaches the wall before t_final
    Profile pu = Profile::gaussian(1.0, 3.0, 0.05), pv = Profile::gaussian(0.5, 3.2, 0.05);
    auto fu = [&](double x) { return pu(x); };
    auto fv = [&](double x) { return pv(x); };
    const double T = 1.0;
    oracle::LinearDiracSpectral ex(fu, fv, 1.0, -5.0, 20.0, 512);
    double err[3];
    int k = 0;
    for (double h : {1.0 / 64, 1.0 / 128, 1.0 / 256}) {
        SolverConfig c = fixture::config(NonlinearityParams::free(1.0), BoundaryCurve::static_wall(1.0), 5.0, h, T,
                                         0);
        Trajectory tr = run(c, make_initial_data(pu, pv));
        const SpinorField& s = tr.slices.back();
        double acc = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            auto [u, v] = ex.at(s.xs[i], T);
            acc += h * (std::norm(s.u[i] - u) + std::norm(s.v[i] - v));
        }
        err[k++] = std::sqrt(acc);
    }
    double p1 = std::log2(err[0] / err[1]), p2 = std::log2(err[1] / err[2]);
    CHECK(p1 >= 1.7);
    CHECK(p1 <= 2.3);
    CHECK(p2 >= 1.7);
    CHECK(p2 <= 2.3);
}

TEST_CASE("modulus of u is carried exactly when beta = 0 and m = 0") {
    Profile pu = Profile::bump(1.0, 1.2, 0.6), pv = Profile::bump(0.8, 1.0, 0.6);
    for (double alpha : {0.0, 1.0}) {
        SolverConfig c = fixture::config({0.0, alpha, 0.0}, BoundaryCurve::static_wall(1.0), 2.0, 1.0 / 64, 1.5);
        Trajectory tr = run(c, make_initial_data(pu, pv));
        double worst = 0.0;
        for (const auto& s : tr.slices)
            for (std::size_t i = 0; i < s.size(); ++i)
                if (s.xs[i] - s.t >= 0.0) worst = std::max(worst, std::abs(std::abs(s.u[i]) - std::abs(pu(s.xs[i] - s.t))));
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("phase covariance") {
    SolverConfig c = fixture::config(NonlinearityParams::gross_neveu(1.0), BoundaryCurve::linear(-0.3, 1.0)
                                                                             .with_equality_lambda(),
                                     2.5, 1.0 / 32, 1.5, 0);
    InitialData d = fixture::gn_bump();
    const double th = 0.9;
    Trajectory a = run(c, d), b = run(c, d.phase_rotated(th));
    const SpinorField &fa = a.slices.back(), &fb = b.slices.back();
    REQUIRE(fa.size() == fb.size());
    complex ph = std::polar(1.0, th);
    for (std::size_t i = 0; i < fa.size(); ++i) {
        CHECK(std::abs(fa.u[i] * ph - fb.u[i]) < 1e-12);
        CHECK(std::abs(fa.v[i] * ph - fb.v[i]) < 1e-12);
    }
}

TEST_CASE("runs are bitwise deterministic") {
    SolverConfig c = fixture::config(NonlinearityParams::thirring(1.0), BoundaryCurve::collapsing(4.0, 1.0)
                                                                          .with_equality_lambda(),
                                     2.5, 1.0 / 32, 2.0);
    Trajectory a = run(c, fixture::gn_bump()), b = run(c, fixture::gn_bump());
    REQUIRE(a.slices.size() == b.slices.size());
    for (std::size_t k = 0; k < a.slices.size(); ++k) CHECK(bitwise_equal(a.slices[k], b.slices[k]));
    CHECK(a.config_hash == b.config_hash);
}

TEST_CASE("assumption and support violations are configuration errors") {
    SolverConfig bad = fixture::config(NonlinearityParams::gross_neveu(1.0), BoundaryCurve::linear(0.5, 2.0), 2.0,
                                       1.0 / 32, 1.0);
    try {
        run(bad, fixture::gn_bump());
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("H2") != std::string::npos);
    }
    SolverConfig narrow = fixture::config(NonlinearityParams::gross_neveu(1.0), BoundaryCurve::static_wall(1.0),
                                          1.0, 1.0 / 32, 1.0);
    try {
        run(narrow, fixture::gn_bump());
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("support") != std::string::npos);
    }
    SolverConfig c = narrow;
    c.picard_max_iters = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = narrow;
    c.picard_tol = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("charge never increases under a strictly dissipative wall") {
    for (auto curve : {BoundaryCurve::static_wall(0.5), BoundaryCurve::linear(-0.5, 0.5)}) {
        SolverConfig c = fixture::config(NonlinearityParams::gross_neveu(1.0), curve, 2.5, 1.0 / 64, 2.0, 0);
        Trajectory tr = run(c, fixture::gn_bump());
        CHECK(tr.max_charge_increase() <= 1e-10);
        CHECK(tr.charges.back() < tr.E0);
    }
}

TEST_CASE("moving wall slices") {
    BoundaryCurve curve = BoundaryCurve::collapsing(4.0, 1.0).with_equality_lambda();
    SolverConfig c = fixture::config(NonlinearityParams::gross_neveu(1.0), curve, 2.5, 1.0 / 32, 3.0);
    Trajectory tr = run(c, fixture::gn_bump());
    CHECK(tr.slices.size() == c.grid.steps() + 1);
    CHECK(tr.charges.size() == tr.slices.size());
    for (const auto& s : tr.slices) {
        CHECK_NOTHROW(s.check_invariants());
        REQUIRE(s.first_node_on_boundary);
        CHECK(std::abs(s.xs[0] - curve.z(s.t)) < 1e-12);
        CHECK(std::abs(s.u[0] - curve.lambda(s.t) * s.v[0]) < 1e-12);
        CHECK(s.xs[1] > s.xs[0]);
    }
    // advancing wall: nodes are dropped as it moves right
    SolverConfig a = fixture::config(NonlinearityParams::gross_neveu(1.0), BoundaryCurve::linear(0.5, 1.0), 2.5,
                                     1.0 / 32, 1.0);
    Trajectory ta = run(a, fixture::gn_bump());
    CHECK(ta.slices.back().size() < ta.slices.front().size());
    CHECK(ta.max_charge_increase() <= 1e-10);
}

TEST_CASE("snapshot stride") {
    SolverConfig c = fixture::config(NonlinearityParams::gross_neveu(1.0), BoundaryCurve::static_wall(1.0), 2.5,
                                     1.0 / 32, 1.0, 0);
    Trajectory tr = run(c, fixture::gn_bump());
    CHECK(tr.slices.size() == 2);
    CHECK(tr.charges.size() == 33);
    CHECK_FALSE(tr.has_every_step());
    c.snapshot_stride = 8;
    Trajectory t8 = run(c, fixture::gn_bump());
    CHECK(t8.slices.size() == 5);
    CHECK(t8.at_step(16).t == doctest::Approx(0.5));
    CHECK_THROWS(t8.at_step(3));
}

TEST_CASE("Picard blow-up is reported as a step failure") {
    SolverConfig c = fixture::config(NonlinearityParams::thirring(0.0), BoundaryCurve::static_wall(1.0), 2.5,
                                     0.25, 1.0);
    CHECK_THROWS_AS(run(c, fixture::gn_bump(40.0)), StepFailure);
}

TEST_CASE("incompatible data is a warning, not an error") {
    SolverConfig c = fixture::config(NonlinearityParams::free(0.0), BoundaryCurve::static_wall(1.0), 1.5, 1.0 / 32,
                                     1.0);
    InitialData d = make_initial_data(Profile::box(1.0, 0.5, 0.5), Profile{});
    Trajectory tr = run(c, d);
    CHECK(tr.compatibility.res0 == doctest::Approx(1.0));
    bool warned = false;
    for (const auto& w : tr.warnings) warned = warned || w.find("compatibility") != std::string::npos;
    CHECK(warned);
}

}
