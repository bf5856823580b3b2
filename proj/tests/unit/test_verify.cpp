#include <doctest.h>

#include <cmath>

#include "gndirac/errors.hpp"
#include "gndirac/verify.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace gndirac;

namespace {

const BoundaryCurve wall = BoundaryCurve::static_wall(1.0);

Trajectory free_run(const InitialData& d, double h = 1.0 / 64, double T = 2.0) {
    return run(fixture::config(NonlinearityParams::free(0.0), wall, 2.5, h, T), d);
}

Trajectory gn_run(double h, double amp = 1.0, BoundaryCurve curve = BoundaryCurve::static_wall(1.0),
                  double T = 2.0) {
    return run(fixture::config(NonlinearityParams::gross_neveu(1.0), curve, 2.5, h, T), fixture::gn_bump(amp));
}

const CheckResult& find(const std::vector<CheckResult>& v, const std::string& name) {
    for (const auto& c : v)
        if (c.name == name) return c;
    FAIL("missing check " << name);
    return v.front();
}

// C-infinity bump exp(1 - 1/(1-s^2)) with its derivative
double cinf(double s) { return std::abs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0; }
double dcinf(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    double q = 1.0 - s * s;
    return cinf(s) * (-2.0 * s / (q * q));
}

TestFunction smooth_test_function(double xc, double tc, double rx, double rt, double theta) {
    complex ph = std::polar(1.0, theta);
    TestFunction f;
    f.f = [=](double x, double t) { return ph * cinf((x - xc) / rx) * cinf((t - tc) / rt); };
    f.f_x = [=](double x, double t) { return ph * dcinf((x - xc) / rx) / rx * cinf((t - tc) / rt); };
    f.f_t = [=](double x, double t) { return ph * cinf((x - xc) / rx) * dcinf((t - tc) / rt) / rt; };
    return f;
}

}  // namespace

TEST_SUITE("verify") {

TEST_CASE("check results") {
    CheckResult c = make_check("x", 1.0, 1.0, 0.0, true);
    CHECK(c.status == CheckStatus::pass);
    CHECK(c.margin == 0.0);
    CheckResult d = make_check("x", 1.0 + 1e-9, 1.0, 1e-10, true);
    CHECK(d.status == CheckStatus::fail);
    CHECK(d.failed());
    CheckResult e = make_check("x", 2.0, 1.0, 0.0, false);
    CHECK_FALSE(e.failed());
    CHECK(to_string(CheckStatus::refused) == "refused");
}

TEST_CASE("conservation residual") {
    Trajectory zero = free_run(InitialData::zero());
    CHECK(conservation_residual(zero, {1.0, 3.0, 0.0}) == 0.0);

    Trajectory tr = free_run(fixture::gn_bump());
    for (TriangleDomain t : {TriangleDomain{1.0, 3.0, 0.0}, TriangleDomain{0.5, 2.5, 0.5},
                             TriangleDomain{-1.0, 2.0, 0.0}, TriangleDomain{-2.0, 1.0, 0.0}})
        CHECK(conservation_residual(tr, t) <= 1e-12);
    ConservationBalance b = conservation_balance(tr, {1.0, 3.0, 0.0});
    CHECK(b.bottom > 0.0);
    CHECK(b.right > 0.0);
    CHECK(b.boundary == 0.0);

    TriangleDomain tri{0.5, 2.5, 0.0};
    double r1 = conservation_residual(gn_run(1.0 / 32), tri);
    double r2 = conservation_residual(gn_run(1.0 / 64), tri);
    CHECK(r1 > 0.0);
    CHECK(r1 / r2 >= 3.0);
    CHECK(r1 / r2 <= 5.0);
    CHECK_THROWS_AS(conservation_residual(tr, {1.0, 3.0, 0.01}), DomainError);
}

TEST_CASE("pointwise bounds") {
    Trajectory zero = free_run(InitialData::zero());
    for (const auto& c : pointwise_bounds(zero, 0.0)) {
        CHECK(c.status == CheckStatus::pass);
        CHECK(c.margin == c.bound);
    }
    // m = beta = 0: the bounds are attained
    Trajectory tr = free_run(fixture::gn_bump());
    for (const auto& c : pointwise_bounds(tr, tr.E0)) {
        CHECK(c.status == CheckStatus::pass);
        CHECK(std::abs(c.margin) <= 1e-12);
    }
    Trajectory gn = gn_run(1.0 / 64);
    auto checks = pointwise_bounds(gn, gn.E0);
    REQUIRE(checks.size() == 3);
    for (const auto& c : checks) {
        CHECK(c.asserted);
        CHECK(c.status == CheckStatus::pass);
        CHECK(c.margin > 0.0);
    }
}

TEST_CASE("characteristic line charges") {
    InitialData box = make_initial_data(Profile::box(1.0, 1.5, 0.5), Profile{});
    const double h = 1.0 / 64;
    Trajectory tr = free_run(box, h);
    // x = 2.5 - s meets the box of u(., s) = u0(. - s) for 2.5 - 2s in [1, 2]
    double line = characteristic_line_integral(tr, {CharSegment::Family::gamma_v, 1.0, 1.5, 0.0});
    CHECK(line == doctest::Approx(0.5).epsilon(2.0 * h));
    CHECK(line <= tr.E0);
    Trajectory zero = free_run(InitialData::zero());
    CHECK(characteristic_line_integral(zero, {CharSegment::Family::gamma_u, 3.0, 2.0, 0.0}) == 0.0);

    Trajectory gn = gn_run(1.0 / 64);
    auto segs = sample_segments(gn, 0.25);
    REQUIRE(segs.size() > 10);
    bool both = false;
    for (const auto& s : segs) {
        CheckResult c = characteristic_line_charge(gn, s, gn.E0);
        CHECK(c.status == CheckStatus::pass);
        both = both || s.family == CharSegment::Family::gamma_u;
    }
    CHECK(both);
    // a full diagonal through the v support carries strictly less than E0
    double full = characteristic_line_integral(gn, {CharSegment::Family::gamma_u, 2.0, 2.0, 0.0});
    CHECK(full > 0.0);
    CHECK(full < gn.E0);

    CHECK_THROWS_AS(characteristic_line_integral(gn, {CharSegment::Family::gamma_v, gn.config.grid.x_max, 2.0, 0.0}),
                    DomainError);
    CHECK_THROWS_AS(characteristic_line_integral(gn, {CharSegment::Family::gamma_u, 1.0, 3.0, 0.0}), DomainError);
    SolverConfig c = gn.config;
    c.snapshot_stride = 0;
    Trajectory sparse = run(c, fixture::gn_bump());
    CHECK_THROWS_AS(CharacteristicSampler{sparse}, DomainError);
}

TEST_CASE("Glimm functional bookkeeping under free transport") {
    Profile pu = Profile::bump(1.0, 1.6, 0.6), pv = Profile::bump(0.8, 2.0, 0.5);
    const double h = 1.0 / 128;
    Trajectory tr = run(fixture::config(NonlinearityParams::free(0.0), wall, 2.5, h, 1.0),
                        make_initial_data(pu, pv));
    TriangleDomain tri{1.0, 3.0, 0.0};
    FunctionalConfig fc;
    FunctionalReport r = compute_functionals(tr, tri, fc);
    REQUIRE(r.size() == 129);
    auto mu = [&](double x) { return std::norm(pu(x)); };
    auto mv = [&](double x) { return std::norm(pv(x)); };
    auto integral = [](auto f, double a, double b) {
        double s = 0.0;
        const int n = 400;
        for (int k = 0; k < n; ++k) s += oracle::gauss(f, a + (b - a) * k / n, a + (b - a) * (k + 1) / n);
        return s;
    };
    for (std::size_t k = 0; k < r.size(); k += 16) {
        double t = r.times[k];
        double expect = integral(mu, 1.0, 3.0 - 2.0 * t) + integral(mv, 1.0 + 2.0 * t, 3.0);
        CHECK(r.L0[k] == doctest::Approx(expect).epsilon(1e-3));
        if (k > 0) CHECK(r.L0[k] <= r.L0[k - 16]);
    }
    auto g = glimm_monotonicity(tr, tri, fc);
    CHECK(g[0].status == CheckStatus::pass);
    CHECK(g[1].status == CheckStatus::skipped);
    CHECK(g[1].note.find("hypothesis not met") != std::string::npos);
    CHECK(g[2].status == CheckStatus::skipped);
}

TEST_CASE("Glimm checks at small amplitude") {
    FunctionalConfig fc = FunctionalConfig::defaults(wall, 2.0, NonlinearityParams::gross_neveu(1.0));
    TriangleDomain interior{0.5, 2.5, 0.0}, edge{-1.0, 2.0, 0.0};
    Trajectory zero = gn_run(1.0 / 32, 0.0);
    for (const auto& c : glimm_monotonicity(zero, interior, fc)) CHECK(c.status != CheckStatus::fail);

    Trajectory small = gn_run(1.0 / 64, 1e-2);
    auto a = glimm_monotonicity(small, interior, fc);
    CHECK(a[0].status == CheckStatus::pass);
    CHECK(a[1].status == CheckStatus::pass);
    CHECK(a[1].margin > 0.0);
    auto e = glimm_monotonicity(small, edge, fc);
    CHECK(e[0].status == CheckStatus::pass);
    CHECK(e[1].status == CheckStatus::skipped);
    CHECK(e[2].status == CheckStatus::reported);
    CHECK(std::isfinite(e[2].measured));

    Trajectory twice = gn_run(1.0 / 64, 2e-2);
    auto b = glimm_monotonicity(twice, interior, fc);
    REQUIRE(b[1].status == CheckStatus::pass);
    CHECK(b[1].margin / b[1].bound <= a[1].margin / a[1].bound);

    Trajectory large = gn_run(1.0 / 32);
    auto l = glimm_monotonicity(large, interior, fc);
    CHECK(l[0].status == CheckStatus::pass);
    CHECK(l[1].status == CheckStatus::skipped);
    auto off = glimm_monotonicity(large, {-3.0, -1.0, 0.0}, fc);
    for (const auto& c : off) CHECK(c.status == CheckStatus::skipped);
}

TEST_CASE("stability experiment") {
    SolverConfig fcfg = fixture::config(NonlinearityParams::free(0.0), wall, 2.5, 1.0 / 32, 2.0);
    InitialData d = fixture::gn_bump();
    InitialData pert = make_initial_data(Profile::bump(1.0, 1.2, 0.5), Profile::bump(-0.5, 0.8, 0.5));
    TriangleDomain tri{0.0, 4.0, 0.0};
    StabilityReport rep = stability_experiment(fcfg, d, pert, {0.0, 1e-2, 1e-3}, tri);
    REQUIRE(rep.rows.size() == 3);
    CHECK(rep.rows[0].max_abs_diff == 0.0);
    CHECK(find(rep.checks, "stability.zero_difference").status == CheckStatus::pass);
    for (std::size_t k = 1; k < 3; ++k) CHECK(rep.rows[k].ratio_t == doctest::Approx(1.0).epsilon(1e-12));

    SolverConfig gcfg = fixture::config(NonlinearityParams::gross_neveu(1.0), wall, 2.5, 1.0 / 32, 2.0);
    StabilityReport g = stability_experiment(gcfg, d, pert, {1e-2, 1e-3, 1e-4}, tri);
    CHECK(find(g.checks, "stability.ratio_t_uniform").status == CheckStatus::pass);
    CHECK(find(g.checks, "stability.ratio_Q_uniform").status == CheckStatus::pass);
    for (const auto& row : g.rows) CHECK(row.ratio_t >= 1.0 - 1e-12);
}

TEST_CASE("weak residual") {
    TestFunction phi = smooth_test_function(1.6, 0.9, 0.5, 0.5, 0.0);
    TestFunction psi = smooth_test_function(1.4, 0.9, 0.6, 0.5, 0.7);
    Trajectory zero = free_run(InitialData::zero());
    auto z = weak_residual(zero, phi, psi);
    CHECK(z.first == 0.0);
    CHECK(z.second == 0.0);

    // transport makes the integrand an exact derivative along each diagonal; what
    // remains is the trapezoid error of a C-infinity bump, below 1e-10 from h = 1/256
    Trajectory tr = free_run(fixture::gn_bump(), 1.0 / 256);
    auto r = weak_residual(tr, phi, psi);
    CHECK(r.first <= 1e-10);
    CHECK(r.second <= 1e-10);

    // the library's polynomial bump vanishes on the wall by construction
    TestFunction lib = make_test_function(wall, 1.0, 1.0, 0.8, 0.9);
    CHECK(std::abs(lib.f(0.0, 1.0)) == 0.0);
    double e = 1e-6;
    complex fd = (lib.f(0.9 + e, 1.1) - lib.f(0.9 - e, 1.1)) / (2 * e);
    CHECK(std::abs(fd - lib.f_x(0.9, 1.1)) < 1e-7);
    complex ft = (lib.f(0.9, 1.1 + e) - lib.f(0.9, 1.1 - e)) / (2 * e);
    CHECK(std::abs(ft - lib.f_t(0.9, 1.1)) < 1e-7);

    TestFunction on_wall = smooth_test_function(0.0, 1.0, 0.5, 0.5, 0.0);
    CHECK_THROWS_AS(weak_residual(tr, on_wall, psi), ConfigError);
    TestFunction at_end = smooth_test_function(1.0, 2.0, 0.5, 0.5, 0.0);
    CHECK_THROWS_AS(weak_residual(tr, at_end, psi), ConfigError);
}

TEST_CASE("charge identity and monotonicity") {
    Trajectory zero = free_run(InitialData::zero());
    ValidationReport eq = validate_assumptions(wall, 2.0, 65);
    CheckResult z = charge_identity(zero, eq);
    CHECK(z.status == CheckStatus::pass);
    CHECK(z.measured == 0.0);
    Trajectory tr = free_run(fixture::gn_bump());
    CHECK(charge_identity(tr, eq).measured <= 1e-12);

    auto half = BoundaryCurve::static_wall(0.5);
    Trajectory diss = gn_run(1.0 / 32, 1.0, half);
    CheckResult refused = charge_identity(diss, validate_assumptions(half, 2.0, 65));
    CHECK(refused.status == CheckStatus::refused);
    CHECK_FALSE(refused.failed());
    CHECK(charge_monotonicity(diss).status == CheckStatus::pass);

    auto coll = BoundaryCurve::collapsing(4.0, 1.0).with_equality_lambda();
    double d1 = gn_run(1.0 / 32, 1.0, coll).max_drift();
    double d2 = gn_run(1.0 / 64, 1.0, coll).max_drift();
    CHECK(d1 / d2 >= 3.0);
    CHECK(d1 / d2 <= 5.0);
}

TEST_CASE("convergence order") {
    auto final_slice = [](NonlinearityParams p, double h) {
        return run(fixture::config(p, wall, 2.5, h, 1.0, 0), fixture::gn_bump()).slices.back();
    };
    auto f1 = final_slice(NonlinearityParams::free(0.0), 1.0 / 16);
    auto f2 = final_slice(NonlinearityParams::free(0.0), 1.0 / 32);
    auto f3 = final_slice(NonlinearityParams::free(0.0), 1.0 / 64);
    ConvergenceResult ex = convergence_order(f1, 1.0 / 16, f2, 1.0 / 32, f3, 1.0 / 64);
    CHECK(ex.status == ConvergenceResult::Status::exact);
    CHECK(slice_l2_distance(f1, 1.0 / 16, f2, 1.0 / 32) < 1e-14);

    auto g1 = final_slice(NonlinearityParams::gross_neveu(1.0), 1.0 / 32);
    auto g2 = final_slice(NonlinearityParams::gross_neveu(1.0), 1.0 / 64);
    auto g3 = final_slice(NonlinearityParams::gross_neveu(1.0), 1.0 / 128);
    ConvergenceResult r = convergence_order(g1, 1.0 / 32, g2, 1.0 / 64, g3, 1.0 / 128);
    CHECK(r.status == ConvergenceResult::Status::ok);
    CHECK(r.order >= 1.7);
    CHECK(r.order <= 2.3);
    ConvergenceResult bad = convergence_order(g3, 1.0 / 128, g2, 1.0 / 64, g1, 1.0 / 32);
    CHECK(bad.status == ConvergenceResult::Status::not_asymptotic);
    CHECK(observed_order(4.0, 1.0) == 2.0);
}

TEST_CASE("triangle lattice covers every case") {
    auto lat = triangle_lattice(-3.0, 4.0, 2.0);
    CHECK(lat.size() > 50);
    for (const auto& t : lat) {
        CHECK(t.a >= -3.0);
        CHECK(t.b <= 4.0);
        CHECK(t.apex_t() <= 2.0 + 1e-12);
    }
    for (const BoundaryCurve& c : {wall, BoundaryCurve::collapsing(4.0, 1.0)}) {
        int seen[4] = {0, 0, 0, 0};
        for (const auto& t : lat) ++seen[static_cast<int>(classify_triangle(c, t).kind)];
        for (int k = 0; k < 4; ++k) CHECK(seen[k] > 0);
    }
}

TEST_CASE("smallness window") {
    SolverConfig c = fixture::config(NonlinearityParams::gross_neveu(1.0), wall, 2.5, 1.0 / 64, 1.0);
    InitialData d = fixture::gn_bump(0.05);
    SpinorField s0 = sample_initial_data(d.u, d.v, c.grid);
    double E0 = total_charge(s0);
    SmallnessWindow w = smallness_window(s0, wall, c.params, E0, 4.0, 0.01);
    CHECK(w.r > 0.0);
    CHECK(w.r < 1.0);
    CHECK(w.worst_direct <= 0.01 / 8.0);
    CHECK(w.worst_reflected <= 0.01 / 8.0);
    SpinorField z0 = sample_initial_data(InitialData::zero().u, InitialData::zero().v, c.grid);
    CHECK(smallness_window(z0, wall, NonlinearityParams::free(0.0), 0.0, 4.0, 0.01).r == 1.0);
}

TEST_CASE("suites") {
    CHECK(suite_names().size() == 8);
    SuiteContext ctx;
    ctx.config = fixture::config(NonlinearityParams::free(0.0), wall, 2.5, 1.0 / 32, 1.0);
    ctx.data = fixture::gn_bump();
    ctx.functionals = FunctionalConfig::defaults(wall, 1.0, ctx.config.params);
    CHECK_THROWS_AS(run_suite("nope", ctx), ConfigError);
    for (const auto& name : suite_names()) {
        auto checks = run_suite(name, ctx);
        CHECK_FALSE(checks.empty());
        for (const auto& c : checks) CHECK_MESSAGE(!c.failed(), name << ": " << c.name);
    }
    auto a = run_suite("pointwise", ctx), b = run_suite("pointwise", ctx);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].measured == b[k].measured);
        CHECK(a[k].margin == b[k].margin);
    }
}

}
