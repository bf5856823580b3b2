#include "gndirac/model.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "gndirac/errors.hpp"

namespace gndirac {

namespace {

bool finite(complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

// (1 - s^2)^4 style smooth bump on |s| < 1
double bump_shape(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    double q = 1.0 - s * s;
    return q * q * q * q;
}

double bump_shape_deriv(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    double q = 1.0 - s * s;
    return -8.0 * s * q * q * q;
}

}  // namespace

void NonlinearityParams::validate() const {
    if (!(m >= 0.0) || !std::isfinite(m)) throw ConfigError("mass m must be finite and >= 0");
    if (!std::isfinite(alpha) || !std::isfinite(beta))
        throw ConfigError("couplings alpha, beta must be finite");
}

std::size_t GridSpec::cells() const {
    double n = (x_max - x_min) / h;
    return static_cast<std::size_t>(std::llround(n));
}

std::size_t GridSpec::steps() const {
    return static_cast<std::size_t>(std::llround(t_final / h));
}

void GridSpec::validate() const {
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("grid: h must be positive");
    if (!(x_max > x_min)) throw ConfigError("grid: x_max must exceed x_min");
    if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ConfigError("grid: t_final must be positive");
    double n = (x_max - x_min) / h;
    if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n) || std::round(n) < 1.0)
        throw ConfigError("grid: (x_max - x_min)/h must be a positive integer");
    double s = t_final / h;
    if (std::abs(s - std::round(s)) > 1e-9 * std::max(1.0, s))
        throw ConfigError("grid: t_final must be an integer multiple of h");
}

GridSpec make_window(double extent, double h, double t_final, double min_z) {
    GridSpec g;
    g.h = h;
    g.t_final = t_final;
    g.x_min = std::floor(std::min(0.0, min_z) / h + 1e-9) * h;
    double right = std::ceil((extent + t_final) / h - 1e-9) * h + h;
    g.x_max = std::max(right, g.x_min + h);
    return g;
}

void SpinorField::check_invariants() const {
    if (u.size() != xs.size() || v.size() != xs.size())
        throw ConfigError("slice: u, v, xs sizes differ");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i]) || !finite(u[i]) || !finite(v[i]))
            throw ConfigError("slice: non-finite entry");
        if (i > 0 && !(xs[i] > xs[i - 1])) throw ConfigError("slice: xs not strictly increasing");
    }
}

std::optional<std::pair<complex, complex>> interpolate(const SpinorField& s, double x, double tol) {
    if (s.xs.empty()) return std::nullopt;
    if (x < s.xs.front() - tol) return std::nullopt;
    if (x <= s.xs.front()) return std::make_pair(s.u.front(), s.v.front());
    if (x >= s.xs.back()) {
        if (x <= s.xs.back() + tol) return std::make_pair(s.u.back(), s.v.back());
        return std::make_pair(complex{}, complex{});
    }
    auto it = std::upper_bound(s.xs.begin(), s.xs.end(), x);
    std::size_t k = static_cast<std::size_t>(it - s.xs.begin());
    double x0 = s.xs[k - 1], x1 = s.xs[k];
    double w = (x - x0) / (x1 - x0);
    return std::make_pair(s.u[k - 1] + w * (s.u[k] - s.u[k - 1]),
                          s.v[k - 1] + w * (s.v[k] - s.v[k - 1]));
}

void TriangleDomain::validate() const {
    if (!(a < b)) throw ConfigError("triangle: need a < b");
    if (!(t0 >= 0.0)) throw ConfigError("triangle: need t0 >= 0");
}

InitialData InitialData::zero() {
    auto z = [](double) { return complex{}; };
    return {z, z, z, z};
}

InitialData InitialData::scaled(complex factor) const {
    InitialData out;
    auto wrap = [factor](const ComplexFn& f) -> ComplexFn {
        if (!f) return {};
        return [f, factor](double x) { return factor * f(x); };
    };
    out.u = wrap(u);
    out.v = wrap(v);
    out.du = wrap(du);
    out.dv = wrap(dv);
    return out;
}

InitialData InitialData::plus(const InitialData& o, complex eps) const {
    InitialData out;
    auto comb = [eps](const ComplexFn& f, const ComplexFn& g) -> ComplexFn {
        if (!f || !g) return {};
        return [f, g, eps](double x) { return f(x) + eps * g(x); };
    };
    out.u = comb(u, o.u);
    out.v = comb(v, o.v);
    out.du = comb(du, o.du);
    out.dv = comb(dv, o.dv);
    return out;
}

complex Profile::operator()(double x) const {
    double env = 0.0;
    switch (shape) {
        case Shape::zero:
            return {};
        case Shape::box:
            env = (x >= center - width && x <= center + width) ? 1.0 : 0.0;
            break;
        case Shape::gaussian: {
            double d = x - center;
            env = std::exp(-d * d / width);
            break;
        }
        case Shape::bump:
            env = bump_shape((x - center) / width);
            break;
    }
    if (env == 0.0) return {};
    return amplitude * env * std::polar(1.0, phase + wavenumber * x);
}

complex Profile::derivative(double x) const {
    double env = 0.0, denv = 0.0;
    switch (shape) {
        case Shape::zero:
            return {};
        case Shape::box:
            // piecewise constant; one-sided derivative is zero away from the jumps
            env = (x >= center - width && x <= center + width) ? 1.0 : 0.0;
            break;
        case Shape::gaussian: {
            double d = x - center;
            env = std::exp(-d * d / width);
            denv = -2.0 * d / width * env;
            break;
        }
        case Shape::bump:
            env = bump_shape((x - center) / width);
            denv = bump_shape_deriv((x - center) / width) / width;
            break;
    }
    complex carrier = std::polar(1.0, phase + wavenumber * x);
    return amplitude * (denv + complex(0.0, wavenumber) * env) * carrier;
}

double Profile::support_right() const {
    switch (shape) {
        case Shape::zero:
            return 0.0;
        case Shape::box:
        case Shape::bump:
            return center + width;
        case Shape::gaussian:
            // exp(-d^2/w) < 1e-17
            return center + std::sqrt(width * 17.0 * std::log(10.0));
    }
    return 0.0;
}

Profile Profile::gaussian(double amplitude, double center, double width) {
    return {Shape::gaussian, amplitude, center, width, 0.0, 0.0};
}

Profile Profile::box(double amplitude, double center, double half_width) {
    return {Shape::box, amplitude, center, half_width, 0.0, 0.0};
}

Profile Profile::bump(double amplitude, double center, double radius) {
    return {Shape::bump, amplitude, center, radius, 0.0, 0.0};
}

std::string to_string(Profile::Shape s) {
    switch (s) {
        case Profile::Shape::zero: return "zero";
        case Profile::Shape::box: return "box";
        case Profile::Shape::gaussian: return "gaussian";
        case Profile::Shape::bump: return "bump";
    }
    return "zero";
}

Profile::Shape profile_shape_from_string(const std::string& name) {
    if (name == "zero") return Profile::Shape::zero;
    if (name == "box") return Profile::Shape::box;
    if (name == "gaussian") return Profile::Shape::gaussian;
    if (name == "bump") return Profile::Shape::bump;
    throw ConfigError("unknown profile shape '" + name + "'");
}

InitialData make_initial_data(const Profile& pu, const Profile& pv) {
    InitialData d;
    d.u = [pu](double x) { return pu(x); };
    d.v = [pv](double x) { return pv(x); };
    d.du = [pu](double x) { return pu.derivative(x); };
    d.dv = [pv](double x) { return pv.derivative(x); };
    return d;
}

void TabulatedData::validate() const {
    if (x.size() < 2) throw ConfigError("tabulated data needs at least two rows");
    if (u.size() != x.size() || v.size() != x.size())
        throw ConfigError("tabulated data: column lengths differ");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !finite(u[i]) || !finite(v[i]))
            throw ConfigError("tabulated data: non-finite value");
        if (i > 0 && !(x[i] > x[i - 1])) throw ConfigError("tabulated data: x not increasing");
    }
}

InitialData TabulatedData::to_initial_data() const {
    validate();
    auto xs = std::make_shared<const std::vector<double>>(x);
    auto lerp = [xs](std::shared_ptr<const std::vector<complex>> ys) -> ComplexFn {
        return [xs, ys](double p) -> complex {
            const auto& X = *xs;
            if (p < X.front() || p > X.back()) return {};
            auto it = std::upper_bound(X.begin(), X.end(), p);
            if (it == X.end()) return ys->back();
            std::size_t k = static_cast<std::size_t>(it - X.begin());
            double w = (p - X[k - 1]) / (X[k] - X[k - 1]);
            return (*ys)[k - 1] + w * ((*ys)[k] - (*ys)[k - 1]);
        };
    };
    InitialData d;
    d.u = lerp(std::make_shared<const std::vector<complex>>(u));
    d.v = lerp(std::make_shared<const std::vector<complex>>(v));
    return d;
}

SpinorField sample_initial_data(const ComplexFn& f_u, const ComplexFn& f_v, const GridSpec& grid) {
    grid.validate();
    SpinorField s;
    s.t = 0.0;
    double tol = 1e-9 * grid.h;
    long n = static_cast<long>(grid.cells());
    bool boundary = grid.x_min <= tol;
    if (boundary) {
        s.first_node_on_boundary = true;
        s.xs.push_back(0.0);
    }
    for (long j = 0; j <= n; ++j) {
        double x = grid.node(j);
        if (boundary ? x <= tol : x < grid.x_min) continue;
        if (s.grid_first < 0) s.grid_first = j;
        s.xs.push_back(x);
    }
    s.u.reserve(s.xs.size());
    s.v.reserve(s.xs.size());
    for (double x : s.xs) {
        complex a = f_u ? f_u(x) : complex{};
        complex b = f_v ? f_v(x) : complex{};
        if (!finite(a) || !finite(b)) throw ConfigError("initial data: non-finite sample");
        s.u.push_back(a);
        s.v.push_back(b);
    }
    return s;
}

double trapezoid(std::span<const double> xs, std::span<const double> f) {
    double acc = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i) acc += 0.5 * (xs[i] - xs[i - 1]) * (f[i] + f[i - 1]);
    return acc;
}

double trapezoid(std::span<const double> xs, std::span<const double> f, double lo, double hi) {
    if (xs.size() < 2 || !(hi > lo)) return 0.0;
    lo = std::max(lo, xs.front());
    hi = std::min(hi, xs.back());
    if (!(hi > lo)) return 0.0;
    auto value = [&](double x) {
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        if (it == xs.begin()) return f[0];
        if (it == xs.end()) return f[xs.size() - 1];
        std::size_t k = static_cast<std::size_t>(it - xs.begin());
        double w = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
        return f[k - 1] + w * (f[k] - f[k - 1]);
    };
    double acc = 0.0;
    double xp = lo, fp = value(lo);
    std::size_t k = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), lo) - xs.begin());
    for (; k < xs.size() && xs[k] < hi; ++k) {
        acc += 0.5 * (xs[k] - xp) * (f[k] + fp);
        xp = xs[k];
        fp = f[k];
    }
    acc += 0.5 * (hi - xp) * (value(hi) + fp);
    return acc;
}

double total_charge(const SpinorField& field) {
    std::vector<double> rho(field.size());
    for (std::size_t i = 0; i < field.size(); ++i) rho[i] = std::norm(field.u[i]) + std::norm(field.v[i]);
    return trapezoid(field.xs, rho);
}

}  // namespace gndirac
