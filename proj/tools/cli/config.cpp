#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "gndirac/errors.hpp"
#include "gndirac/io.hpp"

namespace gndirac::cli {

namespace {

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

template <class T>
T get(const json& j, const char* key, const std::string& where, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

json complex_json(complex z) { return json::array({z.real(), z.imag()}); }

complex complex_from(const json& j, const std::string& where) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw ConfigError(where + ": expected a number or [re, im]");
}

json profile_json(const Profile& p) {
    return {{"shape", to_string(p.shape)}, {"amplitude", p.amplitude}, {"center", p.center},
            {"width", p.width},            {"phase", p.phase},         {"wavenumber", p.wavenumber}};
}

Profile profile_from(const json& j, const std::string& where) {
    only_keys(j, where, {"shape", "amplitude", "center", "width", "phase", "wavenumber"});
    Profile p;
    try {
        p.shape = profile_shape_from_string(get<std::string>(j, "shape", where, "zero"));
    } catch (const ConfigError& e) {
        throw ConfigError(where + ": " + e.what());
    }
    p.amplitude = get(j, "amplitude", where, p.amplitude);
    p.center = get(j, "center", where, p.center);
    p.width = get(j, "width", where, p.width);
    p.phase = get(j, "phase", where, p.phase);
    p.wavenumber = get(j, "wavenumber", where, p.wavenumber);
    return p;
}

bool same_profile(const Profile& a, const Profile& b) {
    return a.shape == b.shape && a.amplitude == b.amplitude && a.center == b.center &&
           a.width == b.width && a.phase == b.phase && a.wavenumber == b.wavenumber;
}

double min_z(const BoundaryCurve& curve, double h, double t_final) {
    double m = 0.0;
    long n = std::lround(t_final / h);
    for (long k = 0; k <= n; ++k) m = std::min(m, curve.z(k * h));
    return m;
}

}  // namespace

BoundaryCurve BoundarySpec::build() const {
    BoundaryCurve b;
    switch (kind) {
        case BoundaryCurve::Kind::static_wall: b = BoundaryCurve::static_wall(lambda); break;
        case BoundaryCurve::Kind::linear: b = BoundaryCurve::linear(c, lambda); break;
        case BoundaryCurve::Kind::collapsing: b = BoundaryCurve::collapsing(T0, lambda); break;
        case BoundaryCurve::Kind::custom:
            throw ConfigError("boundary: kind 'custom' is only available through the library API");
    }
    return equality ? b.with_equality_lambda() : b;
}

InitialData DataSpec::build() const {
    if (!table.empty()) return read_tabulated_csv(table).to_initial_data();
    return make_initial_data(u, v);
}

double DataSpec::extent() const {
    if (!table.empty()) {
        TabulatedData d = read_tabulated_csv(table);
        return d.x.empty() ? 0.0 : d.x.back();
    }
    return std::max({u.support_right(), v.support_right(), 0.0});
}

bool DataSpec::operator==(const DataSpec& o) const {
    return same_profile(u, o.u) && same_profile(v, o.v) && table == o.table;
}

bool operator==(const RunConfig& a, const RunConfig& b) { return to_json(a) == to_json(b); }

SolverConfig RunConfig::solver_config() const {
    SolverConfig s;
    s.params = physics;
    s.grid = grid;
    s.curve = boundary.build();
    s.picard_tol = picard_tol;
    s.picard_max_iters = picard_max_iters;
    s.snapshot_stride = snapshot_stride;
    return s;
}

GridSpec window_for(const BoundaryCurve& curve, double extent, double h, double t_final) {
    return make_window(extent, h, t_final, min_z(curve, h, t_final));
}

void RunConfig::override_h(double h) {
    if (!(h > 0.0)) throw ConfigError("--h must be positive");
    double zmin = min_z(boundary.build(), h, grid.t_final);
    grid.x_min = std::floor(std::min(0.0, zmin) / h + 1e-9) * h;
    grid.x_max = std::ceil(grid.x_max / h - 1e-9) * h;
    grid.h = h;
    double steps = grid.t_final / h;
    if (std::abs(steps - std::round(steps)) > 1e-9)
        throw ConfigError("--h must divide t_final into an integer number of steps");
}

void RunConfig::override_t_final(double t_final) {
    if (!(t_final > 0.0)) throw ConfigError("--t-final must be positive");
    double data_right = grid.x_max - grid.t_final;
    grid.t_final = t_final;
    double zmin = min_z(boundary.build(), grid.h, t_final);
    grid.x_min = std::floor(std::min(0.0, zmin) / grid.h + 1e-9) * grid.h;
    grid.x_max = std::ceil((data_right + t_final) / grid.h - 1e-9) * grid.h;
}

void RunConfig::validate() const {
    physics.validate();
    grid.validate();
    solver_config().validate();
    for (const auto& t : triangles) t.validate();
    if (picard_max_iters < 1) throw ConfigError("solver.picard_max_iters must be >= 1");
    if (snapshot_stride < 0) throw ConfigError("solver.snapshot_stride must be >= 0");
}

json to_json(const RunConfig& c) {
    json tris = json::array();
    for (const auto& t : c.triangles) tris.push_back({t.a, t.b, t.t0});
    json data = {{"u", profile_json(c.data.u)}, {"v", profile_json(c.data.v)}};
    if (!c.data.table.empty()) data["table"] = c.data.table;
    return {
        {"scenario", c.scenario},
        {"physics", {{"m", c.physics.m}, {"alpha", c.physics.alpha}, {"beta", c.physics.beta}}},
        {"boundary",
         {{"kind", to_string(c.boundary.kind)},
          {"c", c.boundary.c},
          {"T0", c.boundary.T0},
          {"lambda", complex_json(c.boundary.lambda)},
          {"equality", c.boundary.equality}}},
        {"grid",
         {{"x_min", c.grid.x_min}, {"x_max", c.grid.x_max}, {"h", c.grid.h}, {"t_final", c.grid.t_final}}},
        {"data", data},
        {"solver",
         {{"picard_tol", c.picard_tol},
          {"picard_max_iters", c.picard_max_iters},
          {"snapshot_stride", c.snapshot_stride}}},
        {"triangles", tris},
        {"eps_list", c.eps_list},
        {"outputs",
         {{"snapshots", c.outputs.snapshots},
          {"functionals", c.outputs.functionals},
          {"checks", c.outputs.checks},
          {"gnuplot", c.outputs.gnuplot}}},
    };
}

RunConfig from_json(const json& j) {
    only_keys(j, "config",
              {"scenario", "physics", "boundary", "grid", "data", "solver", "triangles", "eps_list",
               "outputs"});
    RunConfig c;
    std::string scen = get<std::string>(j, "scenario", "config", "custom");
    const auto& names = preset_names();
    bool from_preset = std::find(names.begin(), names.end(), scen) != names.end();
    if (from_preset) c = preset(scen);
    c.scenario = scen;
    if (!from_preset) {
        for (const char* need : {"physics", "boundary", "grid", "data"})
            if (!j.contains(need)) throw ConfigError(std::string("config: missing section '") + need + "'");
    }

    if (j.contains("physics")) {
        const json& p = j["physics"];
        only_keys(p, "physics", {"m", "alpha", "beta"});
        c.physics = {get(p, "m", "physics", 0.0), get(p, "alpha", "physics", 0.0),
                     get(p, "beta", "physics", 0.0)};
    }
    if (j.contains("boundary")) {
        const json& b = j["boundary"];
        only_keys(b, "boundary", {"kind", "c", "T0", "lambda", "equality"});
        BoundarySpec s;
        try {
            s.kind = boundary_kind_from_string(get<std::string>(b, "kind", "boundary", "static"));
        } catch (const ConfigError& e) {
            throw ConfigError(std::string("boundary: ") + e.what());
        }
        s.c = get(b, "c", "boundary", 0.0);
        s.T0 = get(b, "T0", "boundary", 4.0);
        if (b.contains("lambda")) s.lambda = complex_from(b["lambda"], "boundary.lambda");
        s.equality = get(b, "equality", "boundary", false);
        c.boundary = s;
    }
    if (j.contains("data")) {
        const json& d = j["data"];
        only_keys(d, "data", {"u", "v", "table"});
        DataSpec s;
        if (d.contains("u")) s.u = profile_from(d["u"], "data.u");
        if (d.contains("v")) s.v = profile_from(d["v"], "data.v");
        s.table = get<std::string>(d, "table", "data", "");
        c.data = s;
    }
    if (j.contains("grid")) {
        const json& g = j["grid"];
        only_keys(g, "grid", {"x_min", "x_max", "h", "t_final"});
        if (!g.contains("h") || !g.contains("t_final"))
            throw ConfigError("grid: 'h' and 't_final' are required");
        double h = get(g, "h", "grid", 0.0), T = get(g, "t_final", "grid", 0.0);
        if (!(h > 0.0) || !(T > 0.0)) throw ConfigError("grid: h and t_final must be positive");
        GridSpec w = window_for(c.boundary.build(), c.data.extent(), h, T);
        w.x_min = get(g, "x_min", "grid", w.x_min);
        w.x_max = get(g, "x_max", "grid", w.x_max);
        c.grid = w;
    }
    if (j.contains("solver")) {
        const json& s = j["solver"];
        only_keys(s, "solver", {"picard_tol", "picard_max_iters", "snapshot_stride"});
        c.picard_tol = get(s, "picard_tol", "solver", c.picard_tol);
        c.picard_max_iters = get(s, "picard_max_iters", "solver", c.picard_max_iters);
        c.snapshot_stride = get(s, "snapshot_stride", "solver", c.snapshot_stride);
    }
    if (j.contains("triangles")) {
        c.triangles.clear();
        if (!j["triangles"].is_array()) throw ConfigError("triangles: expected an array");
        for (const auto& t : j["triangles"]) {
            if (!t.is_array() || t.size() != 3) throw ConfigError("triangles: each entry is [a, b, t0]");
            c.triangles.push_back({t[0].get<double>(), t[1].get<double>(), t[2].get<double>()});
        }
    }
    if (j.contains("eps_list")) c.eps_list = get(j, "eps_list", "config", c.eps_list);
    if (j.contains("outputs")) {
        const json& o = j["outputs"];
        only_keys(o, "outputs", {"snapshots", "functionals", "checks", "gnuplot"});
        c.outputs.snapshots = get(o, "snapshots", "outputs", true);
        c.outputs.functionals = get(o, "functionals", "outputs", false);
        c.outputs.checks = get(o, "checks", "outputs", false);
        c.outputs.gnuplot = get(o, "gnuplot", "outputs", false);
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config " + path);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return from_json(j);
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"free-transport", "gn-static",      "collapse-equality",
                                                   "dissipative",    "linear-mass",    "thirring-static",
                                                   "h2-violation"};
    return names;
}

RunConfig preset(const std::string& name) {
    RunConfig c;
    c.scenario = name;
    double h = 1.0 / 64, T = 2.0;
    if (name == "free-transport") {
        c.physics = NonlinearityParams::free(0.0);
        c.data.u = Profile::box(1.0, 1.5, 0.5);
        c.data.v = Profile::box(0.5, 1.0, 0.5);
    } else if (name == "gn-static") {
        c.physics = NonlinearityParams::gross_neveu(1.0);
        c.data.u = Profile::gaussian(1.0, 1.0, 0.05);
        c.data.v = Profile::gaussian(0.8, 1.4, 0.05);
        h = 1.0 / 128;
        c.snapshot_stride = 0;
    } else if (name == "collapse-equality") {
        c.physics = NonlinearityParams::gross_neveu(1.0);
        c.boundary.kind = BoundaryCurve::Kind::collapsing;
        c.boundary.T0 = 4.0;
        c.boundary.equality = true;
        c.data.u = Profile::gaussian(1.0, 1.0, 0.1);
        c.data.v = Profile::gaussian(1.0, 1.4, 0.1);
        T = 3.0;
    } else if (name == "dissipative") {
        c.physics = NonlinearityParams::gross_neveu(1.0);
        c.boundary.lambda = 0.5;
        c.data.u = Profile::gaussian(1.0, 1.0, 0.05);
        c.data.v = Profile::gaussian(1.0, 0.8, 0.05);
    } else if (name == "linear-mass") {
        c.physics = NonlinearityParams::free(1.0);
        c.data.u = Profile::gaussian(1.0, 2.0, 0.1);
        c.data.v = Profile::gaussian(0.5, 2.0, 0.1);
    } else if (name == "thirring-static") {
        c.physics = NonlinearityParams::thirring(1.0);
        c.data.u = Profile::bump(1.0, 1.0, 0.5);
        c.data.v = Profile::bump(1.0, 1.5, 0.5);
    } else if (name == "h2-violation") {
        c.physics = NonlinearityParams::gross_neveu(1.0);
        c.boundary.kind = BoundaryCurve::Kind::linear;
        c.boundary.c = 0.5;
        c.boundary.lambda = 2.0;
        c.data.u = Profile::gaussian(1.0, 1.0, 0.05);
        c.data.v = Profile::gaussian(1.0, 1.0, 0.05);
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    c.grid = window_for(c.boundary.build(), c.data.extent(), h, T);
    return c;
}

}  // namespace gndirac::cli
