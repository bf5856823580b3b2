#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gndirac/errors.hpp"
#include "gndirac/functionals.hpp"
#include "gndirac/io.hpp"
#include "gndirac/verify.hpp"

namespace gndirac::cli {

namespace fs = std::filesystem;

namespace {

std::string step_name(std::size_t n) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "slice_%06zu.csv", n);
    return buf;
}

std::string sci(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6e", x);
    return buf;
}

void write_json(const fs::path& p, const json& j) {
    std::ofstream f(p);
    if (!f) throw ConfigError("cannot write " + p.string());
    f << j.dump(2) << '\n';
}

fs::path prepare_out(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir);
    return p;
}

json check_json(const CheckResult& c) {
    return {{"name", c.name},         {"status", to_string(c.status)}, {"asserted", c.asserted},
            {"measured", c.measured}, {"bound", c.bound},              {"margin", c.margin},
            {"context", c.context},   {"note", c.note}};
}

SuiteContext suite_context(const RunConfig& rc) {
    SuiteContext ctx;
    ctx.config = rc.solver_config();
    ctx.data = rc.data.build();
    ctx.functionals = FunctionalConfig::defaults(ctx.config.curve, rc.grid.t_final, rc.physics);
    ctx.triangles = rc.triangles;
    ctx.eps_list = rc.eps_list;
    return ctx;
}

template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const StepFailure& e) {
        err << "solver failure: " << e.what() << '\n';
        return exit_check_failed;
    }
}

std::string gnuplot_script(const std::vector<std::string>& files) {
    std::ostringstream s;
    s << "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'x'\n";
    s << "set ylabel '|u|^2, |v|^2'\n";
    for (const auto& f : files)
        s << "plot '" << f << "' using 1:($2**2+$3**2) with lines title '|u|^2 " << f
          << "', '' using 1:($4**2+$5**2) with lines title '|v|^2'\npause -1\n";
    return s.str();
}

}  // namespace

TriangleDomain parse_triangle(const std::string& text) {
    TriangleDomain t;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%lf,%lf,%lf%c", &t.a, &t.b, &t.t0, &extra) != 3)
        throw ConfigError("triangle must be 'a,b,t0', got '" + text + "'");
    t.validate();
    return t;
}

RunConfig resolve_config(const CommonOptions& o) {
    if (o.config.empty() == o.preset.empty())
        throw ConfigError("give exactly one of --config or --preset");
    RunConfig rc = o.config.empty() ? preset(o.preset) : load_config(o.config);
    if (o.t_final) rc.override_t_final(*o.t_final);
    if (o.h) rc.override_h(*o.h);
    rc.validate();
    return rc;
}

int cmd_run(const CommonOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        RunConfig rc = resolve_config(o);
        auto t0 = std::chrono::steady_clock::now();
        Trajectory tr = run(rc.solver_config(), rc.data.build());
        double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (const auto& w : tr.warnings) err << "warning: " << w << '\n';

        out << "E0           " << std::setprecision(15) << tr.E0 << '\n';
        out << "final charge " << tr.charges.back() << '\n';
        out << "max drift    " << sci(tr.max_drift()) << '\n';
        out << "steps        " << tr.stats.steps << "  (" << std::setprecision(3) << wall << " s)\n";

        if (!o.out.empty()) {
            fs::path dir = prepare_out(o.out);
            std::vector<std::string> files;
            if (rc.outputs.snapshots) {
                for (const SpinorField& s : tr.slices) {
                    std::size_t n = static_cast<std::size_t>(std::llround(s.t / rc.grid.h));
                    files.push_back(step_name(n));
                    write_slice_csv((dir / files.back()).string(), s);
                }
            }
            json charges = json::array();
            for (double q : tr.charges) charges.push_back(q);
            json manifest = {
                {"config", to_json(rc)},
                {"config_hash", tr.config_hash},
                {"E0", tr.E0},
                {"final_charge", tr.charges.back()},
                {"max_drift", tr.max_drift()},
                {"max_charge_increase", tr.max_charge_increase()},
                {"charges", charges},
                {"timing",
                 {{"steps", tr.stats.steps},
                  {"cells", tr.stats.cells},
                  {"max_picard_iters", tr.stats.max_picard_iters},
                  {"unconverged_cells", tr.stats.unconverged_cells}}},
                {"compatibility",
                 {{"res0", tr.compatibility.res0},
                  {"res1", tr.compatibility.res1 ? json(*tr.compatibility.res1) : json(nullptr)}}},
                {"warnings", tr.warnings},
                {"snapshots", files},
            };
            write_json(dir / "manifest.json", manifest);
            if (rc.outputs.gnuplot) {
                std::ofstream g(dir / "plot.gp");
                g << gnuplot_script(files);
            }
            out << "wrote " << files.size() + 1 + (rc.outputs.gnuplot ? 1 : 0) << " files to " << dir.string()
                << '\n';
        }
        return int(exit_ok);
    });
}

int cmd_verify(const CommonOptions& o, const VerifyOptions& v, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        RunConfig rc = resolve_config(o);
        // validates (H1)/(H2) and support before any suite runs
        {
            SolverConfig probe = rc.solver_config();
            ValidationReport vr = validate_assumptions(probe.curve, rc.grid.t_final, 257);
            if (!vr.h1_ok || !vr.h2_ok) throw ConfigError("assumption " + vr.message);
        }
        std::vector<std::string> suites = v.suites.empty() ? suite_names() : v.suites;
        for (const auto& s : suites) {
            const auto& all = suite_names();
            if (std::find(all.begin(), all.end(), s) == all.end())
                throw ConfigError("unknown suite '" + s + "'");
        }
        SuiteContext ctx = suite_context(rc);
        json report = json::array();
        bool failed = false;
        out << std::left << std::setw(34) << "check" << std::setw(10) << "status" << std::setw(15)
            << "measured" << std::setw(15) << "bound" << "context\n";
        for (const auto& s : suites) {
            for (const CheckResult& c : run_suite(s, ctx)) {
                failed = failed || c.failed();
                report.push_back(check_json(c));
                std::string status = to_string(c.status) + (c.asserted ? "" : "*");
                out << std::left << std::setw(34) << c.name << std::setw(10) << status << std::setw(15)
                    << sci(c.measured) << std::setw(15) << sci(c.bound) << c.context;
                if (!c.note.empty()) out << "  [" << c.note << "]";
                out << '\n';
            }
        }
        out << "(* reported, not asserted)\n";
        if (!o.out.empty()) {
            fs::path dir = prepare_out(o.out);
            write_json(dir / "report.json",
                       {{"config", to_json(rc)}, {"suites", suites}, {"checks", report}, {"failed", failed}});
        }
        out << (failed ? "FAILED" : "OK") << '\n';
        return int(failed ? exit_check_failed : exit_ok);
    });
}

int cmd_functionals(const CommonOptions& o, const FunctionalsOptions& f, std::ostream& out,
                    std::ostream& err) {
    return guarded(err, [&] {
        RunConfig rc = resolve_config(o);
        std::vector<TriangleDomain> tris;
        for (const auto& t : f.triangles) tris.push_back(parse_triangle(t));
        if (tris.empty()) tris = rc.triangles;
        if (tris.empty()) throw ConfigError("no triangles: pass --triangle a,b,t0 or list them in the config");
        SolverConfig sc = rc.solver_config();
        sc.snapshot_stride = 1;
        Trajectory tr = run(sc, rc.data.build());
        FunctionalConfig fc = FunctionalConfig::defaults(sc.curve, rc.grid.t_final, rc.physics);
        fc.validate(sc.curve, rc.grid.t_final);
        fs::path dir = o.out.empty() ? fs::path() : prepare_out(o.out);
        json meta = {{"K0", fc.K0}, {"C0", fc.C0}, {"K1", fc.K1}, {"C1", fc.C1},
                     {"delta0", fc.delta0}, {"c_star", fc.c_star}, {"triangles", json::array()}};
        int k = 0;
        for (const TriangleDomain& t : tris) {
            FunctionalReport r = compute_functionals(tr, t, fc);
            std::string name = "functionals_" + std::to_string(k++) + ".csv";
            if (r.klass.kind == TriangleClass::Kind::disjoint)
                err << "warning: triangle " << t.a << ',' << t.b << ',' << t.t0
                    << " is disjoint from the domain; empty report\n";
            out << name << "  (" << t.a << ',' << t.b << ',' << t.t0 << ")  " << to_string(r.klass.kind)
                << "  rows=" << r.size();
            if (r.size()) out << "  L0(t0)=" << sci(r.L0.front()) << "  F0(t0)=" << sci(r.F0.front());
            out << '\n';
            if (!dir.empty()) {
                std::ofstream csv(dir / name);
                if (r.klass.kind == TriangleClass::Kind::disjoint) csv << "# warning: triangle disjoint from the domain\n";
                write_report_csv(csv, r);
            }
            meta["triangles"].push_back({{"file", name}, {"a", t.a}, {"b", t.b}, {"t0", t.t0},
                                         {"class", to_string(r.klass.kind)}, {"notes", r.notes}});
        }
        if (!dir.empty()) write_json(dir / "functionals.json", meta);
        return int(exit_ok);
    });
}

int cmd_presets(const std::string& name, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (name.empty()) {
            for (const auto& n : preset_names()) out << n << '\n';
        } else {
            out << to_json(preset(name)).dump(2) << '\n';
        }
        return int(exit_ok);
    });
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"gndirac: nonlinear Dirac equations on a half line with a moving boundary"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);
    CommonOptions common;
    VerifyOptions vopt;
    FunctionalsOptions fopt;
    std::string preset_name;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config, "JSON run configuration");
        sub->add_option("--preset", common.preset, "built-in scenario name");
        sub->add_option("--out", common.out, "output directory");
        sub->add_option("--h", common.h, "override the grid spacing");
        sub->add_option("--t-final", common.t_final, "override the final time");
    };
    auto* run_cmd = app.add_subcommand("run", "solve and write snapshots + manifest");
    add_common(run_cmd);
    auto* ver = app.add_subcommand("verify", "run verification suites");
    add_common(ver);
    ver->add_option("--suite", vopt.suites, "suites (comma separated): conservation, pointwise, "
                                            "characteristic, glimm, stability, weak, charge-identity, convergence")
        ->delimiter(',');
    auto* fun = app.add_subcommand("functionals", "evaluate L, D, Q, F on triangles");
    add_common(fun);
    fun->add_option("--triangle", fopt.triangles, "a,b,t0 (repeatable)");
    auto* pre = app.add_subcommand("presets", "list presets, or dump one as JSON");
    pre->add_option("name", preset_name, "preset to dump");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return exit_ok;
        }
        err << "error: " << e.what() << '\n';
        return exit_config_error;
    }
    if (*run_cmd) return cmd_run(common, out, err);
    if (*ver) return cmd_verify(common, vopt, out, err);
    if (*fun) return cmd_functionals(common, fopt, out, err);
    return cmd_presets(preset_name, out, err);
}

}  // namespace gndirac::cli
