#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gndirac/boundary.hpp"
#include "gndirac/model.hpp"
#include "gndirac/solver.hpp"
#include "gndirac/verify.hpp"

namespace gndirac::cli {

using nlohmann::json;

struct BoundarySpec {
    BoundaryCurve::Kind kind = BoundaryCurve::Kind::static_wall;
    double c = 0.0;   // linear slope
    double T0 = 4.0;  // collapsing time scale
    complex lambda = 1.0;
    bool equality = false;  // pick lambda on the (H2) equality curve

    BoundaryCurve build() const;
    bool operator==(const BoundarySpec&) const = default;
};

struct DataSpec {
    Profile u;
    Profile v;
    std::string table;  // CSV path; overrides the profiles when set

    InitialData build() const;
    double extent() const;
    bool operator==(const DataSpec&) const;
};

struct OutputSpec {
    bool snapshots = true;
    bool functionals = false;
    bool checks = false;
    bool gnuplot = false;
    bool operator==(const OutputSpec&) const = default;
};

struct RunConfig {
    std::string scenario = "custom";
    NonlinearityParams physics;
    BoundarySpec boundary;
    GridSpec grid;
    DataSpec data;
    double picard_tol = 1e-12;
    int picard_max_iters = 8;
    int snapshot_stride = 1;
    std::vector<TriangleDomain> triangles;
    std::vector<double> eps_list = {1e-2, 1e-3, 1e-4};
    OutputSpec outputs;

    SolverConfig solver_config() const;
    /// Re-grid to a new h (window edges snapped outward to multiples of h).
    void override_h(double h);
    /// Change t_final keeping the data window; the right edge moves with it.
    void override_t_final(double t_final);
    void validate() const;
};

bool operator==(const RunConfig& a, const RunConfig& b);

json to_json(const RunConfig& c);
/// Strict: unknown keys, wrong types and missing required sections throw ConfigError.
/// A document whose "scenario" names a preset starts from that preset and
/// replaces whichever sections are present.
RunConfig from_json(const json& j);
RunConfig load_config(const std::string& path);

const std::vector<std::string>& preset_names();
RunConfig preset(const std::string& name);

/// Window for the data extent at (h, t_final) and the curve's leftmost point.
GridSpec window_for(const BoundaryCurve& curve, double extent, double h, double t_final);

}  // namespace gndirac::cli
