#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace gndirac::cli {

enum ExitCode { exit_ok = 0, exit_check_failed = 1, exit_config_error = 2 };

struct CommonOptions {
    std::string config;  // path to a JSON config
    std::string preset;  // or a built-in preset name
    std::string out;     // artifact directory; empty writes nothing
    std::optional<double> h;
    std::optional<double> t_final;
};

struct VerifyOptions {
    std::vector<std::string> suites;  // empty: all
};

struct FunctionalsOptions {
    std::vector<std::string> triangles;  // "a,b,t0"
};

/// Resolve --config / --preset and apply the overrides.
RunConfig resolve_config(const CommonOptions& o);

int cmd_run(const CommonOptions& o, std::ostream& out, std::ostream& err);
int cmd_verify(const CommonOptions& o, const VerifyOptions& v, std::ostream& out, std::ostream& err);
int cmd_functionals(const CommonOptions& o, const FunctionalsOptions& f, std::ostream& out,
                    std::ostream& err);
int cmd_presets(const std::string& name, std::ostream& out, std::ostream& err);

/// Parse argv and dispatch; returns the process exit code.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

TriangleDomain parse_triangle(const std::string& text);

}  // namespace gndirac::cli
