#pragma once

#include <stdexcept>
#include <string>

namespace gndirac {

/// Invalid configuration or input data (bad grid, violated (H1)/(H2),
/// data not supported in the window, ...). The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A query point, time or segment lies outside the region where the
/// requested quantity is defined.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Picard iteration failed to contract on some cell.
class StepFailure : public std::runtime_error {
public:
    StepFailure(const std::string& what, double x, double t)
        : std::runtime_error(what), x_(x), t_(t) {}

    double x() const noexcept { return x_; }
    double t() const noexcept { return t_; }

private:
    double x_;
    double t_;
};

}  // namespace gndirac
