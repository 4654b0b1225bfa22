#pragma once

#include <stdexcept>
#include <string>

namespace fieldcirc {

/// Netlist / file syntax errors. `line` is 1-based, 0 when not applicable.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// Model construction / ingestion errors (dimension mismatch, rank deficiency, ...).
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Time integration failures; carries the step index where the solve broke down.
class SolveError : public std::runtime_error {
public:
    SolveError(const std::string& msg, int step = -1, double residual = 0.0)
        : std::runtime_error(step >= 0 ? msg + " (step " + std::to_string(step) +
                                             ", residual " + std::to_string(residual) + ")"
                                       : msg),
          step_(step), residual_(residual) {}
    int step() const { return step_; }
    double residual() const { return residual_; }

private:
    int step_;
    double residual_;
};

class SingularMatrixError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace fieldcirc
