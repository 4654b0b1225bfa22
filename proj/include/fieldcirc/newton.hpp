#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>

namespace fieldcirc {

struct NewtonOptions {
    double tol = 1e-10; // relative: stop when ||r|| <= tol * (1 + ||r0||)
    int max_iter = 25;
};

struct NewtonResult {
    Eigen::VectorXd x;       // last iterate
    int iterations = 0;      // update steps taken
    double residual_norm = 0.0;
    bool converged = false;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<Eigen::SparseMatrix<double>(const Eigen::VectorXd&)>;

/// Damped Newton iteration with a halving line search (at most 8 halvings per
/// step; the shortest step is taken if none reduces the residual). Linear
/// solves use a sparse LU factorization. Throws SingularMatrixError when the
/// Jacobian cannot be factorized. Nonconvergence is reported through the
/// result, which carries the last iterate and residual norm.
NewtonResult newton_solve(const ResidualFn& residual, const JacobianFn& jacobian,
                          Eigen::VectorXd guess, const NewtonOptions& opts = {});

} // namespace fieldcirc
