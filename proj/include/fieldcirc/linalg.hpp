#pragma once

#include <Eigen/Dense>
#include <functional>

namespace fieldcirc {

/// Numerical rank from singular values, threshold rel_tol * sigma_max.
int matrix_rank(const Eigen::MatrixXd& m, double rel_tol = 1e-10);

/// Central finite difference with the step 1e-6 * (1 + |u|).
double fd_derivative(const std::function<double(double)>& f, double u);

} // namespace fieldcirc
