#include "fieldcirc/linalg.hpp"

#include <cmath>

namespace fieldcirc {

int matrix_rank(const Eigen::MatrixXd& m, double rel_tol) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0.0) return 0;
    double tol = rel_tol * sv(0);
    int r = 0;
    for (int i = 0; i < sv.size(); ++i) {
        if (sv(i) > tol) ++r;
    }
    return r;
}

double fd_derivative(const std::function<double(double)>& f, double u) {
    double h = 1e-6 * (1.0 + std::abs(u));
    return (f(u + h) - f(u - h)) / (2.0 * h);
}

} // namespace fieldcirc
