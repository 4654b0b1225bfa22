#include "fieldcirc/newton.hpp"

#include <Eigen/SparseLU>

#include "fieldcirc/errors.hpp"

namespace fieldcirc {

NewtonResult newton_solve(const ResidualFn& residual, const JacobianFn& jacobian,
                          Eigen::VectorXd guess, const NewtonOptions& opts) {
    NewtonResult res;
    res.x = std::move(guess);

    Eigen::VectorXd r = residual(res.x);
    const double r0 = r.norm();
    const double target = opts.tol * (1.0 + r0);
    res.residual_norm = r0;
    if (r0 <= target) {
        res.converged = true;
        return res;
    }

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    for (int it = 0; it < opts.max_iter; ++it) {
        Eigen::SparseMatrix<double> jac = jacobian(res.x);
        jac.makeCompressed();
        lu.compute(jac);
        if (lu.info() != Eigen::Success) {
            throw SingularMatrixError("newton: singular or non-factorizable Jacobian");
        }
        Eigen::VectorXd step = lu.solve(-r);
        if (lu.info() != Eigen::Success || !step.allFinite()) {
            throw SingularMatrixError("newton: linear solve failed");
        }

        double alpha = 1.0;
        double rn = res.residual_norm;
        Eigen::VectorXd x_trial, r_trial;
        for (int h = 0; h <= 8; ++h) {
            x_trial = res.x + alpha * step;
            r_trial = residual(x_trial);
            double n_trial = r_trial.norm();
            if (n_trial < rn || h == 8) {
                res.x = x_trial;
                r = r_trial;
                res.residual_norm = n_trial;
                break;
            }
            alpha *= 0.5;
        }
        ++res.iterations;

        if (res.residual_norm <= target) {
            res.converged = true;
            return res;
        }
    }
    return res;
}

} // namespace fieldcirc
