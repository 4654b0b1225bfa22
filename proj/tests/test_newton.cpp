#include <cmath>
#include <doctest.h>

#include "fieldcirc/errors.hpp"
#include "fieldcirc/newton.hpp"

using namespace fieldcirc;

namespace {

Eigen::SparseMatrix<double> scalar_matrix(double v) {
    Eigen::SparseMatrix<double> m(1, 1);
    m.insert(0, 0) = v;
    return m;
}

} // namespace

TEST_CASE("newton: linear residual converges in one iteration") {
    Eigen::MatrixXd A(2, 2);
    A << 3.0, 1.0, 1.0, 2.0;
    Eigen::VectorXd b(2);
    b << 1.0, -1.0;
    auto residual = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return A * x - b; };
    auto jacobian = [&](const Eigen::VectorXd&) -> Eigen::SparseMatrix<double> {
        return A.sparseView();
    };
    NewtonResult res = newton_solve(residual, jacobian, Eigen::VectorXd::Zero(2));
    CHECK(res.converged);
    CHECK(res.iterations == 1);
    CHECK((A * res.x - b).norm() <= 1e-12);
}

TEST_CASE("newton: cubic root") {
    auto residual = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd r(1);
        r(0) = x(0) * x(0) * x(0) - 8.0;
        return r;
    };
    auto jacobian = [](const Eigen::VectorXd& x) { return scalar_matrix(3.0 * x(0) * x(0)); };
    NewtonResult res = newton_solve(residual, jacobian, Eigen::VectorXd::Ones(1));
    CHECK(res.converged);
    CHECK(res.iterations <= 10);
    CHECK(res.x(0) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("newton: singular Jacobian at the guess") {
    auto residual = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd r(1);
        r(0) = x(0) * x(0) - 1.0;
        return r;
    };
    auto jacobian = [](const Eigen::VectorXd&) { return scalar_matrix(0.0); };
    CHECK_THROWS_AS(newton_solve(residual, jacobian, Eigen::VectorXd::Zero(1)),
                    SingularMatrixError);
}

TEST_CASE("newton: nonconvergence reports the last iterate") {
    // constant nonzero residual: every step is rejected down to the shortest
    auto residual = [](const Eigen::VectorXd&) -> Eigen::VectorXd {
        return Eigen::VectorXd::Ones(1);
    };
    auto jacobian = [](const Eigen::VectorXd&) { return scalar_matrix(1.0); };
    NewtonOptions opts;
    opts.max_iter = 5;
    NewtonResult res = newton_solve(residual, jacobian, Eigen::VectorXd::Zero(1), opts);
    CHECK(!res.converged);
    CHECK(res.residual_norm >= 1.0);
    CHECK(res.x.allFinite());
}
