#include "fieldcirc/integrate.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "fieldcirc/errors.hpp"
#include "fieldcirc/newton.hpp"

namespace fieldcirc {

namespace {

Eigen::SparseMatrix<double> fd_jacobian(const ResidualFn& residual, const Eigen::VectorXd& x) {
    Eigen::VectorXd base = residual(x);
    Eigen::MatrixXd J(base.size(), x.size());
    Eigen::VectorXd xp = x, xm = x;
    for (int i = 0; i < x.size(); ++i) {
        double h = 1e-6 * (1.0 + std::abs(x(i)));
        xp(i) = x(i) + h;
        xm(i) = x(i) - h;
        J.col(i) = (residual(xp) - residual(xm)) / (2.0 * h);
        xp(i) = x(i);
        xm(i) = x(i);
    }
    return J.sparseView();
}

} // namespace

Eigen::VectorXd initial_port_current(const FieldModel& model, const Eigen::VectorXd& a0) {
    Eigen::VectorXd rhs = model.X().transpose() * (model.K(a0) * a0);
    Eigen::MatrixXd XtX = model.X().transpose() * model.X();
    return XtX.ldlt().solve(rhs);
}

FieldTrace integrate_field(const FieldModel& model, const Waveform& v_c,
                           const Eigen::VectorXd& a0, const Eigen::VectorXd& grid,
                           const SolveOptions& opts) {
    if (!(opts.newton_tol > 0.0) || opts.newton_max < 1) {
        throw SolveError("integrate_field: invalid Newton settings");
    }
    const int n = model.n_dofs();
    const int m = model.n_coils();
    if (a0.size() != n) throw SolveError("integrate_field: a0 has wrong dimension");
    if (v_c.dim() != m) throw SolveError("integrate_field: v_c has wrong dimension");

    const int steps = static_cast<int>(grid.size()) - 1;
    Eigen::MatrixXd a_hist(steps + 1, n);
    Eigen::MatrixXd i_hist(steps + 1, m);
    a_hist.row(0) = a0;
    Eigen::VectorXd i_m0 = initial_port_current(model, a0);
    i_hist.row(0) = i_m0;

    // Consistency of a0 for the non-conducting case: the static balance must
    // be met exactly (M = 0 makes every row algebraic).
    if (model.M().nonZeros() == 0) {
        Eigen::VectorXd r = model.K(a0) * a0 - model.X() * i_m0;
        if (r.lpNorm<Eigen::Infinity>() > 1e-8) {
            throw SolveError("integrate_field: a0 violates the static balance K(a0)a0 in im(X)");
        }
    }

    NewtonOptions nopts{opts.newton_tol, opts.newton_max};
    Eigen::VectorXd z(n + m);
    z.head(n) = a0;
    z.tail(m) = i_m0;

    for (int s = 1; s <= steps; ++s) {
        double t = grid(s);
        double dt = grid(s) - grid(s - 1);
        Eigen::VectorXd a_prev = a_hist.row(s - 1);
        Eigen::VectorXd vc_t = v_c.eval(t);

        auto residual = [&](const Eigen::VectorXd& zz) -> Eigen::VectorXd {
            return eval_field_residual(model, zz.head(n), a_prev, dt, zz.tail(m), vc_t);
        };
        JacobianFn jacobian;
        if (opts.jacobian == JacobianMode::FiniteDifference) {
            jacobian = [&](const Eigen::VectorXd& zz) { return fd_jacobian(residual, zz); };
        } else {
            jacobian = [&](const Eigen::VectorXd& zz) -> Eigen::SparseMatrix<double> {
                Eigen::SparseMatrix<double> Kt = model.K_tangent(zz.head(n));
                std::vector<Eigen::Triplet<double>> trips;
                trips.reserve(model.M().nonZeros() + Kt.nonZeros() + 2 * n * m);
                for (int k = 0; k < model.M().outerSize(); ++k) {
                    for (Eigen::SparseMatrix<double>::InnerIterator it(model.M(), k); it; ++it) {
                        trips.emplace_back(it.row(), it.col(), it.value() / dt);
                    }
                }
                for (int k = 0; k < Kt.outerSize(); ++k) {
                    for (Eigen::SparseMatrix<double>::InnerIterator it(Kt, k); it; ++it) {
                        trips.emplace_back(it.row(), it.col(), it.value());
                    }
                }
                for (int c = 0; c < m; ++c) {
                    for (int r = 0; r < n; ++r) {
                        double x = model.X()(r, c);
                        if (x != 0.0) {
                            trips.emplace_back(r, n + c, -x);              // -X i_m
                            trips.emplace_back(n + c, r, x / dt);          // X^T a / dt
                        }
                    }
                }
                Eigen::SparseMatrix<double> J(n + m, n + m);
                J.setFromTriplets(trips.begin(), trips.end());
                return J;
            };
        }

        NewtonResult res = newton_solve(residual, jacobian, z, nopts);
        if (!res.converged) {
            throw SolveError("integrate_field: Newton did not converge", s, res.residual_norm);
        }
        z = res.x;
        a_hist.row(s) = z.head(n);
        i_hist.row(s) = z.tail(m);
    }
    return FieldTrace{Waveform(grid, std::move(a_hist)), Waveform(grid, std::move(i_hist))};
}

namespace {

/// Left-null and null space bases of E(x0); columns are orthonormal.
struct AlgebraicSplit {
    Eigen::MatrixXd Z; // rows' combinations that carry no time derivative
    Eigen::MatrixXd N; // state directions outside the differential part
};

AlgebraicSplit algebraic_split(const Eigen::MatrixXd& E) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(E, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double tol = sv.size() > 0 && sv(0) > 0 ? 1e-12 * sv(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i) {
        if (sv(i) > tol) ++rank;
    }
    AlgebraicSplit s;
    s.Z = svd.matrixU().rightCols(E.rows() - rank);
    s.N = svd.matrixV().rightCols(E.cols() - rank);
    return s;
}

} // namespace

double circuit_algebraic_residual(const MnaSystem& sys, double t0, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& i_m0) {
    AlgebraicSplit s = algebraic_split(sys.eval_E(x));
    if (s.Z.cols() == 0) return 0.0;
    Eigen::VectorXd g = sys.eval_f(t0, x) + sys.P() * i_m0;
    return (s.Z.transpose() * g).lpNorm<Eigen::Infinity>();
}

Eigen::VectorXd project_consistent_circuit(const MnaSystem& sys, double t0,
                                           const Eigen::VectorXd& x_guess,
                                           const Eigen::VectorXd& i_m0) {
    AlgebraicSplit s = algebraic_split(sys.eval_E(x_guess));
    Eigen::VectorXd x = x_guess;
    if (s.Z.cols() > 0) {
        // Index-2 systems leave algebraic rows that no kernel direction can
        // reach (their consistency is a condition on the differential
        // variables), so the projected system is solved in the least-squares
        // sense; the residual check below rejects what remains.
        Eigen::VectorXd c = Eigen::VectorXd::Zero(s.N.cols());
        auto g = [&](const Eigen::VectorXd& cc) -> Eigen::VectorXd {
            return s.Z.transpose() * (sys.eval_f(t0, x_guess + s.N * cc) + sys.P() * i_m0);
        };
        double gn = g(c).norm();
        for (int it = 0; it < 25 && gn > 1e-12; ++it) {
            Eigen::MatrixXd J = s.Z.transpose() * sys.df_dx(t0, x_guess + s.N * c) * s.N;
            Eigen::VectorXd step =
                J.completeOrthogonalDecomposition().solve(-g(c));
            double alpha = 1.0;
            bool improved = false;
            for (int h = 0; h <= 8; ++h) {
                double trial = g(c + alpha * step).norm();
                if (trial < gn) {
                    c += alpha * step;
                    gn = trial;
                    improved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!improved) break;
        }
        x = x_guess + s.N * c;
    }
    if (circuit_algebraic_residual(sys, t0, x, i_m0) > 1e-8) {
        throw SolveError("inconsistent initial values: algebraic residual above 1e-8 after projection");
    }
    return x;
}

CircuitTrace integrate_circuit(const MnaSystem& sys, const Waveform& i_m,
                               const Eigen::VectorXd& x0, const Eigen::VectorXd& grid,
                               const SolveOptions& opts) {
    if (!(opts.newton_tol > 0.0) || opts.newton_max < 1) {
        throw SolveError("integrate_circuit: invalid Newton settings");
    }
    const int nx = sys.dim();
    const int np = sys.n_ports();
    if (x0.size() != nx) throw SolveError("integrate_circuit: x0 has wrong dimension");
    if (i_m.dim() != np) throw SolveError("integrate_circuit: i_m has wrong dimension");

    if (circuit_algebraic_residual(sys, grid(0), x0, i_m.eval(grid(0))) > 1e-8) {
        throw SolveError(
            "integrate_circuit: x0 violates the algebraic constraints at t0 "
            "(use project_consistent_circuit)");
    }

    const int steps = static_cast<int>(grid.size()) - 1;
    Eigen::MatrixXd x_hist(steps + 1, nx);
    Eigen::MatrixXd v_hist(steps + 1, np);
    x_hist.row(0) = x0;
    v_hist.row(0) = sys.P().transpose() * x0;

    const bool linear = sys.linear();
    const bool freeze = opts.coefficients == CoefficientHandling::Auto
                            ? !linear
                            : opts.coefficients == CoefficientHandling::Frozen;
    NewtonOptions nopts{opts.newton_tol, opts.newton_max};
    Eigen::VectorXd x = x0;

    for (int s = 1; s <= steps; ++s) {
        double t = grid(s);
        double dt = grid(s) - grid(s - 1);
        Eigen::VectorXd x_prev = x_hist.row(s - 1);
        Eigen::VectorXd pim = sys.P() * i_m.eval(t);

        auto residual = [&](const Eigen::VectorXd& xx) -> Eigen::VectorXd {
            const Eigen::VectorXd w = (xx - x_prev) / dt;
            const Eigen::MatrixXd E = sys.eval_E(freeze ? x_prev : xx);
            return E * w + sys.eval_f(t, xx) + pim;
        };
        JacobianFn jacobian;
        if (opts.jacobian == JacobianMode::FiniteDifference) {
            jacobian = [&](const Eigen::VectorXd& xx) { return fd_jacobian(residual, xx); };
        } else {
            jacobian = [&](const Eigen::VectorXd& xx) -> Eigen::SparseMatrix<double> {
                Eigen::MatrixXd J;
                if (freeze) {
                    J = sys.eval_E(x_prev) / dt + sys.df_dx(t, xx);
                } else {
                    const Eigen::VectorXd w = (xx - x_prev) / dt;
                    J = sys.eval_E(xx) / dt + sys.dEw_dx(xx, w) + sys.df_dx(t, xx);
                }
                return J.sparseView();
            };
        }

        NewtonResult res = newton_solve(residual, jacobian, x, nopts);
        if (!res.converged) {
            throw SolveError("integrate_circuit: Newton did not converge", s, res.residual_norm);
        }
        x = res.x;
        x_hist.row(s) = x;
        v_hist.row(s) = sys.P().transpose() * x;
    }
    return CircuitTrace{Waveform(grid, std::move(x_hist)), Waveform(grid, std::move(v_hist))};
}

} // namespace fieldcirc
