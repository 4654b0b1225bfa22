#include "fieldcirc/monolithic.hpp"

#include <vector>

#include "fieldcirc/errors.hpp"
#include "fieldcirc/newton.hpp"

namespace fieldcirc {

namespace {

void add_dense(std::vector<Eigen::Triplet<double>>& trips, int row0, int col0,
               const Eigen::MatrixXd& m) {
    for (int c = 0; c < m.cols(); ++c) {
        for (int r = 0; r < m.rows(); ++r) {
            if (m(r, c) != 0.0) trips.emplace_back(row0 + r, col0 + c, m(r, c));
        }
    }
}

void add_sparse(std::vector<Eigen::Triplet<double>>& trips, int row0, int col0,
                const Eigen::SparseMatrix<double>& m, double scale = 1.0) {
    for (int k = 0; k < m.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
            trips.emplace_back(row0 + static_cast<int>(it.row()), col0 + static_cast<int>(it.col()),
                               scale * it.value());
        }
    }
}

} // namespace

CoupledTrace solve_monolithic(const FieldModel& field, const MnaSystem& circuit,
                              const Eigen::VectorXd& x0, const Eigen::VectorXd& a0,
                              const Eigen::VectorXd& grid, const SolveOptions& opts) {
    const int na = field.n_dofs();
    const int nm = field.n_coils();
    const int nx = circuit.dim();
    if (circuit.n_ports() != nm) {
        throw SolveError("monolithic: circuit port count does not match field coil count");
    }
    if (a0.size() != na || x0.size() != nx) {
        throw SolveError("monolithic: initial state dimensions are wrong");
    }
    // Unknown stack z = (a, i_m, x, v_c).
    const int off_a = 0, off_i = na, off_x = na + nm, off_v = na + nm + nx;
    const int dim = na + 2 * nm + nx;

    Eigen::VectorXd i_m0 = initial_port_current(field, a0);
    if (circuit_algebraic_residual(circuit, grid(0), x0, i_m0) > 1e-8) {
        throw SolveError("monolithic: x0 violates the algebraic constraints at t0");
    }

    const int steps = static_cast<int>(grid.size()) - 1;
    Eigen::MatrixXd a_hist(steps + 1, na), i_hist(steps + 1, nm), x_hist(steps + 1, nx),
        v_hist(steps + 1, nm);
    a_hist.row(0) = a0;
    i_hist.row(0) = i_m0;
    x_hist.row(0) = x0;
    v_hist.row(0) = circuit.P().transpose() * x0;

    const bool lin_circuit = circuit.linear();
    const bool freeze = opts.coefficients == CoefficientHandling::Auto
                            ? !lin_circuit
                            : opts.coefficients == CoefficientHandling::Frozen;
    NewtonOptions nopts{opts.newton_tol, opts.newton_max};

    Eigen::VectorXd z(dim);
    z.segment(off_a, na) = a0;
    z.segment(off_i, nm) = i_m0;
    z.segment(off_x, nx) = x0;
    z.segment(off_v, nm) = v_hist.row(0);

    for (int s = 1; s <= steps; ++s) {
        const double t = grid(s);
        const double dt = grid(s) - grid(s - 1);
        const Eigen::VectorXd a_prev = a_hist.row(s - 1);
        const Eigen::VectorXd x_prev = x_hist.row(s - 1);

        auto residual = [&](const Eigen::VectorXd& zz) -> Eigen::VectorXd {
            const auto a = zz.segment(off_a, na);
            const auto im = zz.segment(off_i, nm);
            const auto x = zz.segment(off_x, nx);
            const auto vc = zz.segment(off_v, nm);
            Eigen::VectorXd r(dim);
            r.segment(off_a, na + nm) = eval_field_residual(field, a, a_prev, dt, im, vc);
            const Eigen::VectorXd w = (x - x_prev) / dt;
            const Eigen::MatrixXd E = circuit.eval_E(freeze ? x_prev : x);
            r.segment(off_x, nx) = E * w + circuit.eval_f(t, x) + circuit.P() * im;
            r.segment(off_v, nm) = circuit.P().transpose() * x - vc;
            return r;
        };
        auto jacobian = [&](const Eigen::VectorXd& zz) -> Eigen::SparseMatrix<double> {
            const auto a = zz.segment(off_a, na);
            const auto x = zz.segment(off_x, nx);
            std::vector<Eigen::Triplet<double>> trips;

            add_sparse(trips, off_a, off_a, field.M(), 1.0 / dt);
            add_sparse(trips, off_a, off_a, field.K_tangent(a));
            add_dense(trips, off_a, off_i, -field.X());
            add_dense(trips, off_i, off_a, field.X().transpose() / dt);
            for (int c = 0; c < nm; ++c) trips.emplace_back(off_i + c, off_v + c, -1.0);

            Eigen::MatrixXd Jx;
            if (freeze) {
                Jx = circuit.eval_E(x_prev) / dt + circuit.df_dx(t, x);
            } else {
                const Eigen::VectorXd w = (x - x_prev) / dt;
                Jx = circuit.eval_E(x) / dt + circuit.dEw_dx(x, w) + circuit.df_dx(t, x);
            }
            add_dense(trips, off_x, off_x, Jx);
            add_dense(trips, off_x, off_i, circuit.P());
            add_dense(trips, off_v, off_x, circuit.P().transpose());
            for (int c = 0; c < nm; ++c) trips.emplace_back(off_v + c, off_v + c, -1.0);

            Eigen::SparseMatrix<double> J(dim, dim);
            J.setFromTriplets(trips.begin(), trips.end());
            return J;
        };

        NewtonResult res = newton_solve(residual, jacobian, z, nopts);
        if (!res.converged) {
            throw SolveError("monolithic: Newton did not converge", s, res.residual_norm);
        }
        z = res.x;
        a_hist.row(s) = z.segment(off_a, na);
        i_hist.row(s) = z.segment(off_i, nm);
        x_hist.row(s) = z.segment(off_x, nx);
        v_hist.row(s) = z.segment(off_v, nm);
    }

    return CoupledTrace{Waveform(grid, std::move(a_hist)), Waveform(grid, std::move(i_hist)),
                        Waveform(grid, std::move(x_hist)), Waveform(grid, std::move(v_hist))};
}

} // namespace fieldcirc
