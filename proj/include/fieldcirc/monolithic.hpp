#pragma once

#include "fieldcirc/integrate.hpp"

namespace fieldcirc {

/// All component waveforms of the fully coupled solve on the shared grid.
struct CoupledTrace {
    Waveform a;
    Waveform i_m;
    Waveform x;
    Waveform v_c;
};

/// Implicit Euler on the stacked field+circuit DAE with (a, i_m, x, v_c) as
/// explicit unknowns:
///   M (a_n - a_{n-1})/dt + K(a_n) a_n - X i_m = 0
///   X^T (a_n - a_{n-1})/dt - v_c = 0
///   E(x_n)(x_n - x_{n-1})/dt + f(t_n, x_n) + P i_m = 0
///   P^T x_n - v_c = 0
/// Each step is solved by Newton with a direct sparse factorization.
CoupledTrace solve_monolithic(const FieldModel& field, const MnaSystem& circuit,
                              const Eigen::VectorXd& x0, const Eigen::VectorXd& a0,
                              const Eigen::VectorXd& grid, const SolveOptions& opts = {});

} // namespace fieldcirc
