#pragma once

#include <Eigen/Dense>

#include "fieldcirc/field.hpp"
#include "fieldcirc/mna.hpp"
#include "fieldcirc/waveform.hpp"

namespace fieldcirc {

enum class JacobianMode { Analytic, FiniteDifference };

/// Handling of the state-dependent coefficient matrix E(x) in the circuit
/// residual: Full evaluates it at the unknown new state (with the
/// product-rule Jacobian term), Frozen at the previous state (simplified
/// Newton). Auto picks Full for constant laws, where both coincide, and
/// Frozen for nonlinear ones.
enum class CoefficientHandling { Auto, Full, Frozen };

/// Per-subsystem implicit-Euler settings.
struct SolveOptions {
    double dt = 1e-2;         // s
    double newton_tol = 1e-10;
    int newton_max = 25;
    JacobianMode jacobian = JacobianMode::Analytic;
    CoefficientHandling coefficients = CoefficientHandling::Auto;
};

struct FieldTrace {
    Waveform a;
    Waveform i_m;
};

struct CircuitTrace {
    Waveform x;
    Waveform v_c;
};

/// Integrates  M a' + K(a) a = X i_m,  X^T a' = v_c(t)  over `grid` with the
/// implicit Euler scheme, solving each step for (a_n, i_m_n) by Newton.
/// The reported port current at the initial time is the least-squares
/// solution of the static balance X i_m = K(a0) a0 (exact when X^T M = 0).
FieldTrace integrate_field(const FieldModel& model, const Waveform& v_c,
                           const Eigen::VectorXd& a0, const Eigen::VectorXd& grid,
                           const SolveOptions& opts = {});

/// Integrates the circuit DAE with a prescribed port current waveform:
/// per step Newton on E(x_n)(x_n - x_{n-1})/dt + f(t_n, x_n) + P i_m(t_n) = 0,
/// output v_c rows are P^T x_n. The initial state must satisfy the algebraic
/// rows at t = grid(0) to within 1e-8 (see project_consistent_circuit).
CircuitTrace integrate_circuit(const MnaSystem& sys, const Waveform& i_m,
                               const Eigen::VectorXd& x0, const Eigen::VectorXd& grid,
                               const SolveOptions& opts = {});

/// Adjusts x along ker E(x) so the algebraic rows of the residual vanish at
/// t0, holding the differential variables fixed. Throws SolveError when the
/// algebraic residual exceeds 1e-8 after projection.
Eigen::VectorXd project_consistent_circuit(const MnaSystem& sys, double t0,
                                           const Eigen::VectorXd& x_guess,
                                           const Eigen::VectorXd& i_m0);

/// Infinity norm of the algebraic part of the circuit residual at t0 (the
/// left-nullspace rows of E(x)).
double circuit_algebraic_residual(const MnaSystem& sys, double t0, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& i_m0);

/// Initial port current from the static balance (least squares through X).
Eigen::VectorXd initial_port_current(const FieldModel& model, const Eigen::VectorXd& a0);

} // namespace fieldcirc
