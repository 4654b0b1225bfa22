#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "fieldcirc/netlist.hpp"

namespace fieldcirc {

/// Branch conductance law i = g(v). Linear laws carry the slope; nonlinear
/// ones a function and (optionally) its derivative. Missing derivatives fall
/// back to a central finite difference with step 1e-6*(1+|v|).
struct ConductanceLaw {
    bool linear = true;
    double slope = 0.0;
    std::function<double(double)> fn;
    std::function<double(double)> dfn;

    static ConductanceLaw make_linear(double g);
    static ConductanceLaw make_nonlinear(std::function<double(double)> g,
                                         std::function<double(double)> dg = nullptr);
    double eval(double v) const;
    double deriv(double v) const;
};

/// State-dependent branch coefficient C(v) or L(i); uniformly positive.
struct CoefficientLaw {
    bool linear = true;
    double value = 0.0;
    std::function<double(double)> fn;
    std::function<double(double)> dfn;

    static CoefficientLaw make_constant(double c);
    static CoefficientLaw make_nonlinear(std::function<double(double)> c,
                                         std::function<double(double)> dc = nullptr);
    double eval(double u) const;
    double deriv(double u) const;
};

/// Circuit unknowns x = (e, i_L, i_V): node potentials, inductor currents,
/// voltage source currents.
struct CircuitState {
    Eigen::VectorXd e;
    Eigen::VectorXd i_L;
    Eigen::VectorXd i_V;

    Eigen::VectorXd stacked() const;
};

/// The circuit DAE  E(x) x' + f(t,x) + P i_m = 0  with
///   E(x) = blockdiag(A_C C(A_C^T e) A_C^T, -L(i_L), 0)
///   f(t,x) = (A_R g(A_R^T e) + A_L i_L + A_V i_V + A_I i_src(t),
///             A_L^T e,
///             A_V^T e - q_v(t))
///   P = (A_m; 0; 0),          v_c = P^T x = A_m^T e.
/// The port current i_m enters the node balance with the same orientation as
/// inductor currents, so the coupled field device behaves passively.
class MnaSystem {
public:
    explicit MnaSystem(IncidenceSet inc);

    static MnaSystem from_netlist(const Netlist& n);

    int n_nodes() const { return static_cast<int>(inc_.nodes.size()); }
    int n_L() const { return static_cast<int>(inc_.A_L.cols()); }
    int n_V() const { return static_cast<int>(inc_.A_V.cols()); }
    int n_ports() const { return static_cast<int>(inc_.A_m.cols()); }
    int dim() const { return n_nodes() + n_L() + n_V(); }
    const IncidenceSet& incidence() const { return inc_; }

    /// Replace the linear law of a named branch (monotone nonlinear laws).
    void set_conductance_law(const std::string& name, ConductanceLaw law);
    void set_capacitance_law(const std::string& name, CoefficientLaw law);
    void set_inductance_law(const std::string& name, CoefficientLaw law);

    bool linear() const;

    const Eigen::MatrixXd& P() const { return P_; }

    Eigen::MatrixXd eval_E(const Eigen::VectorXd& x) const;
    Eigen::VectorXd eval_f(double t, const Eigen::VectorXd& x) const;
    /// d f / d x.
    Eigen::MatrixXd df_dx(double t, const Eigen::VectorXd& x) const;
    /// d [E(x) w] / d x for fixed w (the product-rule term of full Newton).
    Eigen::MatrixXd dEw_dx(const Eigen::VectorXd& x, const Eigen::VectorXd& w) const;

    CircuitState split(const Eigen::VectorXd& x) const;
    Eigen::VectorXd zero_state() const { return Eigen::VectorXd::Zero(dim()); }

    const std::vector<SourceSpec>& current_sources() const { return i_src_; }
    const std::vector<SourceSpec>& voltage_sources() const { return v_src_; }

private:
    IncidenceSet inc_;
    Eigen::MatrixXd Ac_, Ar_, Al_, Av_, Ai_, Am_; // double copies of the incidences
    Eigen::MatrixXd P_;
    std::vector<CoefficientLaw> cap_;
    std::vector<ConductanceLaw> res_;
    std::vector<CoefficientLaw> ind_;
    std::vector<SourceSpec> i_src_;
    std::vector<SourceSpec> v_src_;

    int branch_index(const std::vector<std::string>& names, const std::string& name,
                     const char* kind) const;
};

} // namespace fieldcirc
