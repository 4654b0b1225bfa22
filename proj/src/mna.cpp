#include "fieldcirc/mna.hpp"

#include <algorithm>
#include <stdexcept>

#include "fieldcirc/errors.hpp"
#include "fieldcirc/linalg.hpp"

namespace fieldcirc {

ConductanceLaw ConductanceLaw::make_linear(double g) {
    ConductanceLaw law;
    law.linear = true;
    law.slope = g;
    return law;
}

ConductanceLaw ConductanceLaw::make_nonlinear(std::function<double(double)> g,
                                              std::function<double(double)> dg) {
    ConductanceLaw law;
    law.linear = false;
    law.fn = std::move(g);
    law.dfn = std::move(dg);
    return law;
}

double ConductanceLaw::eval(double v) const { return linear ? slope * v : fn(v); }

double ConductanceLaw::deriv(double v) const {
    if (linear) return slope;
    if (dfn) return dfn(v);
    return fd_derivative(fn, v);
}

CoefficientLaw CoefficientLaw::make_constant(double c) {
    CoefficientLaw law;
    law.linear = true;
    law.value = c;
    return law;
}

CoefficientLaw CoefficientLaw::make_nonlinear(std::function<double(double)> c,
                                              std::function<double(double)> dc) {
    CoefficientLaw law;
    law.linear = false;
    law.fn = std::move(c);
    law.dfn = std::move(dc);
    return law;
}

double CoefficientLaw::eval(double u) const { return linear ? value : fn(u); }

double CoefficientLaw::deriv(double u) const {
    if (linear) return 0.0;
    if (dfn) return dfn(u);
    return fd_derivative(fn, u);
}

Eigen::VectorXd CircuitState::stacked() const {
    Eigen::VectorXd x(e.size() + i_L.size() + i_V.size());
    x << e, i_L, i_V;
    return x;
}

MnaSystem::MnaSystem(IncidenceSet inc) : inc_(std::move(inc)) {
    Ac_ = inc_.A_C.cast<double>();
    Ar_ = inc_.A_R.cast<double>();
    Al_ = inc_.A_L.cast<double>();
    Av_ = inc_.A_V.cast<double>();
    Ai_ = inc_.A_I.cast<double>();
    Am_ = inc_.A_m.cast<double>();
    P_ = Eigen::MatrixXd::Zero(dim(), n_ports());
    P_.topRows(n_nodes()) = Am_;
    cap_.resize(inc_.A_C.cols());
    res_.resize(inc_.A_R.cols());
    ind_.resize(inc_.A_L.cols());
    i_src_.resize(inc_.A_I.cols());
    v_src_.resize(inc_.A_V.cols());
}

MnaSystem MnaSystem::from_netlist(const Netlist& n) {
    MnaSystem sys(build_incidence(n));
    auto law_value = [&](const std::vector<std::string>& names, size_t i) {
        const Element* e = n.find_element(names[i]);
        if (!e) throw std::logic_error("incidence names out of sync with netlist");
        return e->value;
    };
    for (size_t i = 0; i < sys.cap_.size(); ++i) {
        sys.cap_[i] = CoefficientLaw::make_constant(law_value(sys.inc_.names_C, i));
    }
    for (size_t i = 0; i < sys.res_.size(); ++i) {
        sys.res_[i] = ConductanceLaw::make_linear(law_value(sys.inc_.names_R, i));
    }
    for (size_t i = 0; i < sys.ind_.size(); ++i) {
        sys.ind_[i] = CoefficientLaw::make_constant(law_value(sys.inc_.names_L, i));
    }
    for (size_t i = 0; i < sys.i_src_.size(); ++i) {
        const Element* e = n.find_element(sys.inc_.names_I[i]);
        sys.i_src_[i] = n.sources.at(e->ref);
    }
    for (size_t i = 0; i < sys.v_src_.size(); ++i) {
        const Element* e = n.find_element(sys.inc_.names_V[i]);
        sys.v_src_[i] = n.sources.at(e->ref);
    }
    return sys;
}

int MnaSystem::branch_index(const std::vector<std::string>& names, const std::string& name,
                            const char* kind) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
        throw std::invalid_argument(std::string("no ") + kind + " branch named '" + name + "'");
    }
    return static_cast<int>(it - names.begin());
}

void MnaSystem::set_conductance_law(const std::string& name, ConductanceLaw law) {
    res_[branch_index(inc_.names_R, name, "resistor")] = std::move(law);
}

void MnaSystem::set_capacitance_law(const std::string& name, CoefficientLaw law) {
    cap_[branch_index(inc_.names_C, name, "capacitor")] = std::move(law);
}

void MnaSystem::set_inductance_law(const std::string& name, CoefficientLaw law) {
    ind_[branch_index(inc_.names_L, name, "inductor")] = std::move(law);
}

bool MnaSystem::linear() const {
    for (const auto& l : cap_) {
        if (!l.linear) return false;
    }
    for (const auto& l : res_) {
        if (!l.linear) return false;
    }
    for (const auto& l : ind_) {
        if (!l.linear) return false;
    }
    return true;
}

CircuitState MnaSystem::split(const Eigen::VectorXd& x) const {
    CircuitState s;
    s.e = x.head(n_nodes());
    s.i_L = x.segment(n_nodes(), n_L());
    s.i_V = x.tail(n_V());
    return s;
}

Eigen::MatrixXd MnaSystem::eval_E(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(dim(), dim());
    const auto e = x.head(n_nodes());
    if (Ac_.cols() > 0) {
        Eigen::VectorXd u = Ac_.transpose() * e;
        Eigen::VectorXd c(u.size());
        for (int i = 0; i < u.size(); ++i) c(i) = cap_[i].eval(u(i));
        E.topLeftCorner(n_nodes(), n_nodes()) = Ac_ * c.asDiagonal() * Ac_.transpose();
    }
    for (int i = 0; i < n_L(); ++i) {
        E(n_nodes() + i, n_nodes() + i) = -ind_[i].eval(x(n_nodes() + i));
    }
    return E;
}

Eigen::VectorXd MnaSystem::eval_f(double t, const Eigen::VectorXd& x) const {
    const auto e = x.head(n_nodes());
    const auto iL = x.segment(n_nodes(), n_L());
    const auto iV = x.tail(n_V());

    Eigen::VectorXd f(dim());
    Eigen::VectorXd kcl = Eigen::VectorXd::Zero(n_nodes());
    if (Ar_.cols() > 0) {
        Eigen::VectorXd v = Ar_.transpose() * e;
        Eigen::VectorXd g(v.size());
        for (int i = 0; i < v.size(); ++i) g(i) = res_[i].eval(v(i));
        kcl += Ar_ * g;
    }
    if (n_L() > 0) kcl += Al_ * iL;
    if (n_V() > 0) kcl += Av_ * iV;
    if (Ai_.cols() > 0) {
        Eigen::VectorXd is(Ai_.cols());
        for (int i = 0; i < is.size(); ++i) is(i) = i_src_[i].eval(t);
        kcl += Ai_ * is;
    }
    f.head(n_nodes()) = kcl;
    f.segment(n_nodes(), n_L()) = Al_.transpose() * e;
    Eigen::VectorXd qv(n_V());
    for (int i = 0; i < qv.size(); ++i) qv(i) = v_src_[i].eval(t);
    f.tail(n_V()) = Av_.transpose() * e - qv;
    return f;
}

Eigen::MatrixXd MnaSystem::df_dx(double t, const Eigen::VectorXd& x) const {
    (void)t;
    const auto e = x.head(n_nodes());
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim(), dim());
    if (Ar_.cols() > 0) {
        Eigen::VectorXd v = Ar_.transpose() * e;
        Eigen::VectorXd g(v.size());
        for (int i = 0; i < v.size(); ++i) g(i) = res_[i].deriv(v(i));
        J.topLeftCorner(n_nodes(), n_nodes()) = Ar_ * g.asDiagonal() * Ar_.transpose();
    }
    J.block(0, n_nodes(), n_nodes(), n_L()) = Al_;
    J.block(0, n_nodes() + n_L(), n_nodes(), n_V()) = Av_;
    J.block(n_nodes(), 0, n_L(), n_nodes()) = Al_.transpose();
    J.block(n_nodes() + n_L(), 0, n_V(), n_nodes()) = Av_.transpose();
    return J;
}

Eigen::MatrixXd MnaSystem::dEw_dx(const Eigen::VectorXd& x, const Eigen::VectorXd& w) const {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim(), dim());
    const auto e = x.head(n_nodes());
    if (Ac_.cols() > 0) {
        Eigen::VectorXd u = Ac_.transpose() * e;
        Eigen::VectorXd uw = Ac_.transpose() * w.head(n_nodes());
        Eigen::VectorXd d(u.size());
        for (int i = 0; i < u.size(); ++i) d(i) = cap_[i].deriv(u(i)) * uw(i);
        J.topLeftCorner(n_nodes(), n_nodes()) = Ac_ * d.asDiagonal() * Ac_.transpose();
    }
    for (int i = 0; i < n_L(); ++i) {
        double ii = x(n_nodes() + i);
        J(n_nodes() + i, n_nodes() + i) = -ind_[i].deriv(ii) * w(n_nodes() + i);
    }
    return J;
}

} // namespace fieldcirc
