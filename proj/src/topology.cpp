#include "fieldcirc/topology.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fieldcirc/errors.hpp"
#include "fieldcirc/linalg.hpp"

namespace fieldcirc {

std::optional<std::vector<std::string>> find_cvr_path(const Netlist& n, const std::string& port) {
    const Element* p = n.find_element(port);
    if (p == nullptr || p->kind != ElementKind::FieldPort) {
        throw ParseError("'" + port + "' does not name a field port");
    }
    if (p->node_pos == p->node_neg) {
        return std::vector<std::string>{}; // terminals coincide, trivially connected
    }

    // BFS over the undirected subgraph of C/V/R branches, ground included.
    const int ground = static_cast<int>(n.nodes.size());
    auto idx = [&](const std::string& name) {
        return name == "0" ? ground : n.node_index(name);
    };
    std::vector<std::vector<int>> adj(n.nodes.size() + 1);
    for (const auto& e : n.elements) {
        if (e.kind != ElementKind::Capacitor && e.kind != ElementKind::VoltageSource &&
            e.kind != ElementKind::Resistor) {
            continue;
        }
        int a = idx(e.node_pos), b = idx(e.node_neg);
        if (a == b) continue;
        adj[a].push_back(b);
        adj[b].push_back(a);
    }

    const int src = idx(p->node_pos), dst = idx(p->node_neg);
    std::vector<int> prev(adj.size(), -2);
    std::deque<int> queue{src};
    prev[src] = -1;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        if (v == dst) break;
        for (int w : adj[v]) {
            if (prev[w] == -2) {
                prev[w] = v;
                queue.push_back(w);
            }
        }
    }
    if (prev[dst] == -2) return std::nullopt;

    std::vector<std::string> path;
    for (int v = dst; v != -1; v = prev[v]) {
        path.push_back(v == ground ? "0" : n.nodes[v]);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

bool algebraic_criterion(const IncidenceSet& inc) {
    if (inc.A_m.cols() == 0) return true;
    const int rows = inc.n_nodes();
    Eigen::MatrixXd acvr(rows, inc.A_C.cols() + inc.A_V.cols() + inc.A_R.cols());
    acvr << inc.A_C.cast<double>(), inc.A_V.cast<double>(), inc.A_R.cast<double>();
    Eigen::MatrixXd with_m(rows, acvr.cols() + inc.A_m.cols());
    with_m << acvr, inc.A_m.cast<double>();
    return matrix_rank(acvr) == matrix_rank(with_m);
}

Assumption2c check_assumption2c(const IncidenceSet& inc) {
    Assumption2c r;
    Eigen::MatrixXd av = inc.A_V.cast<double>();
    r.av_full_column_rank = matrix_rank(av) == av.cols();

    Eigen::MatrixXd acvrl(inc.n_nodes(),
                          inc.A_C.cols() + inc.A_V.cols() + inc.A_R.cols() + inc.A_L.cols());
    acvrl << inc.A_C.cast<double>(), inc.A_V.cast<double>(), inc.A_R.cast<double>(),
        inc.A_L.cast<double>();
    r.acvrl_full_row_rank = matrix_rank(acvrl) == acvrl.rows();
    return r;
}

TopologyReport analyze(const Netlist& n) {
    TopologyReport rep;
    const IncidenceSet inc = build_incidence(n);
    rep.assumption2c = check_assumption2c(inc);
    rep.algebraic_criterion_ok = algebraic_criterion(inc);

    bool all_have_path = true;
    for (const Element* p : n.field_ports()) {
        PortPathInfo info;
        info.port = p->name;
        info.cvr_path = find_cvr_path(n, p->name);
        all_have_path = all_have_path && info.cvr_path.has_value();
        rep.ports.push_back(std::move(info));
    }
    rep.prediction = all_have_path ? Prediction::GuaranteedConvergent : Prediction::NotGuaranteed;
    rep.criteria_agree = (all_have_path == rep.algebraic_criterion_ok);
    return rep;
}

std::string TopologyReport::to_text() const {
    std::ostringstream out;
    out << "field ports: " << ports.size() << "\n";
    for (const auto& p : ports) {
        out << "  " << p.port << ": ";
        if (!p.cvr_path) {
            out << "no parallel CVR path\n";
        } else if (p.cvr_path->empty()) {
            out << "terminals coincide (trivial CVR path)\n";
        } else {
            out << "CVR path";
            for (const auto& node : *p.cvr_path) out << " " << node;
            out << "\n";
        }
    }
    out << "assumption 2c: A_V full column rank: " << (assumption2c.av_full_column_rank ? "yes" : "NO")
        << ", (A_C A_V A_R A_L) full row rank: " << (assumption2c.acvrl_full_row_rank ? "yes" : "NO")
        << "\n";
    out << "algebraic criterion (A_m within span of A_C A_V A_R): "
        << (algebraic_criterion_ok ? "yes" : "no") << "\n";
    if (!criteria_agree) out << "WARNING: graph and algebraic criteria disagree\n";
    out << "prediction: "
        << (prediction == Prediction::GuaranteedConvergent
                ? "GuaranteedConvergent (waveform relaxation converges)"
                : "NotGuaranteed (convergence guarantee does not apply)")
        << "\n";
    return out.str();
}

nlohmann::json TopologyReport::to_json() const {
    nlohmann::json j;
    j["ports"] = nlohmann::json::array();
    j["cvr_paths"] = nlohmann::json::object();
    for (const auto& p : ports) {
        j["ports"].push_back(p.port);
        if (p.cvr_path) {
            j["cvr_paths"][p.port] = *p.cvr_path;
        } else {
            j["cvr_paths"][p.port] = nullptr;
        }
    }
    j["prediction"] = prediction == Prediction::GuaranteedConvergent ? "GuaranteedConvergent"
                                                                     : "NotGuaranteed";
    j["assumption2c"] = {{"av_full_column_rank", assumption2c.av_full_column_rank},
                         {"acvrl_full_row_rank", assumption2c.acvrl_full_row_rank}};
    j["algebraic_criterion"] = algebraic_criterion_ok;
    return j;
}

} // namespace fieldcirc
