#include "fieldcirc/wr.hpp"

#include <cmath>
#include <stdexcept>

#include "fieldcirc/errors.hpp"

namespace fieldcirc {

const char* wr_status_name(WrStatus s) {
    switch (s) {
        case WrStatus::Converged: return "Converged";
        case WrStatus::Diverged: return "Diverged";
        case WrStatus::MaxIterations: return "MaxIterations";
    }
    return "?";
}

const WrIterate& WrResult::final_iterate() const {
    if (iterates.empty()) throw std::logic_error("WR result holds no iterates");
    return iterates.back();
}

namespace {

struct WindowOutcome {
    WrStatus status;
    int sweeps;
    std::vector<WrIterate> iterates;
};

WindowOutcome run_window(const FieldModel& field, const MnaSystem& circuit,
                         const Eigen::VectorXd& x0, const Eigen::VectorXd& a0, double t0,
                         double t1, const WrOptions& opts, std::vector<double>& deltas) {
    const Eigen::VectorXd field_grid = make_grid(t0, t1, opts.field.dt);
    const Eigen::VectorXd circuit_grid = make_grid(t0, t1, opts.circuit.dt);

    WindowOutcome out;
    out.status = WrStatus::MaxIterations;
    out.sweeps = 0;

    if (circuit.n_ports() == 0) {
        // Decoupled: the fixed point is reached by a single plain circuit solve.
        Waveform empty_i(circuit_grid, Eigen::MatrixXd(circuit_grid.size(), 0));
        CircuitTrace ct = integrate_circuit(circuit, empty_i, x0, circuit_grid, opts.circuit);
        Eigen::MatrixXd a_fill = Eigen::MatrixXd::Zero(circuit_grid.size(), field.n_dofs());
        if (field.n_dofs() > 0) a_fill.rowwise() = a0.transpose();
        out.iterates.push_back(WrIterate{Waveform(circuit_grid, a_fill),
                                         Waveform(circuit_grid, Eigen::MatrixXd(circuit_grid.size(), 0)),
                                         std::move(ct.x), std::move(ct.v_c), 1});
        deltas.push_back(0.0);
        out.sweeps = 1;
        out.status = WrStatus::Converged;
        return out;
    }

    Waveform v_prev = Waveform::constant(t0, t1, circuit.P().transpose() * x0);
    double delta_1 = 0.0;

    for (int k = 1; k <= opts.k_max; ++k) {
        FieldTrace ft = integrate_field(field, v_prev, a0, field_grid, opts.field);
        CircuitTrace ct = integrate_circuit(circuit, ft.i_m, x0, circuit_grid, opts.circuit);

        double delta_k = sup_diff(ct.v_c, v_prev);
        deltas.push_back(delta_k);
        if (k == 1) delta_1 = delta_k;
        out.sweeps = k;

        bool finite = ft.a.all_finite() && ft.i_m.all_finite() && ct.x.all_finite() &&
                      ct.v_c.all_finite() && std::isfinite(delta_k);
        if (!finite) {
            // Keep the history truncated at the last finite sweep.
            out.status = WrStatus::Diverged;
            return out;
        }

        WrIterate it{std::move(ft.a), std::move(ft.i_m), std::move(ct.x), std::move(ct.v_c), k};
        if (!opts.store_all && out.iterates.size() >= 2) {
            out.iterates.erase(out.iterates.begin());
        }
        out.iterates.push_back(std::move(it));
        const WrIterate& cur = out.iterates.back();

        if (delta_k <= opts.wr_tol * (1.0 + sup_abs(cur.v_c))) {
            out.status = WrStatus::Converged;
            return out;
        }
        if (k >= 2 && delta_k > opts.blowup_factor * delta_1) {
            out.status = WrStatus::Diverged;
            return out;
        }
        v_prev = cur.v_c;
    }
    return out;
}

} // namespace

WrResult gauss_seidel_wr(const FieldModel& field, const MnaSystem& circuit,
                         const Eigen::VectorXd& x0, const Eigen::VectorXd& a0,
                         const WrOptions& opts) {
    if (!(opts.t_end > opts.t_start)) throw std::invalid_argument("wr: empty time window");
    if (!(opts.wr_tol > 0.0) || opts.k_max < 1 || !(opts.blowup_factor > 1.0) ||
        opts.windows < 1) {
        throw std::invalid_argument("wr: invalid options");
    }
    if (circuit.n_ports() != 0 && circuit.n_ports() != field.n_coils()) {
        throw std::invalid_argument("wr: circuit port count does not match field coil count");
    }

    WrResult result;
    result.x0 = x0;
    result.t_start = opts.t_start;
    result.t_end = opts.t_end;

    const double span = (opts.t_end - opts.t_start) / opts.windows;
    Eigen::VectorXd xw = x0;
    Eigen::VectorXd aw = a0;
    WrStatus overall = WrStatus::Converged;

    for (int w = 0; w < opts.windows; ++w) {
        double t0 = opts.t_start + w * span;
        double t1 = w + 1 == opts.windows ? opts.t_end : t0 + span;
        WindowOutcome out = run_window(field, circuit, xw, aw, t0, t1, opts, result.deltas);
        result.window_sweeps.push_back(out.sweeps);
        result.iterations = out.sweeps;

        // Stitch sweep k across windows (best available sweep per window).
        if (w == 0) {
            result.iterates = std::move(out.iterates);
        } else if (!out.iterates.empty()) {
            const size_t have = result.iterates.size();
            const size_t got = out.iterates.size();
            const size_t total = std::max(have, got);
            result.iterates.reserve(total);
            for (size_t k = have; k < total; ++k) {
                WrIterate copy = result.iterates[have - 1];
                copy.sweep = static_cast<int>(k) + 1;
                result.iterates.push_back(std::move(copy));
            }
            for (size_t k = 0; k < total; ++k) {
                const WrIterate& add = out.iterates[std::min(k, got - 1)];
                result.iterates[k].a.append(add.a);
                result.iterates[k].i_m.append(add.i_m);
                result.iterates[k].x.append(add.x);
                result.iterates[k].v_c.append(add.v_c);
            }
        }

        if (out.status == WrStatus::Diverged) {
            overall = WrStatus::Diverged;
            break;
        }
        if (out.status == WrStatus::MaxIterations) {
            overall = WrStatus::MaxIterations;
        }
        const WrIterate& fin = result.iterates.back();
        xw = fin.x.last();
        aw = fin.a.last();
    }
    result.status = overall;
    return result;
}

TraceTable iterate_history_export(const WrResult& result, const Netlist& netlist,
                                  const std::string& probe) {
    if (probe == "0") throw std::invalid_argument("probe node is ground");
    int node = netlist.node_index(probe); // throws on unknown node

    TraceTable table;
    if (result.iterates.empty()) {
        // No sweeps stored: fall back to the constant initial guess.
        table.labels = {"0"};
        table.t.resize(2);
        table.t << result.t_start, result.t_end;
        double v = result.x0.size() > node ? result.x0(node) : 0.0;
        table.values = Eigen::MatrixXd::Constant(2, 1, v);
        return table;
    }
    table.t = result.iterates.front().x.grid();
    table.values.resize(table.t.size(), static_cast<Eigen::Index>(result.iterates.size()));
    for (size_t k = 0; k < result.iterates.size(); ++k) {
        table.labels.push_back(std::to_string(result.iterates[k].sweep));
        const Waveform& x = result.iterates[k].x;
        for (int i = 0; i < table.t.size(); ++i) {
            table.values(i, static_cast<Eigen::Index>(k)) = x.eval(table.t(i))(node);
        }
    }
    return table;
}

} // namespace fieldcirc
