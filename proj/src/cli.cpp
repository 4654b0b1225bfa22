#include "fieldcirc/cli.hpp"

#include <filesystem>
#include <future>
#include <ostream>

#include <nlohmann/json.hpp>

#include "fieldcirc/errors.hpp"
#include "fieldcirc/topology.hpp"

namespace fieldcirc {

SimulateMode parse_simulate_mode(const std::string& mode) {
    if (mode == "wr") return SimulateMode::Wr;
    if (mode == "mono" || mode == "monolithic") return SimulateMode::Monolithic;
    if (mode == "both") return SimulateMode::Both;
    throw ParseError("unknown mode '" + mode + "' (expected wr, mono or both)");
}

int cmd_analyze(const std::string& netlist_path, bool as_json, std::ostream& out,
                std::ostream& err) {
    try {
        Netlist netlist = load_netlist(netlist_path);
        TopologyReport report = analyze(netlist);
        if (as_json) {
            out << report.to_json().dump(2) << "\n";
        } else {
            out << report.to_text();
        }
        return report.prediction == Prediction::GuaranteedConvergent ? kExitOk
                                                                     : kExitNotGuaranteed;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
}

SimulationOutput run_simulation(const RunConfig& cfg, SimulateMode mode) {
    cfg.validate();
    Netlist netlist = load_netlist(cfg.netlist_path);
    MnaSystem circuit = MnaSystem::from_netlist(netlist);
    FieldModel field = resolve_field_model(netlist, cfg);

    SolveOptions sopts;
    sopts.newton_tol = cfg.newton_tol;
    sopts.newton_max = cfg.newton_max;

    WrOptions wopts;
    wopts.t_start = cfg.t_start;
    wopts.t_end = cfg.t_end;
    wopts.wr_tol = cfg.wr_tol;
    wopts.k_max = cfg.k_max;
    wopts.blowup_factor = cfg.blowup_factor;
    wopts.windows = cfg.windows;
    wopts.field = sopts;
    wopts.field.dt = cfg.dt_field;
    wopts.circuit = sopts;
    wopts.circuit.dt = cfg.dt_circuit;

    const Eigen::VectorXd a0 = Eigen::VectorXd::Zero(field.n_dofs());
    const Eigen::VectorXd i_m0 = initial_port_current(field, a0);
    Eigen::VectorXd x0 = project_consistent_circuit(circuit, cfg.t_start,
                                                    circuit.zero_state(), i_m0);

    SimulationOutput result;
    const Eigen::VectorXd mono_grid = make_grid(cfg.t_start, cfg.t_end, cfg.dt_circuit);
    SolveOptions mono_opts = sopts;
    mono_opts.dt = cfg.dt_circuit;

    if (mode == SimulateMode::Both) {
        // Independent solves over immutable inputs; run them in parallel.
        auto mono = std::async(std::launch::async, [&] {
            return solve_monolithic(field, circuit, x0, a0, mono_grid, mono_opts);
        });
        result.wr = gauss_seidel_wr(field, circuit, x0, a0, wopts);
        result.monolithic = mono.get();
    } else if (mode == SimulateMode::Monolithic) {
        result.monolithic = solve_monolithic(field, circuit, x0, a0, mono_grid, mono_opts);
    } else {
        result.wr = gauss_seidel_wr(field, circuit, x0, a0, wopts);
    }

    // Assemble the trace table: t, [mon], one column per stored sweep.
    const int probe = netlist.node_index(cfg.probe);
    if (probe < 0) throw ParseError("probe node is ground");
    if (result.wr) {
        result.table = iterate_history_export(*result.wr, netlist, cfg.probe);
    } else {
        result.table.t = mono_grid;
        result.table.values.resize(mono_grid.size(), 0);
    }
    if (result.monolithic) {
        Eigen::MatrixXd with_mon(result.table.t.size(), result.table.values.cols() + 1);
        for (int r = 0; r < result.table.t.size(); ++r) {
            with_mon(r, 0) = result.monolithic->x.eval(result.table.t(r))(probe);
        }
        with_mon.rightCols(result.table.values.cols()) = result.table.values;
        result.table.values = std::move(with_mon);
        result.table.labels.insert(result.table.labels.begin(), "mon");
    }
    return result;
}

int cmd_simulate(const RunConfig& cfg, SimulateMode mode, std::ostream& out, std::ostream& err) {
    try {
        SimulationOutput sim = run_simulation(cfg, mode);
        write_trace_csv(cfg.out, sim.table);
        out << "wrote " << cfg.out << "\n";
        if (sim.wr) {
            out << "wr: " << wr_status_name(sim.wr->status) << " after " << sim.wr->iterations
                << " sweep(s)";
            if (!sim.wr->deltas.empty()) {
                out << ", deltas:";
                for (double d : sim.wr->deltas) out << " " << d;
            }
            out << "\n";
            if (sim.wr->status != WrStatus::Converged) return kExitNotGuaranteed;
        }
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
}

int cmd_validate(const std::string& model_ref, const ValidationOptions& vopts, std::ostream& out,
                 std::ostream& err) {
    try {
        FieldModel model;
        if (model_ref == "transformer-lite") {
            model = transformer_lite();
        } else if (model_ref == "transformer-lite-brauer") {
            TransformerLiteOptions opts;
            opts.brauer = true;
            model = transformer_lite(opts);
        } else {
            // lenient load: defects show up as failed report items
            model = load_matrix_model_unchecked(model_ref);
        }
        AssumptionReport report = validate_assumptions(model, vopts);
        out << report.to_text();
        return report.all_ok() ? kExitOk : kExitNotGuaranteed;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
}

} // namespace fieldcirc
