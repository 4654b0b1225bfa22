#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>
#include <sstream>

#include "fieldcirc/cli.hpp"
#include "fieldcirc/errors.hpp"
#include "fieldcirc/monolithic.hpp"
#include "fieldcirc/topology.hpp"
#include "fieldcirc/wr.hpp"

namespace py = pybind11;
using namespace fieldcirc;

namespace {

py::object json_to_py(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

py::dict trace_dict(const Waveform& a, const Waveform& i_m, const Waveform& x,
                    const Waveform& v_c) {
    py::dict d;
    d["t"] = x.grid();
    d["a"] = a.samples();
    d["i_m"] = i_m.samples();
    d["x"] = x.samples();
    d["v_c"] = v_c.samples();
    return d;
}

WrOptions make_wr_options(double t_start, double t_end, double dt, double wr_tol, int k_max,
                          double blowup_factor, int windows) {
    WrOptions opts;
    opts.t_start = t_start;
    opts.t_end = t_end;
    opts.field.dt = dt;
    opts.circuit.dt = dt;
    opts.wr_tol = wr_tol;
    opts.k_max = k_max;
    opts.blowup_factor = blowup_factor;
    opts.windows = windows;
    return opts;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Coupled field/circuit co-simulation: netlist parsing, waveform-relaxation "
              "convergence analysis and transient solvers";

    py::register_exception<ParseError>(m, "NetlistError", PyExc_ValueError);
    py::register_exception<ModelError>(m, "FieldModelError", PyExc_ValueError);
    py::register_exception<SolveError>(m, "SolverError", PyExc_RuntimeError);

    py::class_<Netlist>(m, "Netlist")
        .def_property_readonly("nodes", [](const Netlist& n) { return n.nodes; })
        .def_property_readonly("element_count",
                               [](const Netlist& n) { return n.elements.size(); })
        .def("serialize", &serialize_netlist)
        .def("__repr__", [](const Netlist& n) {
            std::ostringstream s;
            s << "<Netlist " << n.elements.size() << " elements, " << n.nodes.size()
              << " non-ground nodes>";
            return s.str();
        });

    m.def("parse_netlist", py::overload_cast<const std::string&>(&parse_netlist), py::arg("text"));
    m.def("load_netlist", &load_netlist, py::arg("path"));

    m.def(
        "build_incidence",
        [](const Netlist& n) {
            IncidenceSet inc = build_incidence(n);
            py::dict d;
            d["nodes"] = inc.nodes;
            d["A_C"] = inc.A_C;
            d["A_R"] = inc.A_R;
            d["A_L"] = inc.A_L;
            d["A_V"] = inc.A_V;
            d["A_I"] = inc.A_I;
            d["A_m"] = inc.A_m;
            return d;
        },
        py::arg("netlist"), "Reduced incidence matrices, one per element kind.");

    m.def(
        "analyze",
        [](const Netlist& n) { return json_to_py(analyze(n).to_json()); }, py::arg("netlist"),
        "Topological convergence prediction (CVR paths, rank criterion, assumption checks).");

    m.def(
        "find_cvr_path",
        [](const Netlist& n, const std::string& port) -> py::object {
            auto path = find_cvr_path(n, port);
            if (!path) return py::none();
            return py::cast(*path);
        },
        py::arg("netlist"), py::arg("port"));

    py::class_<FieldModel>(m, "FieldModel")
        .def_property_readonly("n_dofs", &FieldModel::n_dofs)
        .def_property_readonly("n_coils", &FieldModel::n_coils)
        .def_property_readonly("linear", &FieldModel::linear)
        .def("equivalent_inductance", &FieldModel::equivalent_inductance)
        .def("X", &FieldModel::X)
        .def("__repr__", [](const FieldModel& f) {
            std::ostringstream s;
            s << "<FieldModel " << f.n_dofs() << " dofs, " << f.n_coils() << " coil(s)>";
            return s.str();
        });

    m.def(
        "transformer_lite",
        [](int nx, double sigma_core, double turns, bool brauer) {
            TransformerLiteOptions opts;
            opts.nx = nx;
            opts.sigma_core = sigma_core;
            opts.turns = turns;
            opts.brauer = brauer;
            return transformer_lite(opts);
        },
        py::arg("nx") = 33, py::arg("sigma_core") = 0.0, py::arg("turns") = 120.0,
        py::arg("brauer") = false, "Built-in benchmark field model.");

    m.def("load_matrix_model", py::overload_cast<const std::string&>(&load_matrix_model),
          py::arg("prefix"));
    m.def("save_matrix_model", &save_matrix_model, py::arg("model"), py::arg("prefix"));

    m.def(
        "validate_assumptions",
        [](const FieldModel& model, int pencil_samples, int monotonicity_pairs,
           std::uint64_t seed) {
            ValidationOptions opts;
            opts.pencil_samples = pencil_samples;
            opts.monotonicity_pairs = monotonicity_pairs;
            opts.seed = seed;
            AssumptionReport r = validate_assumptions(model, opts);
            py::dict d;
            d["m_symmetric"] = r.m_symmetric;
            d["m_asymmetry_rel"] = r.m_asymmetry_rel;
            d["pencil_spd"] = r.pencil_spd;
            d["pencil_failures"] = r.pencil_failures;
            d["x_full_rank"] = r.x_full_rank;
            d["x_rank"] = r.x_rank;
            d["monotone"] = r.monotone;
            d["monotonicity_min"] = r.monotonicity_min;
            d["all_ok"] = r.all_ok();
            return d;
        },
        py::arg("model"), py::arg("pencil_samples") = 50, py::arg("monotonicity_pairs") = 200,
        py::arg("seed") = 1);

    py::class_<WrResult>(m, "WrResult")
        .def_property_readonly("status",
                               [](const WrResult& r) { return wr_status_name(r.status); })
        .def_property_readonly("iterations", [](const WrResult& r) { return r.iterations; })
        .def_property_readonly("deltas", [](const WrResult& r) { return r.deltas; })
        .def_property_readonly("window_sweeps", [](const WrResult& r) { return r.window_sweeps; })
        .def_property_readonly("sweep_count", [](const WrResult& r) { return r.iterates.size(); })
        .def("final",
             [](const WrResult& r) {
                 const WrIterate& it = r.final_iterate();
                 return trace_dict(it.a, it.i_m, it.x, it.v_c);
             })
        .def(
            "iterate",
            [](const WrResult& r, int k) {
                const WrIterate& it = r.iterates.at(static_cast<size_t>(k));
                return trace_dict(it.a, it.i_m, it.x, it.v_c);
            },
            py::arg("k"))
        .def("__repr__", [](const WrResult& r) {
            std::ostringstream s;
            s << "<WrResult " << wr_status_name(r.status) << " after " << r.iterations
              << " sweep(s)>";
            return s.str();
        });

    m.def(
        "gauss_seidel_wr",
        [](const Netlist& netlist, const FieldModel& field, double t_start, double t_end,
           double dt, double wr_tol, int k_max, double blowup_factor, int windows) {
            MnaSystem circuit = MnaSystem::from_netlist(netlist);
            WrOptions opts =
                make_wr_options(t_start, t_end, dt, wr_tol, k_max, blowup_factor, windows);
            Eigen::VectorXd a0 = Eigen::VectorXd::Zero(field.n_dofs());
            Eigen::VectorXd x0 = project_consistent_circuit(circuit, t_start,
                                                            circuit.zero_state(),
                                                            initial_port_current(field, a0));
            return gauss_seidel_wr(field, circuit, x0, a0, opts);
        },
        py::arg("netlist"), py::arg("field"), py::arg("t_start") = 0.0, py::arg("t_end") = 0.8,
        py::arg("dt") = 1e-2, py::arg("wr_tol") = 1e-6, py::arg("k_max") = 20,
        py::arg("blowup_factor") = 1e6, py::arg("windows") = 1,
        "Gauss-Seidel waveform relaxation from zero (projected) initial values.");

    m.def(
        "solve_monolithic",
        [](const Netlist& netlist, const FieldModel& field, double t_start, double t_end,
           double dt) {
            MnaSystem circuit = MnaSystem::from_netlist(netlist);
            Eigen::VectorXd a0 = Eigen::VectorXd::Zero(field.n_dofs());
            Eigen::VectorXd x0 = project_consistent_circuit(circuit, t_start,
                                                            circuit.zero_state(),
                                                            initial_port_current(field, a0));
            CoupledTrace tr =
                solve_monolithic(field, circuit, x0, a0, make_grid(t_start, t_end, dt));
            return trace_dict(tr.a, tr.i_m, tr.x, tr.v_c);
        },
        py::arg("netlist"), py::arg("field"), py::arg("t_start") = 0.0, py::arg("t_end") = 0.8,
        py::arg("dt") = 1e-2, "Implicit Euler on the fully coupled system.");

    m.def(
        "run_simulation",
        [](const std::string& config_json, const std::string& mode) {
            RunConfig cfg = parse_run_config(config_json);
            SimulationOutput out = run_simulation(cfg, parse_simulate_mode(mode));
            py::dict d;
            d["labels"] = out.table.labels;
            d["t"] = out.table.t;
            d["values"] = out.table.values;
            d["csv"] = format_trace_csv(out.table);
            if (out.wr) {
                d["wr_status"] = wr_status_name(out.wr->status);
                d["wr_deltas"] = out.wr->deltas;
            }
            return d;
        },
        py::arg("config_json"), py::arg("mode") = "both",
        "Run from a JSON config string; returns the probe trace table.");

    m.attr("NU_VACUUM") = kNuVacuum;
}
