#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fieldcirc/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"field/circuit co-simulation: topology analysis, waveform relaxation and "
                 "monolithic transient solves"};
    app.require_subcommand(1);

    std::string netlist_path;
    bool as_json = false;
    auto* analyze = app.add_subcommand("analyze", "predict WR convergence from the circuit topology");
    analyze->add_option("netlist", netlist_path, "netlist file")->required();
    analyze->add_flag("--json", as_json, "emit the report as JSON");

    std::string config_path, mode = "both", probe_override, out_override, netlist_override;
    double dt_override = 0.0, wr_tol_override = 0.0;
    int kmax_override = 0;
    auto* simulate = app.add_subcommand("simulate", "run the transient co-simulation and write a CSV trace");
    simulate->add_option("--config", config_path, "JSON run configuration")->required();
    simulate->add_option("--mode", mode, "wr, mono or both (default both)");
    simulate->add_option("--probe", probe_override, "probe node for the CSV columns");
    simulate->add_option("--out", out_override, "output CSV path");
    simulate->add_option("--netlist", netlist_override, "netlist path override");
    simulate->add_option("--dt", dt_override, "time step for both subsystems");
    simulate->add_option("--wr-tol", wr_tol_override, "WR stopping tolerance");
    simulate->add_option("--k-max", kmax_override, "WR sweep cap");

    std::string model_ref;
    fieldcirc::ValidationOptions vopts;
    auto* validate = app.add_subcommand("validate", "check the structural assumptions of a field model");
    validate->add_option("model", model_ref,
                         "builtin name (transformer-lite, transformer-lite-brauer) or a "
                         "MatrixMarket path prefix")
        ->required();
    validate->add_option("--samples", vopts.pencil_samples, "random states for the pencil check");
    validate->add_option("--pairs", vopts.monotonicity_pairs, "random pairs for the monotonicity check");
    validate->add_option("--seed", vopts.seed, "RNG seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) {
            return fieldcirc::cmd_analyze(netlist_path, as_json, std::cout, std::cerr);
        }
        if (simulate->parsed()) {
            fieldcirc::RunConfig cfg = fieldcirc::load_run_config(config_path);
            if (!netlist_override.empty()) cfg.netlist_path = netlist_override;
            if (!probe_override.empty()) cfg.probe = probe_override;
            if (!out_override.empty()) cfg.out = out_override;
            if (dt_override > 0.0) cfg.dt_field = cfg.dt_circuit = dt_override;
            if (wr_tol_override > 0.0) cfg.wr_tol = wr_tol_override;
            if (kmax_override > 0) cfg.k_max = kmax_override;
            return fieldcirc::cmd_simulate(cfg, fieldcirc::parse_simulate_mode(mode), std::cout,
                                           std::cerr);
        }
        return fieldcirc::cmd_validate(model_ref, vopts, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return fieldcirc::kExitError;
    }
}
