#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "fieldcirc/field.hpp"
#include "fieldcirc/netlist.hpp"

namespace fieldcirc {

/// Field model reference: the builtin generator or a MatrixMarket file set.
struct FieldConfig {
    std::string builtin = "transformer-lite";
    TransformerLiteOptions transformer;
    std::string path_prefix; // nonempty: load <prefix>_{M,K,X}.mtx instead

    bool from_files() const { return !path_prefix.empty(); }
};

/// Simulation run description. Defaults encode the shipped benchmark:
/// window [0, 0.8] s, dt = 1e-2 s, probe n3.
struct RunConfig {
    std::string netlist_path;
    std::optional<FieldConfig> field; // overrides the netlist .field reference
    double t_start = 0.0;
    double t_end = 0.8;
    double dt_field = 1e-2;
    double dt_circuit = 1e-2;
    double wr_tol = 1e-6;
    int k_max = 20;
    double blowup_factor = 1e6;
    int windows = 1;
    double newton_tol = 1e-10;
    int newton_max = 25;
    std::string probe = "n3";
    std::string out = "trace.csv";
    std::uint64_t seed = 1;

    void validate() const;
};

/// JSON document with the keys of RunConfig ("dt" sets both subsystem step
/// sizes, "dt_field"/"dt_circuit" override individually, "window" is a
/// two-element array). Unknown keys are rejected.
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir = "");

/// Builds the field model a simulation needs: the config override when given,
/// otherwise the netlist's .field declaration for the ports' model id
/// ("transformer-lite" or a path prefix, resolved against the netlist's
/// directory). The returned model's X columns follow the ports' coil
/// selections. Returns an empty model for circuits without field ports.
FieldModel resolve_field_model(const Netlist& netlist, const RunConfig& cfg);

} // namespace fieldcirc
