#include "fieldcirc/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fieldcirc/errors.hpp"

namespace fieldcirc {

void RunConfig::validate() const {
    if (netlist_path.empty()) throw ParseError("config: missing 'netlist'");
    if (!(t_end > t_start)) throw ParseError("config: window must satisfy t_end > t_start");
    if (!(dt_field > 0.0) || !(dt_circuit > 0.0)) throw ParseError("config: dt must be positive");
    if (!(wr_tol > 0.0)) throw ParseError("config: wr_tol must be positive");
    if (k_max < 1) throw ParseError("config: k_max must be at least 1");
    if (!(blowup_factor > 1.0)) throw ParseError("config: blowup_factor must exceed 1");
    if (windows < 1) throw ParseError("config: windows must be at least 1");
    if (!(newton_tol > 0.0) || newton_max < 1) throw ParseError("config: bad newton settings");
    if (probe.empty()) throw ParseError("config: missing 'probe'");
}

namespace {

FieldConfig parse_field_config(const nlohmann::json& j) {
    FieldConfig fc;
    static const std::set<std::string> known{"builtin", "paths",  "nx",     "sigma_core",
                                             "turns",   "brauer", "nu_core"};
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) throw ParseError("config: unknown field key '" + key + "'");
    }
    if (j.contains("paths")) {
        fc.path_prefix = j.at("paths").get<std::string>();
    }
    if (j.contains("builtin")) fc.builtin = j.at("builtin").get<std::string>();
    if (j.contains("nx")) fc.transformer.nx = j.at("nx").get<int>();
    if (j.contains("sigma_core")) fc.transformer.sigma_core = j.at("sigma_core").get<double>();
    if (j.contains("turns")) fc.transformer.turns = j.at("turns").get<double>();
    if (j.contains("brauer")) fc.transformer.brauer = j.at("brauer").get<bool>();
    if (j.contains("nu_core")) fc.transformer.nu_core = j.at("nu_core").get<double>();
    return fc;
}

} // namespace

RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }

    static const std::set<std::string> known{
        "netlist", "field",   "window", "dt",         "dt_field",   "dt_circuit", "wr_tol",
        "k_max",   "windows", "probe",  "out",        "seed",       "newton_tol", "newton_max",
        "blowup_factor"};
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) throw ParseError("config: unknown key '" + key + "'");
    }

    RunConfig cfg;
    try {
        if (j.contains("netlist")) cfg.netlist_path = j.at("netlist").get<std::string>();
        if (j.contains("window")) {
            auto w = j.at("window");
            if (!w.is_array() || w.size() != 2) throw ParseError("config: 'window' must be [t0, t1]");
            cfg.t_start = w[0].get<double>();
            cfg.t_end = w[1].get<double>();
        }
        if (j.contains("dt")) {
            cfg.dt_field = cfg.dt_circuit = j.at("dt").get<double>();
        }
        if (j.contains("dt_field")) cfg.dt_field = j.at("dt_field").get<double>();
        if (j.contains("dt_circuit")) cfg.dt_circuit = j.at("dt_circuit").get<double>();
        if (j.contains("wr_tol")) cfg.wr_tol = j.at("wr_tol").get<double>();
        if (j.contains("k_max")) cfg.k_max = j.at("k_max").get<int>();
        if (j.contains("blowup_factor")) cfg.blowup_factor = j.at("blowup_factor").get<double>();
        if (j.contains("windows")) cfg.windows = j.at("windows").get<int>();
        if (j.contains("newton_tol")) cfg.newton_tol = j.at("newton_tol").get<double>();
        if (j.contains("newton_max")) cfg.newton_max = j.at("newton_max").get<int>();
        if (j.contains("probe")) cfg.probe = j.at("probe").get<std::string>();
        if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("field")) cfg.field = parse_field_config(j.at("field"));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }

    if (!base_dir.empty() && !cfg.netlist_path.empty()) {
        std::filesystem::path p(cfg.netlist_path);
        if (p.is_relative()) cfg.netlist_path = (std::filesystem::path(base_dir) / p).string();
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_run_config(text.str(), std::filesystem::path(path).parent_path().string());
}

namespace {

FieldModel build_field_config(const FieldConfig& fc, const std::string& netlist_dir) {
    if (fc.from_files()) {
        std::filesystem::path p(fc.path_prefix);
        if (p.is_relative() && !netlist_dir.empty()) {
            p = std::filesystem::path(netlist_dir) / p;
        }
        return load_matrix_model(p.string());
    }
    if (fc.builtin != "transformer-lite") {
        throw ModelError("unknown builtin field model '" + fc.builtin + "'");
    }
    return transformer_lite(fc.transformer);
}

} // namespace

FieldModel resolve_field_model(const Netlist& netlist, const RunConfig& cfg) {
    auto ports = netlist.field_ports();
    if (ports.empty()) return FieldModel{};

    const std::string netlist_dir =
        std::filesystem::path(cfg.netlist_path).parent_path().string();

    FieldModel base;
    if (cfg.field) {
        base = build_field_config(*cfg.field, netlist_dir);
    } else {
        const std::string& model_id = ports.front()->ref;
        for (const auto* p : ports) {
            if (p->ref != model_id) {
                throw ModelError("all field ports must reference the same field model (got '" +
                                 model_id + "' and '" + p->ref + "')");
            }
        }
        const std::string& ref = netlist.field_refs.at(model_id);
        FieldConfig fc;
        if (ref == "transformer-lite") {
            fc.builtin = ref;
        } else {
            fc.path_prefix = ref;
        }
        base = build_field_config(fc, netlist_dir);
    }

    std::vector<int> coils;
    coils.reserve(ports.size());
    for (const auto* p : ports) coils.push_back(p->coil);
    for (const auto* p : ports) {
        if (p->node_pos == p->node_neg) {
            throw ModelError("field port '" + p->name + "' shorts its own terminals");
        }
    }
    return base.with_coil_selection(coils);
}

} // namespace fieldcirc
