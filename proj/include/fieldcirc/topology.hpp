#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fieldcirc/netlist.hpp"

namespace fieldcirc {

/// A CVR path connects a field port's terminals through capacitor, voltage
/// source and resistor branches only. Ports with such a path are the ones
/// the convergence guarantee covers.
struct PortPathInfo {
    std::string port;
    std::optional<std::vector<std::string>> cvr_path; // node sequence, empty when terminals coincide
};

struct Assumption2c {
    bool av_full_column_rank = false;  // no loops of voltage sources
    bool acvrl_full_row_rank = false;  // no cutsets of current sources / field ports
    bool ok() const { return av_full_column_rank && acvrl_full_row_rank; }
};

enum class Prediction { GuaranteedConvergent, NotGuaranteed };

struct TopologyReport {
    std::vector<PortPathInfo> ports;
    Assumption2c assumption2c;
    Prediction prediction = Prediction::GuaranteedConvergent;
    bool algebraic_criterion_ok = true;
    bool criteria_agree = true; // graph criterion vs rank criterion

    std::string to_text() const;
    nlohmann::json to_json() const;
};

/// Shortest (in branch count) undirected path between the port's terminals
/// using only C, V, R branches; nullopt when no such path exists, an empty
/// sequence when the terminals coincide.
std::optional<std::vector<std::string>> find_cvr_path(const Netlist& n, const std::string& port);

/// True iff every column of A_m lies in the column span of (A_C A_V A_R),
/// decided by comparing SVD ranks at relative tolerance 1e-10.
bool algebraic_criterion(const IncidenceSet& inc);

Assumption2c check_assumption2c(const IncidenceSet& inc);

TopologyReport analyze(const Netlist& n);

} // namespace fieldcirc
