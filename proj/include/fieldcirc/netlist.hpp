#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fieldcirc {

enum class ElementKind { Resistor, Capacitor, Inductor, VoltageSource, CurrentSource, FieldPort };

const char* kind_name(ElementKind k);

/// Sum of sinusoids plus a constant offset:
///   s(t) = offset + sum_i amplitude_i * sin(omega_i * t + phase_i)
struct SineTerm {
    double amplitude = 0.0; // A or V
    double omega = 0.0;     // rad/s
    double phase = 0.0;     // rad
};

struct SourceSpec {
    double offset = 0.0;
    std::vector<SineTerm> terms;

    double eval(double t) const;
    /// d/dt of the signal (used by consistency diagnostics).
    double eval_dot(double t) const;
};

/// One netlist branch. The first listed node is the + (from) node.
/// `value` holds the conductance (S), capacitance (F) or inductance (H);
/// sources carry the id of a SourceSpec in `ref`, field ports the id of a
/// `.field` declaration plus the coupled coil index.
struct Element {
    std::string name;
    ElementKind kind = ElementKind::Resistor;
    std::string node_pos;
    std::string node_neg;
    double value = 0.0;
    std::string ref;
    int coil = 0;
};

/// Parsed circuit. Node "0" is always ground and is kept out of `nodes`;
/// non-ground nodes are ordered by first appearance in the element list.
struct Netlist {
    std::vector<std::string> nodes;
    std::vector<Element> elements;
    std::map<std::string, SourceSpec> sources;
    std::map<std::string, std::string> field_refs; // field id -> path or builtin name

    /// Index into `nodes`; -1 for ground ("0"). Throws on unknown names.
    int node_index(const std::string& name) const;
    const Element* find_element(const std::string& name) const;
    std::vector<const Element*> field_ports() const;
};

/// Reduced node-branch incidence matrices, one per element kind. Rows follow
/// `nodes` (ground excluded); columns follow the element order within each
/// kind. Entries: +1 at the from-node row, -1 at the to-node row, rows of
/// ground omitted.
struct IncidenceSet {
    std::vector<std::string> nodes;
    Eigen::MatrixXi A_C, A_R, A_L, A_V, A_I, A_m;
    std::vector<std::string> names_C, names_R, names_L, names_V, names_I, names_m;

    int n_nodes() const { return static_cast<int>(nodes.size()); }
    /// (A_C A_R A_L A_V A_I A_m), the reduced incidence matrix of the graph.
    Eigen::MatrixXi stacked() const;
};

/// Line-oriented grammar:
///   <NAME> <node+> <node-> <value|source-id|field-ref>
/// with the element kind selected by the first character of NAME
/// (R, C, L, V, I, M = field port; case-insensitive), plus the directives
///   .source <id> <offset> (<amp>,<omega>,<phase>)...
///   .field <id> <path-or-builtin>
/// and '#' comments. Field refs may select a coil as <id>:<index>.
Netlist parse_netlist(std::istream& in);
Netlist parse_netlist(const std::string& text);
Netlist load_netlist(const std::string& path);

/// Emits the grammar above; parse(serialize(n)) reproduces the netlist data.
std::string serialize_netlist(const Netlist& n);

IncidenceSet build_incidence(const Netlist& n);

} // namespace fieldcirc
