#include "fieldcirc/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fieldcirc/errors.hpp"

namespace fieldcirc {

const char* kind_name(ElementKind k) {
    switch (k) {
        case ElementKind::Resistor: return "resistor";
        case ElementKind::Capacitor: return "capacitor";
        case ElementKind::Inductor: return "inductor";
        case ElementKind::VoltageSource: return "voltage source";
        case ElementKind::CurrentSource: return "current source";
        case ElementKind::FieldPort: return "field port";
    }
    return "?";
}

double SourceSpec::eval(double t) const {
    double s = offset;
    for (const auto& term : terms) {
        s += term.amplitude * std::sin(term.omega * t + term.phase);
    }
    return s;
}

double SourceSpec::eval_dot(double t) const {
    double s = 0.0;
    for (const auto& term : terms) {
        s += term.amplitude * term.omega * std::cos(term.omega * t + term.phase);
    }
    return s;
}

int Netlist::node_index(const std::string& name) const {
    if (name == "0") return -1;
    auto it = std::find(nodes.begin(), nodes.end(), name);
    if (it == nodes.end()) throw ParseError("unknown node: " + name);
    return static_cast<int>(it - nodes.begin());
}

const Element* Netlist::find_element(const std::string& name) const {
    for (const auto& e : elements) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

std::vector<const Element*> Netlist::field_ports() const {
    std::vector<const Element*> ports;
    for (const auto& e : elements) {
        if (e.kind == ElementKind::FieldPort) ports.push_back(&e);
    }
    return ports;
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream ss(line);
    std::string t;
    while (ss >> t) toks.push_back(t);
    return toks;
}

double parse_number(const std::string& tok, int line) {
    size_t pos = 0;
    double v;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw ParseError("expected a number, got '" + tok + "'", line);
    }
    if (pos != tok.size() || !std::isfinite(v)) {
        throw ParseError("expected a number, got '" + tok + "'", line);
    }
    return v;
}

ElementKind kind_from_name(const std::string& name, int line) {
    switch (std::toupper(static_cast<unsigned char>(name[0]))) {
        case 'R': return ElementKind::Resistor;
        case 'C': return ElementKind::Capacitor;
        case 'L': return ElementKind::Inductor;
        case 'V': return ElementKind::VoltageSource;
        case 'I': return ElementKind::CurrentSource;
        case 'M': return ElementKind::FieldPort;
        default:
            throw ParseError("element name '" + name +
                                 "' must start with one of R, C, L, V, I, M",
                             line);
    }
}

// ".source <id> <offset> (a,w,p) (a,w,p) ..."
SourceSpec parse_source_terms(const std::vector<std::string>& toks, int line) {
    if (toks.size() < 3) throw ParseError(".source needs <id> <offset> [(amp,omega,phase)...]", line);
    SourceSpec spec;
    spec.offset = parse_number(toks[2], line);
    // Re-join the remainder so "(1, 2, 0)" style spacing also parses.
    std::string rest;
    for (size_t i = 3; i < toks.size(); ++i) rest += toks[i];
    size_t p = 0;
    while (p < rest.size()) {
        if (rest[p] != '(') throw ParseError("malformed sinusoid term in .source", line);
        size_t close = rest.find(')', p);
        if (close == std::string::npos) throw ParseError("unclosed '(' in .source", line);
        std::string body = rest.substr(p + 1, close - p - 1);
        std::replace(body.begin(), body.end(), ',', ' ');
        auto nums = tokenize(body);
        if (nums.size() != 3) throw ParseError("sinusoid term needs (amp,omega,phase)", line);
        SineTerm term;
        term.amplitude = parse_number(nums[0], line);
        term.omega = parse_number(nums[1], line);
        term.phase = parse_number(nums[2], line);
        spec.terms.push_back(term);
        p = close + 1;
    }
    return spec;
}

void check_connected(const Netlist& n) {
    // Union of all branches, ground included, element kinds ignored.
    const int ground = static_cast<int>(n.nodes.size());
    std::vector<std::vector<int>> adj(n.nodes.size() + 1);
    auto idx = [&](const std::string& name) {
        return name == "0" ? ground : n.node_index(name);
    };
    for (const auto& e : n.elements) {
        int a = idx(e.node_pos), b = idx(e.node_neg);
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<char> seen(adj.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : adj[v]) {
            if (!seen[w]) {
                seen[w] = 1;
                stack.push_back(w);
            }
        }
    }
    for (size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) {
            std::string name = i == static_cast<size_t>(ground) ? "0" : n.nodes[i];
            throw ParseError("circuit graph is not connected (node '" + name + "' is unreachable)");
        }
    }
}

} // namespace

Netlist parse_netlist(std::istream& in) {
    Netlist n;
    std::set<std::string> names;
    std::set<std::string> node_set;
    bool has_ground = false;

    auto touch_node = [&](const std::string& name) {
        if (name == "0") {
            has_ground = true;
            return;
        }
        if (node_set.insert(name).second) n.nodes.push_back(name);
    };

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto toks = tokenize(line);
        if (toks.empty()) continue;

        if (toks[0] == ".source") {
            auto spec = parse_source_terms(toks, lineno);
            if (!n.sources.emplace(toks[1], spec).second) {
                throw ParseError("duplicate source id '" + toks[1] + "'", lineno);
            }
            continue;
        }
        if (toks[0] == ".field") {
            if (toks.size() != 3) throw ParseError(".field needs <id> <path-or-builtin>", lineno);
            if (!n.field_refs.emplace(toks[1], toks[2]).second) {
                throw ParseError("duplicate field id '" + toks[1] + "'", lineno);
            }
            continue;
        }
        if (toks[0][0] == '.') throw ParseError("unknown directive '" + toks[0] + "'", lineno);

        if (toks.size() != 4) {
            throw ParseError("expected '<NAME> <node+> <node-> <value|source-id|field-ref>'", lineno);
        }
        Element e;
        e.name = toks[0];
        e.kind = kind_from_name(e.name, lineno);
        e.node_pos = toks[1];
        e.node_neg = toks[2];
        if (!names.insert(e.name).second) {
            throw ParseError("duplicate element name '" + e.name + "'", lineno);
        }

        switch (e.kind) {
            case ElementKind::Resistor:
            case ElementKind::Capacitor:
            case ElementKind::Inductor:
                e.value = parse_number(toks[3], lineno);
                if (!(e.value > 0.0)) {
                    throw ParseError("non-positive value for " + std::string(kind_name(e.kind)) +
                                         " '" + e.name + "'",
                                     lineno);
                }
                break;
            case ElementKind::VoltageSource:
            case ElementKind::CurrentSource:
                e.ref = toks[3];
                break;
            case ElementKind::FieldPort: {
                std::string ref = toks[3];
                if (auto colon = ref.rfind(':'); colon != std::string::npos) {
                    e.coil = static_cast<int>(parse_number(ref.substr(colon + 1), lineno));
                    if (e.coil < 0) throw ParseError("negative coil index", lineno);
                    ref.erase(colon);
                }
                e.ref = ref;
                break;
            }
        }
        touch_node(e.node_pos);
        touch_node(e.node_neg);
        n.elements.push_back(std::move(e));
    }

    if (n.elements.empty()) throw ParseError("empty netlist");
    if (!has_ground) throw ParseError("no ground node ('0') referenced");

    for (const auto& e : n.elements) {
        if ((e.kind == ElementKind::VoltageSource || e.kind == ElementKind::CurrentSource) &&
            n.sources.find(e.ref) == n.sources.end()) {
            throw ParseError("element '" + e.name + "' references undeclared source '" + e.ref + "'");
        }
        if (e.kind == ElementKind::FieldPort && n.field_refs.find(e.ref) == n.field_refs.end()) {
            throw ParseError("element '" + e.name + "' references undeclared field model '" + e.ref + "'");
        }
    }
    check_connected(n);
    return n;
}

Netlist parse_netlist(const std::string& text) {
    std::istringstream in(text);
    return parse_netlist(in);
}

Netlist load_netlist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open netlist file: " + path);
    return parse_netlist(in);
}

std::string serialize_netlist(const Netlist& n) {
    std::ostringstream out;
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (const auto& e : n.elements) {
        out << e.name << " " << e.node_pos << " " << e.node_neg << " ";
        switch (e.kind) {
            case ElementKind::Resistor:
            case ElementKind::Capacitor:
            case ElementKind::Inductor:
                out << num(e.value);
                break;
            case ElementKind::VoltageSource:
            case ElementKind::CurrentSource:
                out << e.ref;
                break;
            case ElementKind::FieldPort:
                out << e.ref;
                if (e.coil != 0) out << ":" << e.coil;
                break;
        }
        out << "\n";
    }
    for (const auto& [id, spec] : n.sources) {
        out << ".source " << id << " " << num(spec.offset);
        for (const auto& t : spec.terms) {
            out << " (" << num(t.amplitude) << "," << num(t.omega) << "," << num(t.phase) << ")";
        }
        out << "\n";
    }
    for (const auto& [id, ref] : n.field_refs) {
        out << ".field " << id << " " << ref << "\n";
    }
    return out.str();
}

namespace {

Eigen::MatrixXi incidence_for(const Netlist& n, ElementKind kind, std::vector<std::string>& names) {
    std::vector<const Element*> branch;
    for (const auto& e : n.elements) {
        if (e.kind == kind) branch.push_back(&e);
    }
    Eigen::MatrixXi a = Eigen::MatrixXi::Zero(static_cast<int>(n.nodes.size()),
                                              static_cast<int>(branch.size()));
    names.clear();
    for (size_t c = 0; c < branch.size(); ++c) {
        names.push_back(branch[c]->name);
        int ip = n.node_index(branch[c]->node_pos);
        int in = n.node_index(branch[c]->node_neg);
        if (ip >= 0) a(ip, static_cast<int>(c)) += 1;
        if (in >= 0) a(in, static_cast<int>(c)) -= 1;
    }
    return a;
}

} // namespace

IncidenceSet build_incidence(const Netlist& n) {
    IncidenceSet inc;
    inc.nodes = n.nodes;
    inc.A_C = incidence_for(n, ElementKind::Capacitor, inc.names_C);
    inc.A_R = incidence_for(n, ElementKind::Resistor, inc.names_R);
    inc.A_L = incidence_for(n, ElementKind::Inductor, inc.names_L);
    inc.A_V = incidence_for(n, ElementKind::VoltageSource, inc.names_V);
    inc.A_I = incidence_for(n, ElementKind::CurrentSource, inc.names_I);
    inc.A_m = incidence_for(n, ElementKind::FieldPort, inc.names_m);
    return inc;
}

Eigen::MatrixXi IncidenceSet::stacked() const {
    const int rows = n_nodes();
    Eigen::MatrixXi s(rows, A_C.cols() + A_R.cols() + A_L.cols() + A_V.cols() + A_I.cols() +
                                A_m.cols());
    int off = 0;
    for (const auto* a : {&A_C, &A_R, &A_L, &A_V, &A_I, &A_m}) {
        s.middleCols(off, a->cols()) = *a;
        off += static_cast<int>(a->cols());
    }
    return s;
}

} // namespace fieldcirc
