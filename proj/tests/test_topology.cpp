#include <doctest.h>

#include <nlohmann/json.hpp>

#include "fieldcirc/errors.hpp"
#include "fieldcirc/topology.hpp"
#include "support/random_circuits.hpp"

using namespace fieldcirc;

namespace {

Netlist circuit_a() {
    return parse_netlist(std::string(R"(
V1 0 n3 vs
I1 n3 n4 is
L1 n4 n2 5.0
R1 n2 0 1.0
C1 n3 n2 1.0
M1 0 n2 EM
.source vs 0 (1,1,0) (1,20,0)
.source is 0 (1,2,0) (5,20,0)
.field EM transformer-lite
)"));
}

Netlist circuit_b() {
    return parse_netlist(std::string(R"(
V1 0 n3 vs
I1 n3 n4 is
L1 n4 n2 5.0
R1 n2 0 1.0
C1 n3 n2 1.0
M1 0 n4 EM
.source vs 0 (1,1,0) (1,20,0)
.source is 0 (1,2,0) (5,20,0)
.field EM transformer-lite
)"));
}

} // namespace

TEST_CASE("topology: CVR path of the convergent benchmark is the resistor branch") {
    auto path = find_cvr_path(circuit_a(), "M1");
    REQUIRE(path.has_value());
    CHECK(*path == std::vector<std::string>{"0", "n2"});
}

TEST_CASE("topology: divergent benchmark has no CVR path") {
    CHECK(!find_cvr_path(circuit_b(), "M1").has_value());
}

TEST_CASE("topology: port with coinciding terminals is trivially connected") {
    Netlist n = parse_netlist(std::string(R"(
R1 1 0 1.0
M1 0 0 EM
.field EM transformer-lite
)"));
    auto path = find_cvr_path(n, "M1");
    REQUIRE(path.has_value());
    CHECK(path->empty());
}

TEST_CASE("topology: unknown port name throws") {
    CHECK_THROWS_AS(find_cvr_path(circuit_a(), "R1"), ParseError);
    CHECK_THROWS_AS(find_cvr_path(circuit_a(), "nosuch"), ParseError);
}

TEST_CASE("topology: algebraic criterion on the benchmarks") {
    CHECK(algebraic_criterion(build_incidence(circuit_a())));
    CHECK(!algebraic_criterion(build_incidence(circuit_b())));
    SUBCASE("no field ports is vacuously true") {
        Netlist n = parse_netlist(std::string("R1 1 0 1.0\n"));
        CHECK(algebraic_criterion(build_incidence(n)));
    }
}

TEST_CASE("topology: assumption 2c checks") {
    SUBCASE("benchmark satisfies both") {
        Assumption2c r = check_assumption2c(build_incidence(circuit_a()));
        CHECK(r.av_full_column_rank);
        CHECK(r.acvrl_full_row_rank);
    }
    SUBCASE("parallel voltage sources lose A_V column rank") {
        Netlist n = parse_netlist(std::string(R"(
V1 1 0 vs
V2 1 0 vs
.source vs 0 (1,1,0)
)"));
        Assumption2c r = check_assumption2c(build_incidence(n));
        CHECK(!r.av_full_column_rank);
    }
    SUBCASE("current source cutset loses row rank") {
        Netlist n = parse_netlist(std::string(R"(
R1 1 0 1.0
I1 1 2 is
.source is 0 (1,1,0)
)"));
        Assumption2c r = check_assumption2c(build_incidence(n));
        CHECK(!r.acvrl_full_row_rank);
    }
}

TEST_CASE("topology: analyze aggregates the predictions") {
    TopologyReport a = analyze(circuit_a());
    CHECK(a.prediction == Prediction::GuaranteedConvergent);
    CHECK(a.algebraic_criterion_ok);
    CHECK(a.criteria_agree);
    REQUIRE(a.ports.size() == 1);
    CHECK(a.ports[0].cvr_path.has_value());

    TopologyReport b = analyze(circuit_b());
    CHECK(b.prediction == Prediction::NotGuaranteed);
    CHECK(!b.algebraic_criterion_ok);
    CHECK(b.criteria_agree);

    SUBCASE("no ports is guaranteed vacuously") {
        Netlist n = parse_netlist(std::string("R1 1 0 1.0\n"));
        CHECK(analyze(n).prediction == Prediction::GuaranteedConvergent);
    }
    SUBCASE("report serializes to json with the expected keys") {
        nlohmann::json j = a.to_json();
        CHECK(j.contains("ports"));
        CHECK(j.contains("cvr_paths"));
        CHECK(j.contains("prediction"));
        CHECK(j.contains("assumption2c"));
        CHECK(j.contains("algebraic_criterion"));
        CHECK(j["prediction"] == "GuaranteedConvergent");
        CHECK(analyze(circuit_b()).to_json()["prediction"] == "NotGuaranteed");
    }
}

TEST_CASE("topology: graph and algebraic criteria agree on random circuits") {
    int ports_seen = 0;
    for (std::uint64_t seed = 1; seed <= 150; ++seed) {
        Netlist n = parse_netlist(testsupport::random_netlist_text(seed));
        IncidenceSet inc = build_incidence(n);
        bool all_paths = true;
        for (const Element* p : n.field_ports()) {
            auto path = find_cvr_path(n, p->name);
            all_paths = all_paths && path.has_value();
            if (path) {
                // a CVR path never uses L, I or field-port branches: check by
                // validating each hop is joined by a C/V/R branch
                for (size_t i = 0; i + 1 < path->size(); ++i) {
                    bool hop_ok = false;
                    for (const auto& e : n.elements) {
                        bool is_cvr = e.kind == ElementKind::Capacitor ||
                                      e.kind == ElementKind::VoltageSource ||
                                      e.kind == ElementKind::Resistor;
                        bool joins = (e.node_pos == (*path)[i] && e.node_neg == (*path)[i + 1]) ||
                                     (e.node_neg == (*path)[i] && e.node_pos == (*path)[i + 1]);
                        if (is_cvr && joins) {
                            hop_ok = true;
                            break;
                        }
                    }
                    CHECK(hop_ok);
                }
            }
            ++ports_seen;
        }
        CHECK(all_paths == algebraic_criterion(inc));
    }
    CHECK(ports_seen >= 100);
}

TEST_CASE("topology: analyze is deterministic") {
    TopologyReport r1 = analyze(circuit_a());
    TopologyReport r2 = analyze(circuit_a());
    CHECK(r1.to_json() == r2.to_json());
    CHECK(r1.to_text() == r2.to_text());
}
