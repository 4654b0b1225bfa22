#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fieldcirc/cli.hpp"
#include "fieldcirc/errors.hpp"

using namespace fieldcirc;

namespace {

std::string temp_dir() {
    auto dir = std::filesystem::temp_directory_path() / "fieldcirc_cli_test";
    std::filesystem::create_directories(dir);
    return dir.string();
}

std::string write_file(const std::string& name, const std::string& content) {
    std::string path = temp_dir() + "/" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

const char* kCircuitAText = R"(
V1 0 n3 vs
I1 n3 n4 is
L1 n4 n2 5.0
R1 n2 0 1.0
C1 n3 n2 1.0
M1 0 n2 EM
.source vs 0 (1,1,0) (1,20,0)
.source is 0 (1,2,0) (5,20,0)
.field EM transformer-lite
)";

} // namespace

TEST_CASE("config: defaults encode the benchmark settings") {
    std::string path = write_file("a.cir", kCircuitAText);
    RunConfig cfg = parse_run_config("{\"netlist\": \"" + path + "\"}");
    CHECK(cfg.t_start == 0.0);
    CHECK(cfg.t_end == 0.8);
    CHECK(cfg.dt_field == 1e-2);
    CHECK(cfg.dt_circuit == 1e-2);
    CHECK(cfg.wr_tol == 1e-6);
    CHECK(cfg.k_max == 20);
    CHECK(cfg.probe == "n3");
}

TEST_CASE("config: parsing and validation") {
    CHECK_THROWS_AS(parse_run_config("{"), ParseError);
    CHECK_THROWS_AS(parse_run_config("{}"), ParseError); // missing netlist
    CHECK_THROWS_AS(parse_run_config("{\"netlist\": \"x\", \"bogus\": 1}"), ParseError);
    CHECK_THROWS_AS(parse_run_config("{\"netlist\": \"x\", \"window\": [1.0, 0.0]}"), ParseError);
    CHECK_THROWS_AS(parse_run_config("{\"netlist\": \"x\", \"dt\": -1.0}"), ParseError);
    RunConfig cfg = parse_run_config(
        R"({"netlist": "x", "window": [0.1, 0.5], "dt": 0.02, "dt_circuit": 0.01,
            "field": {"builtin": "transformer-lite", "nx": 17, "turns": 50.0},
            "probe": "n2", "seed": 7})");
    CHECK(cfg.t_start == 0.1);
    CHECK(cfg.dt_field == 0.02);
    CHECK(cfg.dt_circuit == 0.01);
    REQUIRE(cfg.field.has_value());
    CHECK(cfg.field->transformer.nx == 17);
    CHECK(cfg.field->transformer.turns == 50.0);
    CHECK(cfg.probe == "n2");
}

TEST_CASE("csv: write/read round trip is exact at 12 significant digits") {
    TraceTable table;
    table.labels = {"mon", "1"};
    table.t.resize(3);
    table.t << 0.0, 0.01, 0.02;
    table.values.resize(3, 2);
    table.values << 0.0, 1.0 / 3.0, -2.5e-7, 123456.789,
        3.14159265358979, -0.000123456789012345;

    std::string path = write_file("trace.csv", format_trace_csv(table));
    TraceTable back = read_trace_csv(path);
    CHECK(back.labels == table.labels);
    // the emitted text is the contract: re-emitting reparsed data is identical
    CHECK(format_trace_csv(back) == format_trace_csv(table));
    TraceTable back2 = read_trace_csv(write_file("trace2.csv", format_trace_csv(back)));
    CHECK(back2.t == back.t);
    CHECK(back2.values == back.values);
}

TEST_CASE("csv: header and value errors") {
    CHECK_THROWS_AS(read_trace_csv(write_file("bad1.csv", "x,mon\n0,1\n")), ParseError);
    CHECK_THROWS_AS(read_trace_csv(write_file("bad2.csv", "t,mon\n0,abc\n")), ParseError);
    CHECK_THROWS_AS(read_trace_csv(write_file("bad3.csv", "t,mon\n0,1,2\n")), ParseError);
    CHECK_THROWS_AS(read_trace_csv(temp_dir() + "/missing.csv"), ParseError);
}

TEST_CASE("cli: analyze exit codes") {
    std::ostringstream out, err;
    std::string a = write_file("a.cir", kCircuitAText);
    CHECK(cmd_analyze(a, false, out, err) == kExitOk);
    CHECK(out.str().find("GuaranteedConvergent") != std::string::npos);

    std::string b = write_file("b.cir", R"(
V1 0 n3 vs
I1 n3 n4 is
L1 n4 n2 5.0
R1 n2 0 1.0
C1 n3 n2 1.0
M1 0 n4 EM
.source vs 0 (1,1,0) (1,20,0)
.source is 0 (1,2,0) (5,20,0)
.field EM transformer-lite
)");
    CHECK(cmd_analyze(b, true, out, err) == kExitNotGuaranteed);

    std::string bad = write_file("bad.cir", "R1 1 0 -1.0\n");
    CHECK(cmd_analyze(bad, false, out, err) == kExitError);
    CHECK(err.str().find("error") != std::string::npos);
    CHECK(cmd_analyze(temp_dir() + "/missing.cir", false, out, err) == kExitError);
}

TEST_CASE("cli: simulate a plain circuit monolithically") {
    std::string netlist = write_file("plain.cir", R"(
V1 0 n3 vs
L1 n3 n2 5.0
R1 n2 0 1.0
C1 n3 n2 1.0
.source vs 0 (1,1,0)
)");
    std::string out_csv = temp_dir() + "/plain.csv";
    RunConfig cfg = parse_run_config("{\"netlist\": \"" + netlist + "\", \"probe\": \"n2\", " +
                                     "\"window\": [0.0, 0.2], \"out\": \"" + out_csv + "\"}");
    std::ostringstream out, err;
    CHECK(cmd_simulate(cfg, SimulateMode::Monolithic, out, err) == kExitOk);
    TraceTable table = read_trace_csv(out_csv);
    CHECK(table.labels == std::vector<std::string>{"mon"});
    CHECK(table.t.size() == 21);
}

TEST_CASE("cli: divergent run truncates the CSV and exits with code 2") {
    std::string netlist = write_file("div.cir", R"(
V1 0 n3 vs
I1 n3 n4 is
L1 n4 n2 5.0
R1 n2 0 1.0
C1 n3 n2 1.0
M1 0 n4 EM
.source vs 0 (1,1,0) (1,20,0)
.source is 0 (1,2,0) (5,20,0)
.field EM transformer-lite
)");
    std::string out_csv = temp_dir() + "/div.csv";
    RunConfig cfg = parse_run_config(std::string("{") + "\"netlist\": \"" + netlist + "\", " +
                                     R"("probe": "n4", "k_max": 12, "blowup_factor": 100.0,
                                        "field": {"nx": 17}, "out": ")" +
                                     out_csv + "\"}");
    std::ostringstream out, err;
    int code = cmd_simulate(cfg, SimulateMode::Wr, out, err);
    CHECK(code == kExitNotGuaranteed);
    CHECK(out.str().find("Diverged") != std::string::npos);

    TraceTable table = read_trace_csv(out_csv);
    REQUIRE(table.labels.size() >= 2);
    CHECK(static_cast<int>(table.labels.size()) < 12); // truncated before k_max
    // the sweep-2 column dominates sweep 1 in sup norm
    double s1 = table.values.col(0).cwiseAbs().maxCoeff();
    double s2 = table.values.col(1).cwiseAbs().maxCoeff();
    CHECK(s2 > s1);
    for (int c = 0; c < table.values.cols(); ++c) CHECK(table.values.col(c).allFinite());
}

TEST_CASE("cli: identical configs give bit-identical CSV bytes") {
    std::string netlist = write_file("a.cir", kCircuitAText);
    RunConfig cfg = parse_run_config(std::string("{") + "\"netlist\": \"" + netlist + "\", " +
                                     R"("window": [0.0, 0.2], "field": {"nx": 17}})");
    SimulationOutput s1 = run_simulation(cfg, SimulateMode::Both);
    SimulationOutput s2 = run_simulation(cfg, SimulateMode::Both);
    CHECK(format_trace_csv(s1.table) == format_trace_csv(s2.table));
    CHECK(!s1.table.labels.empty());
    CHECK(s1.table.labels.front() == "mon");
}

TEST_CASE("cli: validate subcommand") {
    std::ostringstream out, err;
    ValidationOptions vopts;
    vopts.pencil_samples = 5;
    vopts.monotonicity_pairs = 10;
    CHECK(cmd_validate("transformer-lite", vopts, out, err) == kExitOk);
    CHECK(out.str().find("pass") != std::string::npos);
    CHECK(cmd_validate(temp_dir() + "/missing_model", vopts, out, err) == kExitError);
}

TEST_CASE("cli: validate reports defects of hand-crafted model files") {
    // asymmetric M -> item (a) fails; duplicated X columns -> item (c) fails
    auto write_mtx = [&](const std::string& name, const std::string& body) {
        return write_file(name, "%%MatrixMarket matrix coordinate real general\n" + body);
    };
    std::string prefix_a = temp_dir() + "/asym";
    write_mtx("asym_M.mtx", "2 2 1\n1 2 1.0\n");
    write_mtx("asym_K.mtx", "2 2 2\n1 1 2.0\n2 2 2.0\n");
    write_mtx("asym_X.mtx", "2 1 1\n1 1 1.0\n");
    std::ostringstream out, err;
    ValidationOptions vopts;
    vopts.pencil_samples = 3;
    vopts.monotonicity_pairs = 3;
    CHECK(cmd_validate(prefix_a, vopts, out, err) == kExitNotGuaranteed);
    CHECK(out.str().find("(a) M symmetric:            FAIL") != std::string::npos);

    std::string prefix_x = temp_dir() + "/xdef";
    write_mtx("xdef_M.mtx", "2 2 0\n");
    write_mtx("xdef_K.mtx", "2 2 2\n1 1 2.0\n2 2 2.0\n");
    write_mtx("xdef_X.mtx", "2 2 4\n1 1 1.0\n2 1 2.0\n1 2 1.0\n2 2 2.0\n");
    out.str("");
    CHECK(cmd_validate(prefix_x, vopts, out, err) == kExitNotGuaranteed);
    CHECK(out.str().find("(c) X full column rank:     FAIL") != std::string::npos);
}

TEST_CASE("cli: wr that hits the sweep cap exits with code 2") {
    std::string netlist = write_file("acap.cir", kCircuitAText);
    std::string out_csv = temp_dir() + "/acap.csv";
    RunConfig cfg = parse_run_config(std::string("{") + "\"netlist\": \"" + netlist + "\", " +
                                     R"("window": [0.0, 0.2], "k_max": 1, "wr_tol": 1e-14,
                                        "field": {"nx": 17}, "out": ")" +
                                     out_csv + "\"}");
    std::ostringstream out, err;
    CHECK(cmd_simulate(cfg, SimulateMode::Wr, out, err) == kExitNotGuaranteed);
    CHECK(out.str().find("MaxIterations") != std::string::npos);
}
