// Acceptance suite: runs each shipped-benchmark criterion end to end and
// prints one pass/fail line per criterion. Exits nonzero when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fieldcirc/cli.hpp"
#include "fieldcirc/monolithic.hpp"
#include "fieldcirc/topology.hpp"
#include "fieldcirc/wr.hpp"
#include "../support/random_circuits.hpp"

using namespace fieldcirc;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string benchmarks_dir() { return BENCHMARKS_DIR; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct BenchmarkSetup {
    Netlist netlist;
    MnaSystem circuit;
    FieldModel field;
    WrOptions wr;
    Eigen::VectorXd x0, a0;
};

BenchmarkSetup load_benchmark(const std::string& file) {
    Netlist netlist = load_netlist(benchmarks_dir() + "/" + file);
    MnaSystem circuit = MnaSystem::from_netlist(netlist);
    BenchmarkSetup s{std::move(netlist), std::move(circuit), transformer_lite(), WrOptions{}, {},
                     {}};
    s.wr.t_start = 0.0;
    s.wr.t_end = 0.8;
    s.wr.field.dt = 1e-2;
    s.wr.circuit.dt = 1e-2;
    s.wr.wr_tol = 1e-6;
    s.wr.k_max = 20;
    s.x0 = s.circuit.zero_state();
    s.a0 = Eigen::VectorXd::Zero(s.field.n_dofs());
    return s;
}

double probe_sup_rel_diff(const Waveform& wr_x, const Waveform& mono_x, int node) {
    double sup = 0.0, scale = 0.0;
    const Eigen::VectorXd& t = mono_x.grid();
    for (int s = 0; s < t.size(); ++s) {
        double w = wr_x.eval(t(s))(node);
        double m = mono_x.samples()(s, node);
        sup = std::max(sup, std::abs(w - m));
        scale = std::max(scale, std::abs(m));
    }
    return sup / std::max(scale, 1e-30);
}

// --- criterion 1: convergent/divergent dichotomy on the shipped benchmarks ---
Outcome criterion_benchmark_dichotomy() {
    std::ostringstream detail;
    bool ok = true;

    auto t0 = std::chrono::steady_clock::now();
    BenchmarkSetup a = load_benchmark("circuit_a.cir");
    WrResult wr_a = gauss_seidel_wr(a.field, a.circuit, a.x0, a.a0, a.wr);
    Eigen::VectorXd grid = make_grid(0.0, 0.8, 1e-2);
    CoupledTrace mono_a = solve_monolithic(a.field, a.circuit, a.x0, a.a0, grid);
    double ta = seconds_since(t0);

    ok = ok && wr_a.status == WrStatus::Converged && wr_a.iterations <= 20;
    detail << "a: " << wr_status_name(wr_a.status) << " k=" << wr_a.iterations;
    int n3 = a.netlist.node_index("n3");
    int n2 = a.netlist.node_index("n2");
    double d3 = probe_sup_rel_diff(wr_a.final_iterate().x, mono_a.x, n3);
    double d2 = probe_sup_rel_diff(wr_a.final_iterate().x, mono_a.x, n2);
    ok = ok && d3 <= 1e-5 && d2 <= 1e-5;
    detail << " |wr-mon|_rel n3=" << d3 << " n2=" << d2 << " (" << ta << " s)";
    ok = ok && ta <= 60.0;

    auto t1 = std::chrono::steady_clock::now();
    BenchmarkSetup b = load_benchmark("circuit_b.cir");
    WrResult wr_b = gauss_seidel_wr(b.field, b.circuit, b.x0, b.a0, b.wr);
    double tb = seconds_since(t1);
    ok = ok && wr_b.status == WrStatus::Diverged;
    detail << "; b: " << wr_status_name(wr_b.status) << " k=" << wr_b.iterations;
    bool growth = wr_b.deltas.size() >= 5;
    for (size_t k = 2; growth && k <= 4; ++k) {
        double ratio = wr_b.deltas[k] / wr_b.deltas[k - 1]; // delta_{k+1}/delta_k, 0-based
        growth = ratio >= 1.5;
        detail << " r" << k + 1 << "=" << ratio;
    }
    ok = ok && growth && tb <= 60.0;
    detail << " (" << tb << " s)";
    return {ok, detail.str()};
}

// --- criterion 2: topological prediction and criterion equivalence ---
Outcome criterion_soundness() {
    std::ostringstream detail;
    TopologyReport ra = analyze(load_netlist(benchmarks_dir() + "/circuit_a.cir"));
    TopologyReport rb = analyze(load_netlist(benchmarks_dir() + "/circuit_b.cir"));
    bool ok = ra.prediction == Prediction::GuaranteedConvergent &&
              rb.prediction == Prediction::NotGuaranteed;
    detail << "a=" << (ra.prediction == Prediction::GuaranteedConvergent ? "conv" : "??")
           << " b=" << (rb.prediction == Prediction::NotGuaranteed ? "not-guaranteed" : "??");

    int agreements = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 120; ++seed) {
        Netlist n = parse_netlist(testsupport::random_netlist_text(seed));
        bool all_paths = true;
        for (const Element* p : n.field_ports()) {
            all_paths = all_paths && find_cvr_path(n, p->name).has_value();
        }
        bool algebraic = algebraic_criterion(build_incidence(n));
        agreements += (all_paths == algebraic) ? 1 : 0;
        ++total;
    }
    ok = ok && agreements == total && total >= 100;
    detail << "; criteria agree on " << agreements << "/" << total << " random netlists";
    return {ok, detail.str()};
}

// --- criterion 3: assumption validation, seeded and deterministic ---
Outcome criterion_assumptions() {
    TransformerLiteOptions opts;
    opts.brauer = true;
    FieldModel model = transformer_lite(opts);
    ValidationOptions vopts;
    vopts.pencil_samples = 50;
    vopts.monotonicity_pairs = 200;
    vopts.seed = 2024;
    AssumptionReport r1 = validate_assumptions(model, vopts);
    AssumptionReport r2 = validate_assumptions(model, vopts);
    bool ok = r1.all_ok() && r1.to_text() == r2.to_text() &&
              r1.m_asymmetry_rel <= 1e-12 && r1.pencil_failures == 0 && r1.x_full_rank;
    std::ostringstream detail;
    detail << "symmetry " << r1.m_asymmetry_rel << ", chol failures " << r1.pencil_failures
           << ", rank(X) " << r1.x_rank << ", min monotonicity ratio " << r1.monotonicity_min
           << ", deterministic " << (r1.to_text() == r2.to_text() ? "yes" : "NO");
    return {ok, detail.str()};
}

// --- criterion 4: lumped-oracle equivalence for the single-coil model ---
Outcome criterion_lumped_oracle() {
    Eigen::SparseMatrix<double> M(1, 1), K(1, 1);
    K.insert(0, 0) = 2.0;
    Eigen::MatrixXd X(1, 1);
    X << 1.0;
    FieldModel field = FieldModel::from_matrices(M, K, X);
    const double L_eq = field.equivalent_inductance()(0, 0);
    const double G = 1.0;
    MnaSystem circuit = MnaSystem::from_netlist(parse_netlist(
        std::string("R1 n1 0 1.0\nM1 n1 0 EM\n.field EM external\n")));

    const double i0 = 1.0, dt = 1e-2;
    const int steps = 80;
    Eigen::VectorXd a0(1), x0(1);
    a0 << i0 / 2.0; // K a = X i
    x0 << -i0 / G;
    Eigen::VectorXd grid = make_grid(0.0, dt * steps, dt);
    CoupledTrace mono = solve_monolithic(field, circuit, x0, a0, grid);

    double sup = 0.0;
    double irec = i0;
    for (int s = 1; s <= steps; ++s) {
        irec = irec / (1.0 + dt / (L_eq * G));
        sup = std::max(sup, std::abs(mono.i_m.samples()(s, 0) - irec));
    }

    WrOptions wopts;
    wopts.t_start = 0.0;
    wopts.t_end = dt * steps;
    wopts.field.dt = dt;
    wopts.circuit.dt = dt;
    wopts.wr_tol = 1e-6;
    wopts.k_max = 40;
    WrResult wr = gauss_seidel_wr(field, circuit, x0, a0, wopts);
    double wr_dist = 0.0;
    irec = i0;
    for (int s = 1; s <= steps; ++s) {
        irec = irec / (1.0 + dt / (L_eq * G));
        wr_dist = std::max(wr_dist, std::abs(wr.final_iterate().i_m.samples()(s, 0) - irec));
    }
    bool ok = sup <= 1e-10 && wr.status == WrStatus::Converged && wr_dist <= 10.0 * wopts.wr_tol;
    std::ostringstream detail;
    detail << "monolithic vs recursion " << sup << " (<= 1e-10), wr "
           << wr_status_name(wr.status) << " vs recursion " << wr_dist << " (<= "
           << 10.0 * wopts.wr_tol << ")";
    return {ok, detail.str()};
}

// --- criterion 5: first-order convergence of the coupled implicit Euler ---
Outcome criterion_order() {
    Netlist netlist = load_netlist(benchmarks_dir() + "/circuit_a.cir");
    MnaSystem circuit = MnaSystem::from_netlist(netlist);
    Eigen::SparseMatrix<double> M(1, 1), K(1, 1);
    K.insert(0, 0) = 2.0;
    Eigen::MatrixXd X(1, 1);
    X << 1.0;
    FieldModel field = FieldModel::from_matrices(M, K, X);
    Eigen::VectorXd x0 = circuit.zero_state();
    Eigen::VectorXd a0 = Eigen::VectorXd::Zero(1);
    const int n2 = netlist.node_index("n2");

    auto probe_at_end = [&](double dt) {
        Eigen::VectorXd grid = make_grid(0.0, 0.8, dt);
        CoupledTrace tr = solve_monolithic(field, circuit, x0, a0, grid);
        return tr.x.samples()(tr.x.samples().rows() - 1, n2);
    };
    const double ref = probe_at_end(1e-5);
    double errs[3];
    double dts[3] = {4e-3, 2e-3, 1e-3};
    for (int i = 0; i < 3; ++i) errs[i] = std::abs(probe_at_end(dts[i]) - ref);
    double r1 = errs[0] / errs[1];
    double r2 = errs[1] / errs[2];
    bool ok = r1 >= 1.6 && r1 <= 2.4 && r2 >= 1.6 && r2 <= 2.4;
    std::ostringstream detail;
    detail << "errors " << errs[0] << " / " << errs[1] << " / " << errs[2] << ", ratios " << r1
           << ", " << r2 << " (2.0 +- 0.4)";
    return {ok, detail.str()};
}

// --- criterion 6: determinism and round trips ---
Outcome criterion_determinism() {
    std::ostringstream detail;
    bool ok = true;

    // bit-identical CSVs from identical configs
    std::string cfg_text = std::string("{\"netlist\": \"") + benchmarks_dir() +
                           "/circuit_a.cir\", \"window\": [0.0, 0.8]}";
    RunConfig cfg = parse_run_config(cfg_text);
    SimulationOutput s1 = run_simulation(cfg, SimulateMode::Both);
    SimulationOutput s2 = run_simulation(cfg, SimulateMode::Both);
    bool bits = format_trace_csv(s1.table) == format_trace_csv(s2.table);
    ok = ok && bits;
    detail << "csv bit-identical: " << (bits ? "yes" : "NO");

    // netlist round trip on the shipped corpus
    bool netlists_ok = true;
    for (const char* file : {"circuit_a.cir", "circuit_b.cir"}) {
        Netlist n = load_netlist(benchmarks_dir() + "/" + file);
        std::string emitted = serialize_netlist(n);
        netlists_ok = netlists_ok && serialize_netlist(parse_netlist(emitted)) == emitted;
    }
    ok = ok && netlists_ok;
    detail << ", netlist round trip: " << (netlists_ok ? "yes" : "NO");

    // CSV round trip of the produced table
    auto tmp = std::filesystem::temp_directory_path() / "fieldcirc_acc_trace.csv";
    write_trace_csv(tmp.string(), s1.table);
    TraceTable back = read_trace_csv(tmp.string());
    bool csv_ok = format_trace_csv(back) == format_trace_csv(s1.table);
    ok = ok && csv_ok;
    detail << ", csv round trip: " << (csv_ok ? "yes" : "NO");
    std::filesystem::remove(tmp);

    // model export / re-ingest changes nothing beyond 1e-12 relative
    FieldModel model = transformer_lite();
    auto prefix = (std::filesystem::temp_directory_path() / "fieldcirc_acc_model").string();
    save_matrix_model(model, prefix);
    FieldModel back_model = load_matrix_model(prefix);
    Netlist netlist = load_netlist(benchmarks_dir() + "/circuit_a.cir");
    MnaSystem circuit = MnaSystem::from_netlist(netlist);
    Eigen::VectorXd grid = make_grid(0.0, 0.2, 1e-2);
    Eigen::VectorXd x0 = circuit.zero_state();
    CoupledTrace t1 = solve_monolithic(model, circuit, x0,
                                       Eigen::VectorXd::Zero(model.n_dofs()), grid);
    CoupledTrace t2 = solve_monolithic(back_model, circuit, x0,
                                       Eigen::VectorXd::Zero(back_model.n_dofs()), grid);
    double rel = sup_diff(t1.x, t2.x) / std::max(1e-30, sup_abs(t1.x));
    ok = ok && rel <= 1e-12;
    detail << ", export/re-ingest relative change: " << rel;
    for (const char* suffix : {"_M.mtx", "_K.mtx", "_X.mtx"}) {
        std::filesystem::remove(prefix + suffix);
    }
    return {ok, detail.str()};
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {"1 benchmark dichotomy (convergent/divergent WR)", criterion_benchmark_dichotomy},
        {"2 criterion soundness (graph vs algebraic)", criterion_soundness},
        {"3 assumption validation (seeded, deterministic)", criterion_assumptions},
        {"4 lumped-oracle equivalence (L_eq = X^T K^-1 X)", criterion_lumped_oracle},
        {"5 implicit Euler order check", criterion_order},
        {"6 determinism and round trips", criterion_determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] criterion %s: %s\n", outcome.pass ? "PASS" : "FAIL", c.name,
                    outcome.detail.c_str());
        std::fflush(stdout);
        failures += outcome.pass ? 0 : 1;
    }
    if (failures > 0) {
        std::printf("%d criterion(s) FAILED\n", failures);
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
