#pragma once

#include <string>
#include <vector>

#include "fieldcirc/csv.hpp"
#include "fieldcirc/integrate.hpp"

namespace fieldcirc {

struct WrOptions {
    double t_start = 0.0;
    double t_end = 0.8;          // s
    double wr_tol = 1e-6;        // relative sup-norm tolerance on v_c
    int k_max = 20;
    double blowup_factor = 1e6;  // diverged when delta_k > blowup_factor * delta_1
    int windows = 1;             // sequential sub-windows
    bool store_all = true;       // keep every sweep (else only the last two)
    SolveOptions field;
    SolveOptions circuit;
};

enum class WrStatus { Converged, Diverged, MaxIterations };

const char* wr_status_name(WrStatus s);

/// One Gauss-Seidel sweep's waveforms. For multi-window runs, iterate k is
/// the concatenation over windows of sweep min(k, last sweep of that window).
struct WrIterate {
    Waveform a;
    Waveform i_m;
    Waveform x;
    Waveform v_c;
    int sweep = 0; // 1-based sweep index this iterate was produced by
};

struct WrResult {
    WrStatus status = WrStatus::MaxIterations;
    int iterations = 0;                // sweeps run in the last window
    std::vector<double> deltas;        // delta_k = supdiff(v_c^k, v_c^{k-1}), all windows
    std::vector<int> window_sweeps;    // sweeps per window
    std::vector<WrIterate> iterates;
    Eigen::VectorXd x0;                // initial circuit state (for exports)
    double t_start = 0.0;
    double t_end = 0.0;

    const WrIterate& final_iterate() const;
};

/// Gauss-Seidel waveform relaxation: per sweep k, the field subsystem is
/// integrated with v_c^{k-1}, then the circuit with the resulting i_m^k;
/// v_c^0 is the constant extrapolation of P^T x0. Stops when
/// delta_k <= wr_tol * (1 + sup|v_c^k|), when delta_k exceeds
/// blowup_factor * delta_1 or a sample turns non-finite (Diverged), or at
/// k_max sweeps.
WrResult gauss_seidel_wr(const FieldModel& field, const MnaSystem& circuit,
                         const Eigen::VectorXd& x0, const Eigen::VectorXd& a0,
                         const WrOptions& opts);

/// Time column plus one column per stored sweep of the probe node potential.
/// Column labels are the 1-based sweep indices.
TraceTable iterate_history_export(const WrResult& result, const Netlist& netlist,
                                  const std::string& probe);

} // namespace fieldcirc
