#pragma once

#include <iosfwd>
#include <string>

#include "fieldcirc/config.hpp"
#include "fieldcirc/csv.hpp"
#include "fieldcirc/monolithic.hpp"
#include "fieldcirc/wr.hpp"

namespace fieldcirc {

/// Exit codes: 0 success / convergence guaranteed, 2 criterion not guaranteed
/// or WR did not converge, 1 usage or solver errors.
enum ExitCode { kExitOk = 0, kExitError = 1, kExitNotGuaranteed = 2 };

enum class SimulateMode { Wr, Monolithic, Both };

SimulateMode parse_simulate_mode(const std::string& mode);

int cmd_analyze(const std::string& netlist_path, bool as_json, std::ostream& out,
                std::ostream& err);

int cmd_simulate(const RunConfig& cfg, SimulateMode mode, std::ostream& out, std::ostream& err);

int cmd_validate(const std::string& model_ref, const ValidationOptions& vopts, std::ostream& out,
                 std::ostream& err);

/// Everything cmd_simulate computes, for in-process use and the bindings.
struct SimulationOutput {
    std::optional<CoupledTrace> monolithic;
    std::optional<WrResult> wr;
    TraceTable table;
};

SimulationOutput run_simulation(const RunConfig& cfg, SimulateMode mode);

} // namespace fieldcirc
