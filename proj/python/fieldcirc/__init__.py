"""Coupled field/circuit co-simulation toolkit.

Parses circuit netlists with embedded electromagnetic field elements,
predicts Gauss-Seidel waveform-relaxation convergence from the circuit
topology, and solves the coupled transient problem both monolithically and
by waveform relaxation.
"""

from fieldcirc._core import (
    FieldModel,
    FieldModelError,
    Netlist,
    NetlistError,
    NU_VACUUM,
    SolverError,
    WrResult,
    analyze,
    build_incidence,
    find_cvr_path,
    gauss_seidel_wr,
    load_matrix_model,
    load_netlist,
    parse_netlist,
    run_simulation,
    save_matrix_model,
    solve_monolithic,
    transformer_lite,
    validate_assumptions,
)

__all__ = [
    "FieldModel",
    "FieldModelError",
    "Netlist",
    "NetlistError",
    "NU_VACUUM",
    "SolverError",
    "WrResult",
    "analyze",
    "build_incidence",
    "find_cvr_path",
    "gauss_seidel_wr",
    "load_matrix_model",
    "load_netlist",
    "parse_netlist",
    "run_simulation",
    "save_matrix_model",
    "solve_monolithic",
    "transformer_lite",
    "validate_assumptions",
]

__version__ = "0.1.0"
