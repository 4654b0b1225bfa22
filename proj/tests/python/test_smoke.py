"""End-to-end smoke tests of the python bindings."""

import json
import pathlib

import numpy as np
import pytest

import fieldcirc as fc

BENCHMARKS = pathlib.Path(__file__).resolve().parents[2] / "benchmarks"


@pytest.fixture(scope="module")
def circuit_a():
    return fc.load_netlist(str(BENCHMARKS / "circuit_a.cir"))


@pytest.fixture(scope="module")
def circuit_b():
    return fc.load_netlist(str(BENCHMARKS / "circuit_b.cir"))


@pytest.fixture(scope="module")
def small_field():
    return fc.transformer_lite(nx=17)


def test_parse_and_serialize(circuit_a):
    assert circuit_a.element_count == 6
    assert circuit_a.nodes == ["n3", "n4", "n2"]
    text = circuit_a.serialize()
    again = fc.parse_netlist(text)
    assert again.serialize() == text


def test_parse_error_is_a_value_error():
    with pytest.raises(fc.NetlistError):
        fc.parse_netlist("")


def test_incidence_shapes(circuit_a):
    inc = fc.build_incidence(circuit_a)
    assert inc["A_C"].shape == (3, 1)
    assert inc["A_m"].tolist() == [[0], [0], [-1]]


def test_analyze_predictions(circuit_a, circuit_b):
    ra = fc.analyze(circuit_a)
    rb = fc.analyze(circuit_b)
    assert ra["prediction"] == "GuaranteedConvergent"
    assert ra["cvr_paths"]["M1"] == ["0", "n2"]
    assert rb["prediction"] == "NotGuaranteed"
    assert rb["cvr_paths"]["M1"] is None
    assert fc.find_cvr_path(circuit_b, "M1") is None


def test_field_model_and_validation(small_field):
    assert small_field.n_dofs == 15 * 15
    assert small_field.n_coils == 1
    L = small_field.equivalent_inductance()
    assert L.shape == (1, 1)
    assert L[0, 0] > 0
    report = fc.validate_assumptions(small_field, pencil_samples=5, monotonicity_pairs=10, seed=3)
    assert report["all_ok"]


def test_wr_converges_and_matches_monolithic(circuit_a, small_field):
    res = fc.gauss_seidel_wr(circuit_a, small_field, t_end=0.4, wr_tol=1e-6, k_max=20)
    assert res.status == "Converged"
    assert res.iterations <= 20
    final = res.final()
    mono = fc.solve_monolithic(circuit_a, small_field, t_end=0.4)
    assert final["x"].shape == mono["x"].shape
    scale = 1.0 + np.abs(mono["v_c"]).max()
    assert np.abs(final["v_c"] - mono["v_c"]).max() <= 1e-5 * scale


def test_wr_diverges_on_the_divergent_topology(circuit_b, small_field):
    res = fc.gauss_seidel_wr(circuit_b, small_field, t_end=0.4, k_max=20, blowup_factor=100.0)
    assert res.status == "Diverged"
    deltas = res.deltas
    assert len(deltas) >= 3
    assert deltas[2] > deltas[1] > deltas[0] > 0


def test_run_simulation_from_config(tmp_path, circuit_a):
    config = {
        "netlist": str(BENCHMARKS / "circuit_a.cir"),
        "window": [0.0, 0.2],
        "field": {"nx": 17},
        "probe": "n2",
    }
    out = fc.run_simulation(json.dumps(config), mode="both")
    assert out["labels"][0] == "mon"
    assert out["wr_status"] == "Converged"
    assert out["csv"].startswith("t,mon,1")
    again = fc.run_simulation(json.dumps(config), mode="both")
    assert out["csv"] == again["csv"]


def test_matrix_model_round_trip(tmp_path, small_field):
    prefix = str(tmp_path / "model")
    fc.save_matrix_model(small_field, prefix)
    back = fc.load_matrix_model(prefix)
    assert back.n_dofs == small_field.n_dofs
    assert np.array_equal(back.X(), small_field.X())
