import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qemsim import __version__
from qemsim.config import validate
from qemsim.errors import ConfigError, ExportError
from qemsim.export import export, parse_csv, parse_json
from qemsim.qubit import CpbParams, josephson_energy, qubit_spectrum
from qemsim.spectroscopy import SpectroscopyMap
from qemsim.sweep import ResultTable, has_failures, run_sweep

CPB = {"E_C": 1.3e9, "E_J0": 12.7e9}


def _cfg(operation, sweep=None, **blocks):
    raw = {"operation": operation, "system": {"cpb": dict(CPB)}}
    if sweep:
        raw["sweep"] = sweep
    for k, v in blocks.items():
        if k in ("oscillator", "coupling", "beam", "bias", "design"):
            raw["system"][k] = v
        else:
            raw[k] = v
    return validate(raw)


def test_josephson_sweep_matches_closed_form():
    t = run_sweep(_cfg("josephson_energy", {"axis": "cpb.flux", "start": 0, "stop": 1, "count": 11}))
    assert t.rows.shape == (11, 3)
    assert t.columns == ("flux", "E_J", "failed")
    assert t.units == ("Phi0", "Hz", "1")
    for f, e in zip(t.column("flux"), t.column("E_J")):
        assert e == pytest.approx(josephson_energy(12.7e9, f), rel=1e-12, abs=1e-3)
    assert not has_failures(t)


def test_single_point_without_sweep():
    t = run_sweep(_cfg("transition_energy"))
    assert t.rows.shape == (1, 2)


def test_count_one_gives_one_row():
    t = run_sweep(_cfg("josephson_energy", {"axis": "cpb.flux", "start": 0.2, "stop": 0.2, "count": 1}))
    assert t.rows.shape[0] == 1
    body = [ln for ln in export(t).decode().splitlines() if not ln.startswith("#")]
    assert len(body) == 2  # header + one data row


def test_log_spacing():
    t = run_sweep(_cfg("josephson_energy", {"axis": "cpb.E_J0", "start": 1e9, "stop": 1e11, "count": 3,
                                            "spacing": "log"}))
    np.testing.assert_allclose(t.column("E_J0"), [1e9, 1e10, 1e11], rtol=1e-12)


def test_partial_failures_are_recorded():
    # The oscillator sweep passes exactly through the bare qubit transition, where chi diverges.
    de = qubit_spectrum(CpbParams(1.3e9, 12.7e9), n_levels=2).transition_energy
    cfg = _cfg("dispersive_chi_formula",
               {"axis": "oscillator.omega", "start": de * 0.5, "stop": de * 1.5, "count": 5},
               oscillator={"omega": 1.94e9}, coupling={"lambda": 1e7})
    t = run_sweep(cfg)
    assert has_failures(t)
    assert list(t.failures) == [2]
    assert t.column("failed").tolist() == [0, 0, 1, 0, 0]
    assert math.isnan(t.column("chi")[2])
    assert "ResonanceDivergenceError" in t.failures[2]
    text = export(t).decode()
    assert "# failure row 2: ResonanceDivergenceError" in text


def test_unknown_operation_and_missing_blocks():
    with pytest.raises(ConfigError):
        run_sweep(_cfg("transition_energy"), operation="warp")
    with pytest.raises(ConfigError, match="oscillator"):
        run_sweep(_cfg("composite_spectrum"))


def test_dimension_cap_surfaces_with_grid_point():
    cfg = _cfg("composite_spectrum", {"axis": "cpb.flux", "start": 0, "stop": 1, "count": 2},
               oscillator={"omega": 1.94e9, "n_fock": 400}, coupling={"lambda": 1e8})
    t = run_sweep(cfg)
    assert sorted(t.failures) == [0, 1]
    assert all("DimensionCapError" in m for m in t.failures.values())


def test_threads_do_not_change_output():
    cfg = _cfg("qubit_spectrum", {"axis": "cpb.n_sigma", "start": -1, "stop": 1, "count": 17})
    assert export(run_sweep(cfg, threads=1)) == export(run_sweep(cfg, threads=4))


def _map_cfg():
    return _cfg("single_tone_map", {"axis": "cpb.flux", "start": -1, "stop": 1, "count": 9},
                oscillator={"omega": 1.94e9}, coupling={"lambda": 1.6e8},
                probe={"omega_start": 1.8e9, "omega_stop": 2.1e9, "omega_count": 13, "n_bar": 0.3,
                       "qp_average": True})


def test_map_sweep_shape_and_provenance():
    m = run_sweep(_map_cfg())
    assert isinstance(m, SpectroscopyMap)
    assert m.values.shape == (13, 9)
    assert m.metadata["config_hash"] == _map_cfg().hash
    text = export(m).decode().splitlines()
    data_rows = [ln for ln in text if not ln.startswith("#")]
    assert len(data_rows) == 2 * 13  # amplitude block then phase block
    assert all(len(r.split(",")) == 9 for r in data_rows)
    doc = json.loads(export(m, "json-map"))
    assert len(doc["values"]["data"]) == len(doc["x_axis"]["values"]) * len(doc["y_axis"]["values"])
    assert doc["schema"] == "qemsim.map/1"


def test_map_requires_flux_axis():
    cfg = _map_cfg()
    cfg = validate({**cfg.data, "sweep": {"axis": "cpb.n_sigma", "start": 0, "stop": 1, "count": 3}})
    with pytest.raises(ConfigError, match="cpb.flux"):
        run_sweep(cfg)


def test_two_tone_sweep():
    cfg = _cfg("two_tone_overlay", {"axis": "cpb.flux", "start": -1, "stop": 1, "count": 21},
               analysis={"n_g": [0.5, 0.25]})
    m = run_sweep(cfg)
    assert m.values.shape == (2, 21)
    np.testing.assert_array_equal(m.y_axis, [0.5, 0.25])


def test_identical_runs_are_byte_identical():
    a = export(run_sweep(_map_cfg()))
    b = export(run_sweep(_map_cfg(), threads=3))
    assert a == b
    assert export(run_sweep(_map_cfg()), "json-map") == export(run_sweep(_map_cfg()), "json-map")


def test_csv_header_contract():
    t = run_sweep(_cfg("josephson_energy", {"axis": "cpb.flux", "start": 0, "stop": 1, "count": 3}))
    lines = export(t).decode("utf-8").splitlines()
    assert lines[0] == f"# tool: qemsim {__version__}"
    assert lines[1] == f"# config_hash: {t.config_hash}"
    assert lines[3].startswith("# units: ")
    assert lines[-1].startswith("# end:") and t.config_hash in lines[-1]
    assert "e+" in lines[5] or "e-" in lines[5]


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)
values = st.lists(st.one_of(finite, st.just(math.nan), st.just(math.inf), st.just(-math.inf)),
                  min_size=1, max_size=12)


@given(values)
def test_table_round_trip_bit_exact(vals):
    t = ResultTable(("x", "y"), ("Hz", "1"), np.column_stack([vals, vals[::-1]]), "abc", __version__,
                    {0: "EigensolverError: boom,\nsplit"})
    for fmt, parse in (("csv", parse_csv), ("json-map", parse_json)):
        back = parse(export(t, fmt))
        assert back.columns == t.columns and back.units == t.units
        assert back.config_hash == "abc"
        assert np.array_equal(back.rows, t.rows, equal_nan=True)
        num = ~np.isnan(t.rows)
        assert np.array_equal(back.rows[num].view(np.uint64), t.rows[num].view(np.uint64))
    assert parse_csv(export(t)).failures == {0: "EigensolverError: boom, split"}
    assert parse_json(export(t, "json-map")).failures == t.failures


def test_map_round_trip_bit_exact():
    m = run_sweep(_map_cfg())
    for fmt, parse in (("csv", parse_csv), ("json-map", parse_json)):
        back = parse(export(m, fmt))
        assert np.array_equal(back.values, m.values)
        assert np.array_equal(back.phase, m.phase)
        assert np.array_equal(back.x_axis, m.x_axis) and np.array_equal(back.y_axis, m.y_axis)
        assert back.metadata["config_hash"] == m.metadata["config_hash"]
        assert export(back, fmt) == export(m, fmt) or fmt == "csv"


def test_export_rejects_unknown_format_and_type():
    t = ResultTable(("x",), ("1",), np.zeros((1, 1)))
    with pytest.raises(ExportError):
        export(t, "xlsx")
    with pytest.raises(ExportError):
        export({"not": "a result"}, "csv")


def test_result_table_invariants():
    with pytest.raises(ValueError):
        ResultTable(("a", "b"), ("1", "1"), np.zeros((2, 3)))
    with pytest.raises(ValueError):
        ResultTable(("a",), (), np.zeros((2, 1)))
