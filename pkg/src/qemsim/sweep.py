"""Deterministic parameter sweeps driven by a RunConfig."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from . import __version__
from .composite import avoided_crossing_gap, composite_eigenvalues, dispersive_chi_formula, \
    dispersive_chi_numeric
from .config import RunConfig, validate
from .errors import ConfigError, QemsimError
from .mechanics import DESIGN_UNITS, design_report
from .qubit import josephson_energy, qubit_spectrum
from .spectroscopy import ProbeConfig, SpectroscopyMap, single_tone_map, two_tone_overlay

AXIS_UNITS = {
    "cpb.E_C": "Hz", "cpb.E_J0": "Hz", "cpb.flux": "Phi0", "cpb.n_sigma": "Cooper pairs",
    "cpb.junction_asymmetry": "1", "oscillator.omega": "Hz", "oscillator.linewidth_kappa": "Hz",
    "coupling.lambda": "Hz", "beam.w": "m", "beam.t": "m", "beam.L": "m", "beam.d": "m",
    "beam.L_e": "m", "beam.rho": "kg/m^3", "beam.youngs_E": "Pa", "beam.beta": "1",
    "bias.C_NR": "F", "bias.C_CPB": "F", "bias.C_Q": "F", "bias.C_T": "F", "bias.Z0": "Ohm",
    "bias.V_NR": "V", "design.temperature": "K", "design.omega_LC": "Hz", "design.delta_E": "Hz",
}


@dataclass(frozen=True, eq=False)
class ResultTable:
    columns: Tuple[str, ...]
    units: Tuple[str, ...]
    rows: np.ndarray
    config_hash: str = ""
    tool_version: str = __version__
    failures: dict = field(default_factory=dict)

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[1] != len(self.columns):
            raise ValueError(f"rows shape {rows.shape} does not match {len(self.columns)} columns")
        if len(self.units) != len(self.columns):
            raise ValueError("every column needs a unit")
        object.__setattr__(self, "rows", rows)

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.columns.index(name)]

    @property
    def any_failed(self) -> bool:
        return bool(self.failures)


def sweep_values(cfg: RunConfig) -> Optional[np.ndarray]:
    sweep = cfg.block("sweep")
    if sweep is None:
        return None
    if sweep["spacing"] == "log":
        return np.geomspace(sweep["start"], sweep["stop"], sweep["count"])
    return np.linspace(sweep["start"], sweep["stop"], sweep["count"])


def _with_value(cfg: RunConfig, axis: Optional[str], value: float) -> RunConfig:
    if axis is None:
        return cfg
    block, key = axis.split(".")
    data = {**cfg.data, "system": {**cfg.system, block: {**cfg.system[block], key: float(value)}}}
    return RunConfig(data)


def _probe(cfg: RunConfig) -> ProbeConfig:
    p = cfg.need("probe")
    grid = np.linspace(p["omega_start"], p["omega_stop"], p["omega_count"])
    return ProbeConfig(grid, p["eta"], p["n_bar"], p["qp_average"])


# Each point function returns (column names, units, values) for one config.

def _pt_josephson(cfg):
    c = cfg.cpb()
    return ("E_J",), ("Hz",), (josephson_energy(c.E_J0, c.flux, c.junction_asymmetry),)


def _pt_qubit(cfg):
    n = cfg.system["cpb"]["n_levels"]
    s = qubit_spectrum(cfg.cpb(), cfg.basis(), n)
    return tuple(f"E_{i}" for i in range(n)), ("Hz",) * n, tuple(s.eigenvalues)


def _pt_transition(cfg):
    s = qubit_spectrum(cfg.cpb(), cfg.basis(), 2)
    return ("delta_E",), ("Hz",), (s.transition_energy,)


def _pt_composite(cfg):
    n = cfg.system["cpb"]["n_levels"]
    w = composite_eigenvalues(cfg.cpb(), cfg.oscillator(), cfg.coupling(), cfg.basis())[:n]
    return tuple(f"E_{i}" for i in range(n)), ("Hz",) * n, tuple(w)


def _pt_gap(cfg):
    window = cfg.need("analysis").get("flux_window")
    if window is None:
        raise ConfigError("analysis.flux_window: required for avoided_crossing_gap")
    r = avoided_crossing_gap(cfg.cpb(), cfg.oscillator(), cfg.coupling(), tuple(window), cfg.basis())
    return ("gap", "flux_at_min"), ("Hz", "Phi0"), (r.gap, r.flux_at_min)


def _pt_chi_formula(cfg):
    return ("chi",), ("Hz",), (dispersive_chi_formula(cfg.cpb(), cfg.oscillator(), cfg.coupling(),
                                                      cfg.basis()),)


def _pt_chi_numeric(cfg):
    return ("chi",), ("Hz",), (dispersive_chi_numeric(cfg.cpb(), cfg.oscillator(), cfg.coupling(),
                                                      cfg.basis()),)


def _pt_design(cfg):
    d = cfg.need("system.design")
    e_c = cfg.need("system.cpb")["E_C"]
    rep = design_report(cfg.beam(), cfg.bias(), e_c, d["temperature"], d["omega_LC"],
                        d["delta_E"], cfg.system["beam"]["mode"])
    names = tuple(rep)
    return names, tuple(DESIGN_UNITS[k] for k in names), tuple(rep[k] for k in names)


POINT_OPERATIONS: dict = {
    "josephson_energy": _pt_josephson,
    "qubit_spectrum": _pt_qubit,
    "transition_energy": _pt_transition,
    "composite_spectrum": _pt_composite,
    "avoided_crossing_gap": _pt_gap,
    "dispersive_chi_formula": _pt_chi_formula,
    "dispersive_chi_numeric": _pt_chi_numeric,
    "design": _pt_design,
}


def _run_table(cfg: RunConfig, point: Callable, threads: int) -> ResultTable:
    values = sweep_values(cfg)
    axis = cfg.block("sweep")["axis"] if values is not None else None
    grid = values if values is not None else np.array([math.nan])

    def work(v):
        try:
            return point(_with_value(cfg, axis, v)), None
        except ConfigError:
            raise
        except QemsimError as exc:
            return None, f"{type(exc).__name__}: {exc}"

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results: List = list(pool.map(work, grid))
    else:
        results = [work(v) for v in grid]
    good = [r for r, err in results if r is not None]
    if good:
        names, units = good[0][0], good[0][1]
    else:
        names, units = ("value",), ("1",)
    lead_names = (axis.split(".")[1],) if axis else ()
    lead_units = (AXIS_UNITS.get(axis, "1"),) if axis else ()
    rows = []
    failures = {}
    for i, (v, (res, err)) in enumerate(zip(grid, results)):
        lead = (v,) if axis else ()
        if res is None:
            failures[i] = err
            rows.append(lead + (math.nan,) * len(names) + (1.0,))
        else:
            rows.append(lead + tuple(float(x) for x in res[2]) + (0.0,))
    return ResultTable(lead_names + tuple(names) + ("failed",),
                       lead_units + tuple(units) + ("1",),
                       np.array(rows, dtype=np.float64), cfg.hash, __version__, failures)


def run_sweep(config, threads: int = 1, operation: Optional[str] = None):
    """Evaluate the configured operation over the sweep grid.

    Returns a ResultTable for pointwise operations and a SpectroscopyMap for
    ``single_tone_map`` / ``two_tone_overlay`` (whose sweep axis must be
    ``cpb.flux``). Per-point numerical failures are recorded, not raised.
    """
    cfg = config if isinstance(config, RunConfig) else validate(config)
    op = operation or cfg.operation
    if op is None:
        raise ConfigError("operation: no operation given")
    if op in POINT_OPERATIONS:
        return _run_table(cfg, POINT_OPERATIONS[op], threads)
    if op in ("single_tone_map", "two_tone_overlay"):
        sweep = cfg.need("sweep")
        if sweep["axis"] != "cpb.flux":
            raise ConfigError(f"sweep.axis: {op} sweeps cpb.flux, got {sweep['axis']!r}")
        flux = sweep_values(cfg)
        if op == "single_tone_map":
            m = single_tone_map(cfg.cpb(), cfg.oscillator(), cfg.coupling(), flux, _probe(cfg),
                                cfg.basis(), threads=threads)
        else:
            n_g = cfg.block("analysis")["n_g"] if cfg.block("analysis") else [0.5, 0.375, 0.25]
            m = two_tone_overlay(cfg.cpb(), flux, n_g, cfg.basis())
        m.metadata["config_hash"] = cfg.hash
        m.metadata["tool_version"] = __version__
        return m
    raise ConfigError(f"operation: unknown operation {op!r}")


def has_failures(result) -> bool:
    if isinstance(result, ResultTable):
        return result.any_failed
    if isinstance(result, SpectroscopyMap):
        return bool(result.failed)
    return False
