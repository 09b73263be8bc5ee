"""YAML run configuration: schema, defaults, validation, canonical form.

Canonical schema (every block optional unless the chosen operation needs it)::

    operation: single_tone_map
    system:
      cpb:        {E_C, E_J0, flux: 0, n_sigma: 0, junction_asymmetry: 0, n_max: 7, n_levels: 4}
      oscillator: {omega, n_fock: 10, linewidth_kappa: 0, label: lc_cavity}
      coupling:   {lambda}
      beam:       {w, t, L, d, L_e: L, material: aluminum, rho, youngs_E, beta: 1, mode: 1}
      bias:       {C_NR, C_CPB, C_Q, C_T, Z0: 50, V_NR: 0}
      design:     {temperature, omega_LC, delta_E}
    sweep:   {axis: cpb.flux, start, stop, count, spacing: linear}
    probe:   {omega_start, omega_stop, omega_count, eta: 5e6, n_bar: 0, qp_average: false}
    analysis: {n_g: [0.5, 0.375, 0.25], flux_window: [a, b]}
    output:  {format: csv, precision: 17}

Energies and frequencies are in Hz, flux in flux quanta, SI elsewhere.
"""
from __future__ import annotations

import copy
import hashlib
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

import yaml

from .composite import CouplingParams, OscillatorParams
from .errors import ConfigError, InputError
from .mechanics import MATERIALS, BeamSpec, BiasCircuit
from .qubit import ChargeBasis, CpbParams

REQUIRED = object()

OPERATIONS = (
    "josephson_energy", "qubit_spectrum", "transition_energy", "composite_spectrum",
    "avoided_crossing_gap", "dispersive_chi_formula", "dispersive_chi_numeric", "design",
    "single_tone_map", "two_tone_overlay",
)

# block -> key -> (kind, default)
SYSTEM_SCHEMA = {
    "cpb": {
        "E_C": ("float", REQUIRED), "E_J0": ("float", REQUIRED), "flux": ("float", 0.0),
        "n_sigma": ("float", 0.0), "junction_asymmetry": ("float", 0.0),
        "n_max": ("int", 7), "n_levels": ("int", 4),
    },
    "oscillator": {
        "omega": ("float", REQUIRED), "n_fock": ("int", 10), "linewidth_kappa": ("float", 0.0),
        "label": ("str", "lc_cavity"),
    },
    "coupling": {"lambda": ("float", REQUIRED)},
    "beam": {
        "w": ("float", REQUIRED), "t": ("float", REQUIRED), "L": ("float", REQUIRED),
        "d": ("float", REQUIRED), "L_e": ("float", None), "material": ("str", "aluminum"),
        "rho": ("float", None), "youngs_E": ("float", None), "beta": ("float", 1.0),
        "mode": ("int", 1),
    },
    "bias": {
        "C_NR": ("float", REQUIRED), "C_CPB": ("float", REQUIRED), "C_Q": ("float", REQUIRED),
        "C_T": ("float", REQUIRED), "Z0": ("float", 50.0), "V_NR": ("float", 0.0),
    },
    "design": {
        "temperature": ("float", REQUIRED), "omega_LC": ("float", REQUIRED),
        "delta_E": ("float", REQUIRED),
    },
}

TOP_SCHEMA = {
    "sweep": {
        "axis": ("str", REQUIRED), "start": ("float", REQUIRED), "stop": ("float", REQUIRED),
        "count": ("int", REQUIRED), "spacing": ("str", "linear"),
    },
    "probe": {
        "omega_start": ("float", REQUIRED), "omega_stop": ("float", REQUIRED),
        "omega_count": ("int", REQUIRED), "eta": ("float", 5e6), "n_bar": ("float", 0.0),
        "qp_average": ("bool", False),
    },
    "analysis": {"n_g": ("floatlist", [0.5, 0.375, 0.25]), "flux_window": ("floatlist", None)},
    "output": {"format": ("str", "csv"), "precision": ("int", 17)},
}

TOP_KEYS = ("operation", "system") + tuple(TOP_SCHEMA)


def _coerce(kind: str, value: Any, where: str):
    try:
        if kind == "float":
            if isinstance(value, bool):
                raise TypeError
            out = float(value)
            if not math.isfinite(out):
                raise ConfigError(f"{where}: value must be finite, got {value!r}")
            return out
        if kind == "int":
            if isinstance(value, bool) or float(value) != int(float(value)):
                raise TypeError
            return int(float(value))
        if kind == "bool":
            if not isinstance(value, bool):
                raise TypeError
            return value
        if kind == "str":
            if not isinstance(value, str):
                raise TypeError
            return value
        if kind == "floatlist":
            if not isinstance(value, (list, tuple)):
                raise TypeError
            return [_coerce("float", v, where) for v in value]
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: expected {kind}, got {value!r}") from None
    raise AssertionError(kind)


def _fill_block(raw: Any, schema: dict, where: str, strict: bool) -> dict:
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(raw).__name__}")
    out = {}
    for key in raw:
        if key not in schema:
            msg = f"{where}.{key}: unknown key"
            if strict:
                raise ConfigError(msg)
            warnings.warn(msg, stacklevel=3)
    for key, (kind, default) in schema.items():
        if key in raw and raw[key] is not None:
            out[key] = _coerce(kind, raw[key], f"{where}.{key}")
        elif default is REQUIRED:
            raise ConfigError(f"{where}.{key}: required key is missing")
        elif default is not None:
            out[key] = copy.deepcopy(default)
    return out


@dataclass(frozen=True, eq=False)
class RunConfig:
    """Validated configuration; ``data`` is the canonical tree with defaults applied."""

    data: dict

    @property
    def operation(self) -> Optional[str]:
        return self.data.get("operation")

    @property
    def system(self) -> dict:
        return self.data.get("system", {})

    def block(self, name: str) -> Optional[dict]:
        return self.data.get(name)

    def need(self, path: str) -> dict:
        """Return a block, raising a ConfigError naming it if absent."""
        node = self.data
        for part in path.split("."):
            if not isinstance(node, dict) or part not in node:
                raise ConfigError(f"{path}: block is required for operation {self.operation!r}")
            node = node[part]
        return node

    # typed views

    def cpb(self) -> CpbParams:
        b = self.need("system.cpb")
        return _build(CpbParams, "system.cpb", E_C=b["E_C"], E_J0=b["E_J0"], flux=b["flux"],
                      n_sigma=b["n_sigma"], junction_asymmetry=b["junction_asymmetry"])

    def basis(self) -> ChargeBasis:
        return _build(ChargeBasis, "system.cpb", n_max=self.need("system.cpb")["n_max"])

    def oscillator(self) -> OscillatorParams:
        b = self.need("system.oscillator")
        return _build(OscillatorParams, "system.oscillator", omega=b["omega"], n_fock=b["n_fock"],
                      linewidth_kappa=b["linewidth_kappa"], label=b["label"])

    def coupling(self) -> CouplingParams:
        return _build(CouplingParams, "system.coupling", lam=self.need("system.coupling")["lambda"])

    def beam(self) -> BeamSpec:
        b = dict(self.need("system.beam"))
        material = b.pop("material")
        b.pop("mode")
        if b.get("rho") is None or b.get("youngs_E") is None:
            if material not in MATERIALS:
                raise ConfigError(f"system.beam.material: unknown material {material!r}")
            b.setdefault("rho", MATERIALS[material]["rho"])
            b.setdefault("youngs_E", MATERIALS[material]["youngs_E"])
        return _build(BeamSpec, "system.beam", **b)

    def bias(self) -> BiasCircuit:
        return _build(BiasCircuit, "system.bias", **self.need("system.bias"))

    def canonical(self) -> str:
        return dump_config(self)

    @property
    def hash(self) -> str:
        return config_hash(self)


def _build(cls, where, **kwargs):
    try:
        return cls(**kwargs)
    except ConfigError as exc:
        raise ConfigError(f"{where}: {exc}") from None


_SWEEP_SPACINGS = ("linear", "log")


def validate(raw: Any, strict: bool = True) -> RunConfig:
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("top level must be a mapping")
    data: dict = {}
    for key in raw:
        if key not in TOP_KEYS:
            msg = f"{key}: unknown key"
            if strict:
                raise ConfigError(msg)
            warnings.warn(msg, stacklevel=2)
    if "operation" in raw and raw["operation"] is not None:
        op = _coerce("str", raw["operation"], "operation")
        if op not in OPERATIONS:
            raise ConfigError(f"operation: unknown operation {op!r}; known: {', '.join(OPERATIONS)}")
        data["operation"] = op
    system_raw = raw.get("system") or {}
    if not isinstance(system_raw, dict):
        raise ConfigError("system: expected a mapping")
    system = {}
    for key in system_raw:
        if key not in SYSTEM_SCHEMA:
            msg = f"system.{key}: unknown key"
            if strict:
                raise ConfigError(msg)
            warnings.warn(msg, stacklevel=2)
    for name, schema in SYSTEM_SCHEMA.items():
        if name in system_raw:
            system[name] = _fill_block(system_raw[name], schema, f"system.{name}", strict)
    data["system"] = system
    for name, schema in TOP_SCHEMA.items():
        if name in raw and raw[name] is not None:
            data[name] = _fill_block(raw[name], schema, name, strict)
    data.setdefault("output", _fill_block({}, TOP_SCHEMA["output"], "output", strict))
    cfg = RunConfig(data)
    _check_semantics(cfg)
    return cfg


def _check_semantics(cfg: RunConfig) -> None:
    # Constructing the typed views runs every range check.
    views = {"cpb": cfg.cpb, "oscillator": cfg.oscillator, "coupling": cfg.coupling,
             "beam": cfg.beam, "bias": cfg.bias}
    for name, view in views.items():
        if name in cfg.system:
            view()
    if "cpb" in cfg.system:
        cfg.basis()
        if cfg.system["cpb"]["n_max"] < 1:
            raise ConfigError("system.cpb.n_max: must be >= 1")
        if not 1 <= cfg.system["cpb"]["n_levels"] <= 2 * cfg.system["cpb"]["n_max"] + 1:
            raise ConfigError("system.cpb.n_levels: must lie in [1, 2*n_max+1]")
    if "beam" in cfg.system and cfg.system["beam"]["mode"] not in (1, 2, 3):
        raise ConfigError("system.beam.mode: must be 1, 2 or 3")
    sweep = cfg.block("sweep")
    if sweep is not None:
        if sweep["count"] < 1:
            raise ConfigError("sweep.count: must be >= 1")
        if sweep["spacing"] not in _SWEEP_SPACINGS:
            raise ConfigError(f"sweep.spacing: must be one of {_SWEEP_SPACINGS}")
        if sweep["spacing"] == "log" and (sweep["start"] <= 0 or sweep["stop"] <= 0):
            raise ConfigError("sweep.start/stop: log spacing needs positive endpoints")
        parts = sweep["axis"].split(".")
        if len(parts) != 2 or parts[0] not in cfg.system or parts[1] not in SYSTEM_SCHEMA[parts[0]]:
            raise ConfigError(f"sweep.axis: {sweep['axis']!r} does not name a parameter of the system block")
        if SYSTEM_SCHEMA[parts[0]][parts[1]][0] != "float":
            raise ConfigError(f"sweep.axis: {sweep['axis']!r} is not a continuous parameter")
    probe = cfg.block("probe")
    if probe is not None:
        if probe["omega_count"] < 1:
            raise ConfigError("probe.omega_count: must be >= 1")
        if probe["omega_count"] > 1 and not probe["omega_stop"] > probe["omega_start"]:
            raise ConfigError("probe.omega_stop: must exceed omega_start")
        if probe["eta"] <= 0:
            raise ConfigError("probe.eta: must be > 0")
        if probe["n_bar"] < 0:
            raise ConfigError("probe.n_bar: must be >= 0")
    analysis = cfg.block("analysis")
    if analysis is not None and "flux_window" in analysis and len(analysis["flux_window"]) != 2:
        raise ConfigError("analysis.flux_window: expected [start, stop]")
    out = cfg.data["output"]
    if out["format"] not in ("csv", "json-map"):
        raise ConfigError(f"output.format: unsupported format {out['format']!r}")
    if not 1 <= out["precision"] <= 17:
        raise ConfigError("output.precision: must lie in [1, 17]")


def parse_config(text: str, strict: bool = True, source: str = "<string>") -> RunConfig:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigError(f"{source}: parse error at {where}: {problem}") from None
    return validate(raw, strict=strict)


def load_config(path, strict: bool = True) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, strict=strict, source=str(path))


def dump_config(cfg: RunConfig) -> str:
    return yaml.safe_dump(cfg.data, sort_keys=True, default_flow_style=False, allow_unicode=True)


def config_hash(cfg: RunConfig) -> str:
    return hashlib.sha256(dump_config(cfg).encode("utf-8")).hexdigest()
