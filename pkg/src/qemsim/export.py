"""Serialization of result tables and spectroscopy maps (CSV and json-map)."""
from __future__ import annotations

import io
import json
import math

import numpy as np

from . import __version__
from .errors import ExportError
from .spectroscopy import SpectroscopyMap
from .sweep import ResultTable

FORMATS = ("csv", "json-map")
MAP_SCHEMA = "qemsim.map/1"
TABLE_SCHEMA = "qemsim.table/1"


def _num(x: float, precision: int = 17) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.{precision - 1}e}"


def _row(values, precision) -> str:
    return ",".join(_num(float(v), precision) for v in values)


def _jsonable(x):
    # JSON has no NaN/inf: NaN becomes null, infinities the strings "inf"/"-inf".
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in x]
    return x


def _table_csv(t: ResultTable, precision: int) -> str:
    out = io.StringIO()
    out.write(f"# tool: qemsim {t.tool_version}\n")
    out.write(f"# config_hash: {t.config_hash}\n")
    out.write("# kind: table\n")
    out.write(f"# units: {','.join(t.units)}\n")
    out.write(",".join(t.columns) + "\n")
    for r in t.rows:
        out.write(_row(r, precision) + "\n")
    for i, msg in sorted(t.failures.items()):
        out.write(f"# failure row {i}: {' '.join(str(msg).split())}\n")
    out.write(f"# end: rows={t.rows.shape[0]} config_hash={t.config_hash}\n")
    return out.getvalue()


def _map_csv(m: SpectroscopyMap, precision: int) -> str:
    meta = m.metadata
    out = io.StringIO()
    out.write(f"# tool: qemsim {meta.get('tool_version', __version__)}\n")
    out.write(f"# config_hash: {meta.get('config_hash', '')}\n")
    out.write("# kind: map\n")
    out.write(f"# x_axis: {m.x_name} [{m.x_units}]: {_row(m.x_axis, precision)}\n")
    out.write(f"# y_axis: {m.y_name} [{m.y_units}]: {_row(m.y_axis, precision)}\n")
    out.write(f"# values: {m.value_name} [{m.value_units}] rows=y columns=x\n")
    for r in m.values:
        out.write(_row(r, precision) + "\n")
    if m.phase is not None:
        out.write("# values: phase [rad] rows=y columns=x\n")
        for r in m.phase:
            out.write(_row(r, precision) + "\n")
    for j in m.failed:
        out.write(f"# failure column {j}: {' '.join(str(meta.get('failures', {}).get(str(j), '')).split())}\n")
    out.write(f"# end: shape={m.values.shape[0]}x{m.values.shape[1]} config_hash={meta.get('config_hash', '')}\n")
    return out.getvalue()


def _map_json(m: SpectroscopyMap) -> dict:
    meta = dict(m.metadata)
    doc = {
        "schema": MAP_SCHEMA,
        "tool": f"qemsim {meta.pop('tool_version', __version__)}",
        "config_hash": meta.pop("config_hash", ""),
        "x_axis": {"name": m.x_name, "units": m.x_units, "values": _jsonable(m.x_axis)},
        "y_axis": {"name": m.y_name, "units": m.y_units, "values": _jsonable(m.y_axis)},
        "shape": [int(m.values.shape[0]), int(m.values.shape[1])],
        "values": {"name": m.value_name, "units": m.value_units,
                   "data": _jsonable(m.values.ravel(order="C"))},
        "phase": None if m.phase is None else {"name": "phase", "units": "rad",
                                               "data": _jsonable(m.phase.ravel(order="C"))},
        "failed": [int(j) for j in m.failed],
        "metadata": _jsonable(meta),
    }
    return doc


def _table_json(t: ResultTable) -> dict:
    return {
        "schema": TABLE_SCHEMA,
        "tool": f"qemsim {t.tool_version}",
        "config_hash": t.config_hash,
        "columns": [{"name": c, "units": u, "values": _jsonable(t.rows[:, i])}
                    for i, (c, u) in enumerate(zip(t.columns, t.units))],
        "failures": {str(k): v for k, v in sorted(t.failures.items())},
    }


def export(result, format: str = "csv", precision: int = 17) -> bytes:
    """Serialize a ResultTable or SpectroscopyMap to UTF-8 bytes."""
    if format not in FORMATS:
        raise ExportError(f"unsupported format {format!r}; expected one of {FORMATS}")
    if format == "csv":
        if isinstance(result, ResultTable):
            return _table_csv(result, precision).encode("utf-8")
        if isinstance(result, SpectroscopyMap):
            return _map_csv(result, precision).encode("utf-8")
    else:
        if isinstance(result, ResultTable):
            doc = _table_json(result)
        elif isinstance(result, SpectroscopyMap):
            doc = _map_json(result)
        else:
            doc = None
        if doc is not None:
            return (json.dumps(doc, sort_keys=True, allow_nan=False, indent=1) + "\n").encode("utf-8")
    raise ExportError(f"cannot export object of type {type(result).__name__}")


# --- parsing (round-trip support) ------------------------------------------

def _floats(text: str) -> np.ndarray:
    return np.array([float(v) for v in text.split(",")], dtype=np.float64)


def _header_value(line: str) -> str:
    return line.split(":", 1)[1].strip()


def _axis(line: str):
    body = _header_value(line)
    label, values = body.split("]:", 1)
    name, units = label.split("[", 1)
    return name.strip(), units.strip(), _floats(values.strip())


def parse_csv(data: bytes):
    lines = data.decode("utf-8").splitlines()
    header = {}
    for line in lines:
        if line.startswith("# ") and ":" in line:
            key = line[2:].split(":", 1)[0]
            header.setdefault(key, line)
    kind = _header_value(header["kind"])
    chash = _header_value(header["config_hash"])
    version = _header_value(header["tool"]).split()[-1]
    if kind == "table":
        units = tuple(_header_value(header["units"]).split(","))
        body = [ln for ln in lines if not ln.startswith("#")]
        columns = tuple(body[0].split(","))
        rows = np.array([_floats(ln) for ln in body[1:]]).reshape(-1, len(columns))
        failures = {}
        for ln in lines:
            if ln.startswith("# failure row "):
                idx, msg = ln[len("# failure row "):].split(":", 1)
                failures[int(idx)] = msg.strip()
        return ResultTable(columns, units, rows, chash, version, failures)
    if kind == "map":
        xname, xunits, x = _axis(header["x_axis"])
        yname, yunits, y = _axis(header["y_axis"])
        blocks, current, vlabel = [], None, None
        for ln in lines:
            if ln.startswith("# values:"):
                current = []
                blocks.append(current)
                if vlabel is None:
                    vlabel = _header_value(ln).split(" rows=")[0]
            elif not ln.startswith("#") and current is not None:
                current.append(_floats(ln))
        vname, vunits = vlabel.split("[", 1)
        values = np.array(blocks[0]).reshape(y.size, x.size)
        phase = np.array(blocks[1]).reshape(y.size, x.size) if len(blocks) > 1 else None
        failed = tuple(int(ln.split()[3].rstrip(":")) for ln in lines if ln.startswith("# failure column "))
        meta = {"config_hash": chash, "tool_version": version}
        return SpectroscopyMap(x, y, values, phase, meta, xname, xunits, yname, yunits,
                               vname.strip(), vunits.rstrip("]").strip(), failed)
    raise ExportError(f"unknown CSV kind {kind!r}")


def _nan(values) -> np.ndarray:
    return np.array([math.nan if v is None else float(v) for v in values], dtype=np.float64)


def parse_json(data: bytes):
    doc = json.loads(data.decode("utf-8"))
    version = doc["tool"].split()[-1]
    if doc["schema"] == MAP_SCHEMA:
        ny, nx = doc["shape"]
        phase = None if doc["phase"] is None else _nan(doc["phase"]["data"]).reshape(ny, nx)
        meta = dict(doc["metadata"])
        meta["config_hash"] = doc["config_hash"]
        meta["tool_version"] = version
        return SpectroscopyMap(_nan(doc["x_axis"]["values"]), _nan(doc["y_axis"]["values"]),
                               _nan(doc["values"]["data"]).reshape(ny, nx), phase, meta,
                               doc["x_axis"]["name"], doc["x_axis"]["units"],
                               doc["y_axis"]["name"], doc["y_axis"]["units"],
                               doc["values"]["name"], doc["values"]["units"], tuple(doc["failed"]))
    if doc["schema"] == TABLE_SCHEMA:
        cols = doc["columns"]
        rows = np.column_stack([_nan(c["values"]) for c in cols]) if cols else np.zeros((0, 0))
        return ResultTable(tuple(c["name"] for c in cols), tuple(c["units"] for c in cols), rows,
                           doc["config_hash"], version,
                           {int(k): v for k, v in doc["failures"].items()})
    raise ExportError(f"unknown schema {doc.get('schema')!r}")
