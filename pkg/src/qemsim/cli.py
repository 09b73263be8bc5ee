"""Command-line entry point: ``qemsim <subcommand> --config run.yaml``."""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .config import load_config
from .errors import ConfigError, InputError, NumericalError, QemsimError
from .export import FORMATS, export
from .fitting import MODELS, fit_resonance
from .mechanics import DESIGN_UNITS
from .sweep import ResultTable, has_failures, run_sweep

# Operation forced by each config-driven subcommand; ``sweep`` uses the config's own.
SUBCOMMAND_OPERATION = {
    "qubit-spectrum": "qubit_spectrum",
    "single-tone": "single_tone_map",
    "two-tone": "two_tone_overlay",
    "design": "design",
    "sweep": None,
}

REPORT_KEYS = ("omega_NR", "x_zp", "lambda", "lambda_max", "lambda_LC", "V_Sn", "T1", "N_TH")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML run configuration")
    common.add_argument("--out", type=Path, help="output file (default: stdout)")
    common.add_argument("--format", choices=FORMATS, default=None,
                        help="output format (default: the config's output.format, else csv)")
    common.add_argument("--threads", type=int, default=1, help="grid-level worker threads")
    common.add_argument("--seed", type=int, default=None,
                        help="reserved; every operation is deterministic and ignores it")
    common.add_argument("--strict", action="store_true", help="treat unknown config keys as errors")

    p = argparse.ArgumentParser(prog="qemsim", description=__doc__)
    p.add_argument("--version", action="version", version=f"qemsim {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("qubit-spectrum", parents=[common], help="CPB eigenvalues, optionally swept")
    sub.add_parser("single-tone", parents=[common], help="single-tone amplitude/phase map vs flux")
    sub.add_parser("two-tone", parents=[common], help="qubit transition energy vs flux for several n_g")
    sub.add_parser("design", parents=[common], help="beam and bias-circuit design report")
    fit = sub.add_parser("fit", parents=[common], help="fit a two-column (frequency, amplitude) trace")
    fit.add_argument("trace", type=Path, help="two-column text file; '#' starts a comment")
    fit.add_argument("--model", choices=MODELS, default="hanger")
    sub.add_parser("sweep", parents=[common], help="run the config's operation over its sweep grid")
    return p


def _write(data: bytes, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(data.decode("utf-8"))
        sys.stdout.flush()
        return
    try:
        out.write_bytes(data)
    except OSError as exc:
        raise InputError(f"cannot write {out}: {exc.strerror or exc}") from None


def _design_text(table: ResultTable) -> str:
    lines = [f"# qemsim {table.tool_version} design report", f"# config_hash: {table.config_hash}"]
    for i, row in enumerate(table.rows):
        if table.rows.shape[0] > 1:
            lines.append(f"[point {i}]")
        if i in table.failures:
            lines.append(f"  failed: {table.failures[i]}")
            continue
        for key in REPORT_KEYS:
            v = row[table.columns.index(key)]
            lines.append(f"  {key:<10} = {v:.6e} {DESIGN_UNITS[key]}")
    return "\n".join(lines) + "\n"


def _read_trace(path: Path):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    rows = []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise InputError(f"{path}:{n}: expected two columns, got {len(parts)}")
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise InputError(f"{path}:{n}: non-numeric value") from None
    if not rows:
        raise InputError(f"{path}: no data rows")
    data = np.array(rows)
    return data[:, 0], data[:, 1]


def _fit_output(fit, fmt: str) -> bytes:
    fields = ("f0", "Q_L", "Q_i", "Q_c", "residual_norm", "scale")
    if fmt == "csv":
        vals = ",".join("inf" if math.isinf(getattr(fit, k)) else f"{getattr(fit, k):.16e}"
                        for k in fields)
        return (f"# tool: qemsim {__version__}\n# kind: fit\n# model: {fit.model}\n"
                f"# units: Hz,1,1,1,1,1\n{','.join(fields)}\n{vals}\n").encode("utf-8")
    doc = {"schema": "qemsim.fit/1", "tool": f"qemsim {__version__}", "model": fit.model}
    for k in fields:
        v = getattr(fit, k)
        doc[k] = v if math.isfinite(v) else None
    return (json.dumps(doc, sort_keys=True, indent=1) + "\n").encode("utf-8")


def _run(args) -> int:
    if args.threads < 1:
        raise ConfigError(f"--threads must be >= 1, got {args.threads}")
    if args.command == "fit":
        f, y = _read_trace(args.trace)
        _write(_fit_output(fit_resonance(f, y, args.model), args.format or "csv"), args.out)
        return 0
    if args.config is None:
        raise ConfigError(f"{args.command}: --config is required")
    cfg = load_config(args.config, strict=args.strict)
    output = cfg.block("output") or {"format": "csv", "precision": 17}
    fmt = args.format or output["format"]
    if fmt not in FORMATS:
        raise ConfigError(f"output.format: expected one of {FORMATS}, got {fmt!r}")
    result = run_sweep(cfg, threads=args.threads, operation=SUBCOMMAND_OPERATION[args.command])
    if args.command == "design" and args.format is None:
        _write(_design_text(result).encode("utf-8"), args.out)
    else:
        _write(export(result, fmt, output["precision"]), args.out)
    if has_failures(result):
        print("qemsim: some grid points failed; see the failure records in the output",
              file=sys.stderr)
        return NumericalError.exit_code
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        return _run(args)
    except QemsimError as exc:
        print(f"qemsim: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
