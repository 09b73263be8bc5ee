"""Compare the numba and numpy kernels, plus one end-to-end map column.

    python benchmarks/bench_kernels.py
    QEMSIM_DISABLE_NUMBA=1 python benchmarks/bench_kernels.py   # numpy end-to-end

Kernel timings call both implementations directly, so the first run already
shows the comparison; the end-to-end line uses whichever backend was selected.
"""
from __future__ import annotations

import time
import timeit

import numpy as np

from qemsim import _kernels
from qemsim.composite import CouplingParams, OscillatorParams
from qemsim.qubit import ChargeBasis, CpbParams
from qemsim.spectroscopy import ProbeConfig, single_tone_map


def _best(fn, number=20, repeat=5):
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def bench_composite(n_max=7, n_fock=10):
    q = np.arange(-n_max, n_max + 1, dtype=np.float64)
    diag = 4 * 1.3e9 * (q - 0.3) ** 2
    cpl = 1.6e8 * (q - 0.3)
    args = (diag, -6.35e9, cpl, 1.94e9, n_fock)
    rows = {"numpy": _best(lambda: _kernels.composite_matrix_numpy(*args))}
    if _kernels.HAVE_NUMBA:
        _kernels.composite_matrix_numba(*args)  # compile
        rows["numba"] = _best(lambda: _kernels.composite_matrix_numba(*args))
        assert np.array_equal(_kernels.composite_matrix_numba(*args),
                              _kernels.composite_matrix_numpy(*args))
    return f"composite_matrix dim={q.size * (n_fock + 1)}", rows


def bench_lorentz(n_omega=201, n_trans=2000):
    rng = np.random.default_rng(0)
    grid = np.linspace(1.64e9, 2.24e9, n_omega)
    freqs = rng.uniform(-3e10, 3e10, n_trans)
    weights = rng.uniform(0, 1, n_trans)
    args = (grid, freqs, weights, 5e6)
    rows = {"numpy": _best(lambda: _kernels.lorentz_response_numpy(*args))}
    if _kernels.HAVE_NUMBA:
        _kernels.lorentz_response_numba(*args)
        rows["numba"] = _best(lambda: _kernels.lorentz_response_numba(*args))
    return f"lorentz_response {n_omega}x{n_trans}", rows


def bench_map(n_flux=21):
    probe = ProbeConfig(np.linspace(1.64e9, 2.24e9, 201), 5e6, 0.3, True)
    args = (CpbParams(1.3e9, 12.7e9), OscillatorParams(1.94e9), CouplingParams(1.6e8),
            np.linspace(-1, 1, n_flux), probe, ChargeBasis(7))
    single_tone_map(*args[:4], args[4], args[5])
    t0 = time.perf_counter()
    single_tone_map(*args)
    return f"single_tone_map {n_flux} columns", {_kernels.BACKEND: time.perf_counter() - t0}


def main():
    print(f"selected backend: {_kernels.BACKEND} (numba available: {_kernels.HAVE_NUMBA})")
    for name, rows in (bench_composite(), bench_lorentz(), bench_map()):
        cells = "  ".join(f"{k}={v * 1e3:9.3f} ms" for k, v in rows.items())
        speed = ""
        if "numba" in rows and "numpy" in rows:
            speed = f"  speedup={rows['numpy'] / rows['numba']:.1f}x"
        print(f"{name:<36} {cells}{speed}")


if __name__ == "__main__":
    main()
