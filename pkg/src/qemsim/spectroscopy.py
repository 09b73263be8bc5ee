"""Single-tone and two-tone spectroscopy from composite spectra (linear response)."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import bisect

from . import _kernels
from .composite import (CompositeSpectrum, CouplingParams, OscillatorParams, composite_spectrum)
from .errors import ConfigError, PopulationError, QemsimError
from .qubit import ChargeBasis, CpbParams, transition_energy_curve

DEFAULT_ETA = 5e6
_POP_CUTOFF = 1e-14
_WEIGHT_CUTOFF = 1e-13


@dataclass(frozen=True, eq=False)
class ProbeConfig:
    omega_grid: np.ndarray
    eta: float = DEFAULT_ETA
    n_bar: float = 0.0
    qp_average: bool = False

    def __post_init__(self):
        grid = np.asarray(self.omega_grid, dtype=np.float64)
        object.__setattr__(self, "omega_grid", grid)
        if grid.ndim != 1 or grid.size == 0:
            raise ConfigError("omega_grid must be a nonempty 1-D sequence")
        if grid.size > 1 and not np.all(np.diff(grid) > 0):
            raise ConfigError("omega_grid must be strictly increasing")
        if not (math.isfinite(self.eta) and self.eta > 0):
            raise ConfigError(f"eta must be > 0, got {self.eta!r}")
        if not (math.isfinite(self.n_bar) and self.n_bar >= 0):
            raise ConfigError(f"n_bar must be >= 0, got {self.n_bar!r}")


@dataclass(frozen=True, eq=False)
class SpectroscopyMap:
    """Values on a (y, x) grid: ``values[i, j]`` belongs to ``y_axis[i]``, ``x_axis[j]``."""

    x_axis: np.ndarray
    y_axis: np.ndarray
    values: np.ndarray
    phase: Optional[np.ndarray] = None
    metadata: dict = field(default_factory=dict)
    x_name: str = "flux"
    x_units: str = "Phi0"
    y_name: str = "frequency"
    y_units: str = "Hz"
    value_name: str = "amplitude"
    value_units: str = "arb"
    failed: tuple = ()

    def __post_init__(self):
        shape = (np.size(self.y_axis), np.size(self.x_axis))
        if self.values.shape != shape:
            raise ValueError(f"values shape {self.values.shape} does not match axes {shape}")
        if self.phase is not None and self.phase.shape != shape:
            raise ValueError(f"phase shape {self.phase.shape} does not match axes {shape}")
        finite = self.values[np.isfinite(self.values)]
        if finite.size and finite.min() < 0:
            raise ValueError("amplitude values must be nonnegative")


@dataclass(frozen=True, eq=False)
class LinearResponse:
    amplitude: np.ndarray
    phase: np.ndarray
    susceptibility: np.ndarray


# --- populations --------------------------------------------------------------

def _boltzmann(energies: np.ndarray, temperature: float) -> np.ndarray:
    x = -(energies - energies[0]) / temperature
    p = np.exp(x - x.max())
    return p / p.sum()


def thermal_populations(energies: np.ndarray, photon_numbers: np.ndarray, n_bar: float) -> np.ndarray:
    """Equilibrium weights whose mean photon number equals ``n_bar``.

    The effective temperature (in Hz) is found by bisection on its logarithm.
    ``n_bar == 0`` selects the ground state alone.
    """
    energies = np.asarray(energies, dtype=np.float64)
    photon_numbers = np.asarray(photon_numbers, dtype=np.float64)
    p = np.zeros(energies.size)
    if n_bar == 0:
        p[0] = 1.0
        return p
    gaps = np.diff(energies)
    scale = energies[-1] - energies[0]
    positive = gaps[gaps > 0]
    t_lo = (positive.min() if positive.size else scale) * 1e-3
    t_hi = scale * 1e4

    def excess(log_t):
        return float(_boltzmann(energies, math.exp(log_t)) @ photon_numbers) - n_bar

    lo, hi = math.log(t_lo), math.log(t_hi)
    if excess(lo) >= 0:
        raise PopulationError(
            f"n_bar={n_bar} is below the ground-state photon number {photon_numbers[0]:.4g}")
    if excess(hi) <= 0:
        raise PopulationError(
            f"n_bar={n_bar} is unreachable in the truncated space "
            f"(high-temperature limit {excess(hi) + n_bar:.4g}); increase n_fock")
    log_t = bisect(excess, lo, hi, xtol=1e-12, rtol=1e-14, maxiter=500)
    return _boltzmann(energies, math.exp(log_t))


def reference_peak(osc: OscillatorParams, n_bar: float, eta: float) -> float:
    """Peak of the unnormalized response of the uncoupled oscillator at ``osc.omega``.

    At zero coupling the equilibrium state factorizes into qubit and oscillator
    parts, so the photon-number constraint only involves the oscillator ladder.
    """
    k = np.arange(osc.n_fock + 1, dtype=np.float64)
    p = thermal_populations(osc.omega * (k + 0.5), k, n_bar)
    up = p[:-1] * k[1:]
    down = p[1:] * k[1:]
    freqs = np.concatenate([np.full(up.size, osc.omega), np.full(down.size, -osc.omega)])
    amp, _ = _kernels.lorentz_response(np.array([osc.omega]), freqs,
                                       np.concatenate([up, down]), eta)
    return float(amp[0])


def _transitions(spectrum: CompositeSpectrum, n_bar: float):
    energies = spectrum.eigenvalues
    p = thermal_populations(energies, spectrum.photon_numbers(), n_bar)
    active = np.flatnonzero(p > _POP_CUTOFF * p.max())
    x = spectrum.position_matrix()[:, active]
    weights = (p[active][None, :] * np.abs(x) ** 2)
    freqs = energies[:, None] - energies[active][None, :]
    keep = weights > _WEIGHT_CUTOFF * weights.max()
    return freqs[keep], weights[keep]


def linear_response_spectrum(spectrum: CompositeSpectrum, probe: ProbeConfig,
                             normalization: Optional[float] = None) -> LinearResponse:
    """Response of the oscillator quadrature (a + a^+) on ``probe.omega_grid``.

    amplitude(w) = sum_i p_i sum_f |<f|a+a^+|i>|^2 eta^2 / ((w - (E_f - E_i))^2 + eta^2),
    scaled so the uncoupled oscillator peaks at 1. The phase is the argument of
    sum_i p_i |M_fi|^2 / ((E_f - E_i) - w - i eta).
    """
    freqs, weights = _transitions(spectrum, probe.n_bar)
    amp, chi = _kernels.lorentz_response(probe.omega_grid, freqs, weights, probe.eta)
    if normalization is None:
        normalization = reference_peak(spectrum.osc, probe.n_bar, probe.eta)
    amp = amp / normalization
    chi = chi / normalization
    return LinearResponse(amp, np.angle(chi), chi)


# --- maps ---------------------------------------------------------------------

def _column(cpb, osc, g, basis, flux, probe, norm):
    base = cpb.replace(flux=float(flux))
    sigmas = (base.n_sigma, base.n_sigma + 0.5) if probe.qp_average else (base.n_sigma,)
    amp = np.zeros(probe.omega_grid.size)
    chi = np.zeros(probe.omega_grid.size, dtype=complex)
    for ns in sigmas:
        r = linear_response_spectrum(composite_spectrum(base.replace(n_sigma=ns), osc, g, basis),
                                     probe, norm)
        amp = amp + r.amplitude
        chi = chi + r.susceptibility
    return amp / len(sigmas), chi / len(sigmas)


def single_tone_map(cpb: CpbParams, osc: OscillatorParams, g: CouplingParams,
                    flux_grid: Sequence[float], probe: ProbeConfig,
                    basis: ChargeBasis = ChargeBasis(), threads: int = 1,
                    order: Optional[Sequence[int]] = None) -> SpectroscopyMap:
    """Probe response versus (flux, frequency).

    Columns are independent; ``threads`` and ``order`` change only the
    evaluation schedule, never the result. Failed columns are NaN and their
    flux indices are listed in ``failed``.
    """
    flux = np.asarray(flux_grid, dtype=np.float64)
    if flux.size == 0:
        raise ConfigError("flux grid is empty")
    norm = reference_peak(osc, probe.n_bar, probe.eta)
    ny = probe.omega_grid.size
    amp = np.full((ny, flux.size), np.nan)
    phase = np.full((ny, flux.size), np.nan)
    failed = {}
    idx = list(range(flux.size)) if order is None else [int(i) for i in order]
    if sorted(idx) != list(range(flux.size)):
        raise ConfigError("order must be a permutation of the flux indices")

    def work(j):
        try:
            return j, _column(cpb, osc, g, basis, flux[j], probe, norm), None
        except QemsimError as exc:
            return j, None, str(exc)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, idx))
    else:
        results = [work(j) for j in idx]
    for j, col, err in results:
        if err is not None:
            failed[j] = err
            continue
        amp[:, j] = col[0]
        phase[:, j] = np.angle(col[1])
    meta = {
        "E_C": cpb.E_C, "E_J0": cpb.E_J0, "n_sigma": cpb.n_sigma,
        "junction_asymmetry": cpb.junction_asymmetry, "omega": osc.omega, "n_fock": osc.n_fock,
        "lambda": g.lam, "n_max": basis.n_max, "eta": probe.eta, "n_bar": probe.n_bar,
        "qp_average": probe.qp_average,
    }
    if failed:
        meta["failures"] = {str(k): v for k, v in sorted(failed.items())}
    return SpectroscopyMap(flux, probe.omega_grid.copy(), amp, phase, meta,
                           failed=tuple(sorted(failed)))


def two_tone_overlay(cpb: CpbParams, flux_grid: Sequence[float], n_g_list: Sequence[float],
                     basis: ChargeBasis = ChargeBasis()) -> SpectroscopyMap:
    """Lowest qubit transition versus flux, one row per gate charge."""
    flux = np.asarray(flux_grid, dtype=np.float64)
    ng = np.asarray(n_g_list, dtype=np.float64)
    if flux.size == 0 or ng.size == 0:
        raise ConfigError("flux grid and n_g list must be nonempty")
    curves = np.vstack([transition_energy_curve(cpb, flux, float(n), basis) for n in ng])
    meta = {"E_C": cpb.E_C, "E_J0": cpb.E_J0, "junction_asymmetry": cpb.junction_asymmetry,
            "n_max": basis.n_max}
    return SpectroscopyMap(flux, ng, curves, None, meta, y_name="n_g", y_units="Cooper pairs",
                           value_name="transition_energy", value_units="Hz")
