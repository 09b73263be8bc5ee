"""Cooper-pair box coupled to one harmonic mode (mechanical or electrical).

    H = H_CPB (x) 1 + 1 (x) omega (a^+ a + 1/2) + lambda (n - n_sigma) (x) (a^+ + a)

Basis ordering is charge-major: index = q * (n_fock + 1) + k.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from .errors import (ConfigError, DimensionCapError, EigensolverError, LabelingError,
                     NoCrossingError, ResonanceDivergenceError)
from .qubit import (ChargeBasis, CpbParams, HermitianMatrix, QubitSpectrum, _require_finite,
                    diagonalize, qubit_spectrum)

DEFAULT_N_FOCK = 10
DEFAULT_DIM_CAP = 4096
LABEL_THRESHOLD = 0.5
OSCILLATOR_LABELS = ("nanoresonator", "lc_cavity", "cpw_cavity")


@dataclass(frozen=True)
class OscillatorParams:
    omega: float
    n_fock: int = DEFAULT_N_FOCK
    linewidth_kappa: float = 0.0
    label: str = "lc_cavity"

    def __post_init__(self):
        _require_finite(omega=self.omega, linewidth_kappa=self.linewidth_kappa)
        if self.omega <= 0:
            raise ConfigError(f"omega must be > 0, got {self.omega!r}")
        if int(self.n_fock) != self.n_fock or self.n_fock < 1:
            raise ConfigError(f"n_fock must be an integer >= 1, got {self.n_fock!r}")
        if self.linewidth_kappa < 0:
            raise ConfigError(f"linewidth_kappa must be >= 0, got {self.linewidth_kappa!r}")
        if self.label not in OSCILLATOR_LABELS:
            raise ConfigError(f"label must be one of {OSCILLATOR_LABELS}, got {self.label!r}")

    def replace(self, **changes) -> "OscillatorParams":
        d = dict(omega=self.omega, n_fock=self.n_fock, linewidth_kappa=self.linewidth_kappa,
                 label=self.label)
        d.update(changes)
        return OscillatorParams(**d)


@dataclass(frozen=True)
class CouplingParams:
    """Coupling prefactor lambda/2pi in Hz. Sign is kept."""

    lam: float

    def __post_init__(self):
        _require_finite(lam=self.lam)


@dataclass(frozen=True, eq=False)
class CompositeSpectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    labels: np.ndarray          # (dim, 2) of (qubit level, photon number); -1 where unlabeled
    label_overlap: np.ndarray   # best |<bare|dressed>|^2 per dressed state
    cpb: CpbParams
    osc: OscillatorParams
    coupling: CouplingParams
    charges: np.ndarray = field(repr=False)
    bare_qubit: QubitSpectrum = field(repr=False)

    @property
    def dimension(self) -> int:
        return self.eigenvalues.size

    @property
    def n_fock(self) -> int:
        return self.osc.n_fock

    def _reshaped(self) -> np.ndarray:
        return self.eigenvectors.reshape(self.charges.size, self.n_fock + 1, -1)

    def photon_numbers(self) -> np.ndarray:
        """<m| a^+ a |m> for every eigenstate m."""
        k = np.arange(self.n_fock + 1, dtype=np.float64)
        return np.einsum("qkm,k->m", np.abs(self._reshaped()) ** 2, k)

    def position_matrix(self, n_states: Optional[int] = None) -> np.ndarray:
        """<f|(a + a^+)|i> in the eigenbasis, for the lowest ``n_states`` (all by default)."""
        v = self._reshaped()
        if n_states is not None:
            v = v[:, :, :n_states]
        s = np.sqrt(np.arange(1, self.n_fock + 1, dtype=np.float64))
        xv = np.zeros_like(v)
        xv[:, :-1, :] += s[None, :, None] * v[:, 1:, :]
        xv[:, 1:, :] += s[None, :, None] * v[:, :-1, :]
        m = v.shape[2]
        return v.reshape(-1, m).conj().T @ xv.reshape(-1, m)

    def index_of(self, qubit_level: int, photons: int) -> int:
        hits = np.flatnonzero((self.labels[:, 0] == qubit_level) & (self.labels[:, 1] == photons))
        if hits.size != 1:
            raise LabelingError(
                f"bare state (qubit {qubit_level}, {photons} photons) has {hits.size} dressed "
                f"matches above overlap {LABEL_THRESHOLD} at flux={self.cpb.flux}, "
                f"n_sigma={self.cpb.n_sigma}, lambda={self.coupling.lam}")
        return int(hits[0])

    def energy_of(self, qubit_level: int, photons: int) -> float:
        return float(self.eigenvalues[self.index_of(qubit_level, photons)])


def _check_dimension(basis: ChargeBasis, osc: OscillatorParams, dim_cap: int) -> int:
    dim = basis.dimension * (osc.n_fock + 1)
    if dim > dim_cap:
        raise DimensionCapError(
            f"composite dimension {dim} = {basis.dimension} x {osc.n_fock + 1} exceeds cap {dim_cap}")
    return dim


def build_composite_hamiltonian(cpb: CpbParams, osc: OscillatorParams, g: CouplingParams,
                                basis: ChargeBasis = ChargeBasis(),
                                dim_cap: int = DEFAULT_DIM_CAP) -> HermitianMatrix:
    if basis.dimension < 3:
        raise ConfigError("charge basis needs at least 3 states (n_max >= 1)")
    _check_dimension(basis, osc, dim_cap)
    n = basis.charges(cpb.n_sigma)
    offset = n - cpb.n_sigma
    h = _kernels.composite_matrix(4.0 * cpb.E_C * offset ** 2, -0.5 * cpb.E_J, g.lam * offset,
                                  osc.omega, osc.n_fock)
    return HermitianMatrix(h, n, osc.n_fock)


def label_states(vectors: np.ndarray, bare: QubitSpectrum, n_fock: int) -> Tuple[np.ndarray, np.ndarray]:
    """Assign each dressed state to the bare (qubit level, photon number) of maximal overlap."""
    nq = bare.eigenvectors.shape[0]
    v = vectors.reshape(nq, n_fock + 1, -1)
    amp = np.einsum("qj,qkm->jkm", bare.eigenvectors.conj(), v)
    overlap = np.abs(amp) ** 2
    flat = overlap.reshape(-1, overlap.shape[2])
    best = np.argmax(flat, axis=0)
    best_val = flat[best, np.arange(flat.shape[1])]
    labels = np.stack(np.divmod(best, n_fock + 1), axis=1)
    labels[best_val <= LABEL_THRESHOLD] = -1
    return labels, best_val


def composite_spectrum(cpb: CpbParams, osc: OscillatorParams, g: CouplingParams,
                       basis: ChargeBasis = ChargeBasis(),
                       dim_cap: int = DEFAULT_DIM_CAP) -> CompositeSpectrum:
    h = build_composite_hamiltonian(cpb, osc, g, basis, dim_cap)
    w, v = diagonalize(h.data, context=f"{cpb!r}, {osc!r}, {g!r}, n_max={basis.n_max}")
    bare = qubit_spectrum(cpb, basis)
    labels, overlap = label_states(v, bare, osc.n_fock)
    return CompositeSpectrum(w, v, labels, overlap, cpb, osc, g, h.charges, bare)


def composite_eigenvalues(cpb: CpbParams, osc: OscillatorParams, g: CouplingParams,
                          basis: ChargeBasis = ChargeBasis(),
                          dim_cap: int = DEFAULT_DIM_CAP) -> np.ndarray:
    h = build_composite_hamiltonian(cpb, osc, g, basis, dim_cap)
    try:
        return np.linalg.eigvalsh(h.data)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigensolver did not converge ({cpb!r}, {osc!r}, {g!r})") from exc


# --- avoided crossings -------------------------------------------------------

@dataclass(frozen=True)
class GapResult:
    gap: float
    flux_at_min: float


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_min(func, a: float, b: float, tol: float):
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = func(c), func(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = func(d)
    return (c, fc) if fc <= fd else (d, fd)


def avoided_crossing_gap(cpb: CpbParams, osc: OscillatorParams, g: CouplingParams,
                         flux_window: Tuple[float, float], basis: ChargeBasis = ChargeBasis(),
                         levels: Tuple[int, int] = (1, 2), n_coarse: int = 41,
                         flux_tol: float = 1e-9) -> GapResult:
    """Minimum of E[levels[1]] - E[levels[0]] over ``flux_window``.

    A coarse scan brackets the minimum, golden-section search refines it to
    ``flux_tol`` (which must be at most 1e-5).
    """
    lo, hi = map(float, flux_window)
    if not lo < hi:
        raise ConfigError(f"flux window must be increasing, got {flux_window}")
    if flux_tol > 1e-5:
        raise ConfigError("flux_tol must be <= 1e-5")
    i, j = levels

    def gap(f):
        w = composite_eigenvalues(cpb.replace(flux=f), osc, g, basis)
        return w[j] - w[i]

    grid = np.linspace(lo, hi, n_coarse)
    vals = np.array([gap(f) for f in grid])
    k = int(np.argmin(vals))
    if k == 0 or k == n_coarse - 1:
        raise NoCrossingError(
            f"gap minimum sits on the window boundary (flux={grid[k]:.6g}); "
            f"no avoided crossing inside {flux_window}")
    f_min, g_min = _golden_min(gap, grid[k - 1], grid[k + 1], flux_tol)
    return GapResult(float(g_min), float(f_min))


def bare_resonance_fluxes(cpb: CpbParams, omega: float, flux_window: Tuple[float, float],
                          basis: ChargeBasis = ChargeBasis(), n_grid: int = 401) -> np.ndarray:
    """Roots of E1(flux) - E0(flux) = omega inside the window (uncoupled qubit)."""
    def detuning(f):
        return qubit_spectrum(cpb.replace(flux=f), basis, 2).transition_energy - omega

    grid = np.linspace(flux_window[0], flux_window[1], n_grid)
    vals = np.array([detuning(f) for f in grid])
    roots = []
    for a, b, va, vb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if va == 0.0:
            roots.append(a)
        elif va * vb < 0:
            roots.append(brentq(detuning, a, b, xtol=1e-12))
    return np.array(roots)


# --- dispersive shift --------------------------------------------------------

def dispersive_chi(lam: float, E_J: float, delta_E: float, omega: float) -> float:
    """chi = lam^2 E_J^2 / (dE (dE^2 - omega^2)), all arguments and the result in Hz."""
    if lam == 0.0:
        return 0.0
    if abs(delta_E - omega) < 1e-3 * abs(omega):
        raise ResonanceDivergenceError(
            f"qubit transition {delta_E:.6g} Hz is resonant with the oscillator ({omega:.6g} Hz)")
    return lam ** 2 * E_J ** 2 / (delta_E * (delta_E ** 2 - omega ** 2))


def dispersive_chi_formula(cpb: CpbParams, osc: OscillatorParams, g: CouplingParams,
                           basis: ChargeBasis = ChargeBasis()) -> float:
    """Closed-form dispersive shift in Hz.

    chi = lambda^2 E_J^2 / (dE (dE^2 - omega^2)), every quantity a frequency,
    with dE the numerically computed lowest qubit transition. This is the
    full shift [E(e,1) - E(e,0)] - [E(g,1) - E(g,0)].
    """
    if g.lam == 0.0:
        return 0.0
    dE = qubit_spectrum(cpb, basis, 2).transition_energy
    return dispersive_chi(g.lam, cpb.E_J, dE, osc.omega)


def dispersive_chi_numeric(cpb: CpbParams, osc: OscillatorParams, g: CouplingParams,
                           basis: ChargeBasis = ChargeBasis(),
                           check_regime: bool = True) -> float:
    """Dispersive shift from labeled composite eigenvalues."""
    if g.lam == 0.0:
        return 0.0
    spec = composite_spectrum(cpb, osc, g, basis)
    if check_regime:
        bare = spec.bare_qubit
        dE = bare.transition_energy
        coupling = abs(g.lam * bare.charge_matrix_element(1, 0))
        if coupling >= 0.05 * abs(dE - osc.omega):
            raise ResonanceDivergenceError(
                f"not dispersive: |lambda n_eg| = {coupling:.4g} Hz vs detuning {dE - osc.omega:.4g} Hz")
    e1, e0 = spec.energy_of(1, 1), spec.energy_of(1, 0)
    g1, g0 = spec.energy_of(0, 1), spec.energy_of(0, 0)
    return (e1 - e0) - (g1 - g0)


# --- truncation convergence -------------------------------------------------

@dataclass(frozen=True)
class ConvergenceReport:
    n_max: int
    n_fock: int


def convergence_report(cpb: CpbParams, osc: OscillatorParams, g: CouplingParams,
                       n_levels: int = 6, rel_tol: float = 1e-6, step: int = 2,
                       dim_cap: int = DEFAULT_DIM_CAP) -> ConvergenceReport:
    """Smallest (n_max, n_fock) whose lowest ``n_levels`` eigenvalues move less than
    ``rel_tol * E_C`` when either truncation grows by ``step``."""
    tol = rel_tol * cpb.E_C
    n_max, n_fock = 1, 1
    while (2 * n_max + 1) * (n_fock + 1) < n_levels:
        n_fock += 1

    def lowest(nm, nf):
        if (2 * (nm) + 1) * (nf + 1) > dim_cap:
            raise DimensionCapError(
                f"no convergence below dimension cap {dim_cap} (n_max={nm}, n_fock={nf})")
        return composite_eigenvalues(cpb, osc.replace(n_fock=nf), g, ChargeBasis(nm), dim_cap)[:n_levels]

    while True:
        base = lowest(n_max, n_fock)
        charge_ok = np.max(np.abs(lowest(n_max + step, n_fock) - base)) < tol
        fock_ok = np.max(np.abs(lowest(n_max, n_fock + step) - base)) < tol
        if charge_ok and fock_ok:
            return ConvergenceReport(n_max, n_fock)
        if not charge_ok:
            n_max += 1
        if not fock_ok:
            n_fock += 1
