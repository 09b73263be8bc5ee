"""Cooper-pair box in the truncated charge basis.

All energies are frequencies (E/h, in Hz). Flux is in units of the flux
quantum and the polarization charge ``n_sigma`` is in Cooper pairs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import constants

from .errors import ConfigError, EigensolverError

DEFAULT_N_MAX = 7


def _require_finite(**values):
    for name, value in values.items():
        if not math.isfinite(value):
            raise ConfigError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class CpbParams:
    E_C: float
    E_J0: float
    flux: float = 0.0
    n_sigma: float = 0.0
    junction_asymmetry: float = 0.0

    def __post_init__(self):
        _require_finite(E_C=self.E_C, E_J0=self.E_J0, flux=self.flux, n_sigma=self.n_sigma,
                        junction_asymmetry=self.junction_asymmetry)
        if self.E_C <= 0:
            raise ConfigError(f"E_C must be > 0, got {self.E_C!r}")
        if self.E_J0 < 0:
            raise ConfigError(f"E_J0 must be >= 0, got {self.E_J0!r}")
        if not 0 <= self.junction_asymmetry < 1:
            raise ConfigError(f"junction_asymmetry must lie in [0, 1), got {self.junction_asymmetry!r}")

    @property
    def E_J(self) -> float:
        return josephson_energy(self.E_J0, self.flux, self.junction_asymmetry)

    def replace(self, **changes) -> "CpbParams":
        fields = dict(E_C=self.E_C, E_J0=self.E_J0, flux=self.flux, n_sigma=self.n_sigma,
                      junction_asymmetry=self.junction_asymmetry)
        fields.update(changes)
        return CpbParams(**fields)


def polarization_charge(C_Q=0.0, V_Q=0.0, C_g=0.0, V_g=0.0, C_NR=0.0, V_NR=0.0) -> float:
    """Gate charge in Cooper pairs from the three capacitively coupled biases."""
    return (C_Q * V_Q + C_g * V_g + C_NR * V_NR) / (2 * constants.e)


@dataclass(frozen=True)
class ChargeBasis:
    """Charge states ``n in [-n_max, n_max]``, shifted to the integer nearest ``n_sigma``.

    The shift keeps the truncation symmetric about the gate charge, so the
    spectrum is exactly periodic in ``n_sigma``. For ``|n_sigma| <= 0.5`` the
    shift is zero.
    """

    n_max: int = DEFAULT_N_MAX

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 0:
            raise ConfigError(f"n_max must be a nonnegative integer, got {self.n_max!r}")

    @property
    def dimension(self) -> int:
        return 2 * self.n_max + 1

    def charges(self, n_sigma: float = 0.0) -> np.ndarray:
        offset = float(np.rint(n_sigma))
        return np.arange(-self.n_max, self.n_max + 1, dtype=np.float64) + offset


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """Dense Hermitian operator plus the basis it is written in.

    ``charges`` labels the charge factor; ``n_fock`` is set for composite
    (charge x Fock) matrices, with the Fock index running fastest.
    """

    data: np.ndarray
    charges: np.ndarray
    n_fock: Optional[int] = None

    @property
    def dimension(self) -> int:
        return self.data.shape[0]

    def labels(self) -> list:
        if self.n_fock is None:
            return [(int(n),) for n in self.charges]
        return [(int(n), k) for n in self.charges for k in range(self.n_fock + 1)]

    def is_hermitian(self, atol: float = 0.0) -> bool:
        return bool(np.allclose(self.data, self.data.conj().T, rtol=0.0, atol=atol))


@dataclass(frozen=True, eq=False)
class QubitSpectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    params_echo: CpbParams
    charges: np.ndarray = field(repr=False)

    @property
    def transition_energy(self) -> float:
        return float(self.eigenvalues[1] - self.eigenvalues[0])

    def charge_matrix_element(self, i: int, j: int, n_sigma: Optional[float] = None) -> float:
        """<i|(n - n_sigma)|j>; the offset drops out for i != j."""
        ns = self.params_echo.n_sigma if n_sigma is None else n_sigma
        vi = self.eigenvectors[:, i]
        vj = self.eigenvectors[:, j]
        return float(np.vdot(vi, (self.charges - ns) * vj).real)


def josephson_energy(E_J0: float, flux: float, asymmetry: float = 0.0) -> float:
    """SQUID Josephson energy E_J0 * sqrt(cos^2(pi f) + d^2 sin^2(pi f))."""
    c = math.cos(math.pi * flux)
    s = math.sin(math.pi * flux)
    if asymmetry == 0.0:
        return E_J0 * abs(c)
    return E_J0 * math.sqrt(c * c + asymmetry * asymmetry * s * s)


def build_cpb_hamiltonian(params: CpbParams, basis: ChargeBasis = ChargeBasis()) -> HermitianMatrix:
    if basis.dimension < 3:
        raise ConfigError("charge basis needs at least 3 states (n_max >= 1)")
    n = basis.charges(params.n_sigma)
    h = np.diag(4.0 * params.E_C * (n - params.n_sigma) ** 2)
    hop = -0.5 * params.E_J
    idx = np.arange(n.size - 1)
    h[idx, idx + 1] = hop
    h[idx + 1, idx] = hop
    return HermitianMatrix(h, n)


def fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude component of every column real and positive."""
    cols = np.arange(vectors.shape[1])
    pivot = np.argmax(np.abs(vectors), axis=0)
    p = vectors[pivot, cols]
    return vectors * (np.abs(p) / p)[None, :]


def diagonalize(matrix: np.ndarray, context: str = "") -> tuple:
    try:
        w, v = np.linalg.eigh(matrix)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigensolver did not converge ({context}): {exc}") from exc
    if not np.all(np.isfinite(w)):
        raise EigensolverError(f"eigensolver returned non-finite eigenvalues ({context})")
    return w, fix_phases(v)


def qubit_spectrum(params: CpbParams, basis: ChargeBasis = ChargeBasis(),
                   n_levels: Optional[int] = None) -> QubitSpectrum:
    n_levels = basis.dimension if n_levels is None else n_levels
    if not 1 <= n_levels <= basis.dimension:
        raise ConfigError(f"n_levels must lie in [1, {basis.dimension}], got {n_levels}")
    h = build_cpb_hamiltonian(params, basis)
    w, v = diagonalize(h.data, context=repr(params))
    return QubitSpectrum(w[:n_levels], v[:, :n_levels], params, h.charges)


def transition_energy_curve(params: CpbParams, flux_grid: Sequence[float],
                            n_sigma: Optional[float] = None,
                            basis: ChargeBasis = ChargeBasis()) -> np.ndarray:
    """E1 - E0 at every flux in ``flux_grid``."""
    grid = np.atleast_1d(np.asarray(flux_grid, dtype=np.float64))
    if grid.size == 0:
        raise ConfigError("flux grid is empty")
    if n_sigma is not None:
        params = params.replace(n_sigma=n_sigma)
    out = np.empty(grid.size)
    for i, f in enumerate(grid):
        out[i] = qubit_spectrum(params.replace(flux=float(f)), basis, 2).transition_energy
    return out


def charge_qubit_splitting(E_C: float, E_J: float, n_sigma: float) -> float:
    """Two-state charge-qubit estimate sqrt(E_J^2 + (4 E_C (1 - 2 n_sigma))^2)."""
    return math.hypot(E_J, 4.0 * E_C * (1.0 - 2.0 * n_sigma))
