"""Closed-form electromechanical design formulas for a doubly clamped beam.

SI units throughout, except that every frequency is returned in Hz (omega/2pi)
and charging energies are passed as E_C/h in Hz.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import constants
from scipy.integrate import simpson
from scipy.optimize import brentq

from .errors import ConfigError

HBAR = constants.hbar
H = constants.h
E_CHARGE = constants.e
K_B = constants.k
EPS0 = constants.epsilon_0

# Frequency prefactors for the first three in-plane flexural modes.
MODE_CONSTANTS = {1: 4.73, 2: 7.89, 3: 10.99}

# Implementation presets, not measured values.
MATERIALS = {
    "aluminum": {"rho": 2700.0, "youngs_E": 70e9},
    "niobium": {"rho": 8570.0, "youngs_E": 105e9},
}

NORMALIZATIONS = ("max", "com", "electrode")


@dataclass(frozen=True)
class BeamSpec:
    w: float
    t: float
    L: float
    d: float
    rho: float
    youngs_E: float
    L_e: Optional[float] = None
    beta: float = 1.0

    def __post_init__(self):
        if self.L_e is None:
            object.__setattr__(self, "L_e", self.L)
        for name in ("w", "t", "L", "L_e", "d", "rho", "youngs_E", "beta"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be positive and finite, got {v!r}")
        if self.L_e > self.L:
            raise ConfigError(f"electrode length L_e={self.L_e} exceeds beam length L={self.L}")
        if self.beta > 1:
            raise ConfigError(f"beta must lie in (0, 1], got {self.beta}")

    @classmethod
    def of(cls, material: str, **geometry) -> "BeamSpec":
        try:
            props = MATERIALS[material]
        except KeyError:
            raise ConfigError(f"unknown material {material!r}; known: {sorted(MATERIALS)}") from None
        return cls(**geometry, **props)

    def replace(self, **changes) -> "BeamSpec":
        d = {k: getattr(self, k) for k in ("w", "t", "L", "d", "rho", "youngs_E", "L_e", "beta")}
        d.update(changes)
        return BeamSpec(**d)


@dataclass(frozen=True)
class BiasCircuit:
    C_NR: float
    C_CPB: float
    C_Q: float
    C_T: float
    Z0: float = 50.0
    V_NR: float = 0.0

    def __post_init__(self):
        for name in ("C_NR", "C_CPB", "C_Q", "C_T"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be positive and finite, got {v!r}")
        # Z0 = 0 models a lossless bias line.
        if not (math.isfinite(self.Z0) and self.Z0 >= 0):
            raise ConfigError(f"Z0 must be >= 0, got {self.Z0!r}")
        if not math.isfinite(self.V_NR):
            raise ConfigError("V_NR must be finite")


# --- mode shapes -----------------------------------------------------------

def _clamped_root(mode: int) -> float:
    """Root of cos(x) cosh(x) = 1 near the tabulated mode constant."""
    a = MODE_CONSTANTS[mode]
    return brentq(lambda x: math.cos(x) * math.cosh(x) - 1.0, a - 0.3, a + 0.3, xtol=1e-14)


def _raw_shape(kl: float, s: np.ndarray) -> np.ndarray:
    """Clamped-clamped eigenfunction on s = x/L in [0, 1]."""
    sigma = (math.cosh(kl) - math.cos(kl)) / (math.sinh(kl) - math.sin(kl))
    x = kl * s
    return np.cosh(x) - np.cos(x) - sigma * (np.sinh(x) - np.sin(x))


@dataclass(frozen=True, eq=False)
class ModeResult:
    mode_index: int
    omega: float
    alpha: float
    m_eff: float
    x_zp: float
    z: np.ndarray = field(repr=False)
    U: np.ndarray = field(repr=False)
    normalization: str = "max"
    scale: float = 1.0
    length: float = field(default=0.0, repr=False)
    kl: float = field(default=0.0, repr=False)
    _peak: float = field(default=1.0, repr=False)

    @property
    def k_eff(self) -> float:
        return self.m_eff * (2 * math.pi * self.omega) ** 2

    def shape(self, z) -> np.ndarray:
        """Mode shape at positions z in [-L/2, L/2], in this result's normalization."""
        s = np.asarray(z, dtype=np.float64) / self.length + 0.5
        return _raw_shape(self.kl, s) / self._peak / self.scale


def beam_mode(spec: BeamSpec, mode: int = 1, normalization: str = "max",
              n_points: int = 2001) -> ModeResult:
    """In-plane flexural mode of a doubly clamped beam under pure bending.

    ``normalization`` fixes what the displacement coordinate means: unit
    maximum deflection ("max"), unit mean deflection over the beam ("com"),
    or unit mean deflection over the electrode ("electrode"). The effective
    mass and zero-point motion follow the chosen convention.
    """
    if mode not in MODE_CONSTANTS:
        raise ConfigError(f"unsupported mode index {mode!r}; expected one of {sorted(MODE_CONSTANTS)}")
    if normalization not in NORMALIZATIONS:
        raise ConfigError(f"normalization must be one of {NORMALIZATIONS}, got {normalization!r}")
    if n_points < 1001:
        raise ConfigError("quadrature needs at least 1001 points")
    if n_points % 2 == 0:
        n_points += 1
    a = MODE_CONSTANTS[mode]
    omega = a * a * spec.w / spec.L ** 2 * math.sqrt(spec.youngs_E / (12 * spec.rho)) / (2 * math.pi)

    kl = _clamped_root(mode)
    z = np.linspace(-spec.L / 2, spec.L / 2, n_points)
    raw = _raw_shape(kl, z / spec.L + 0.5)
    peak = raw[np.argmax(np.abs(raw))]
    u_max = raw / peak

    if normalization == "max":
        scale = 1.0
    elif normalization == "com":
        scale = float(simpson(u_max, x=z) / spec.L)
    else:
        ze = np.linspace(-spec.L_e / 2, spec.L_e / 2, n_points)
        scale = float(simpson(_raw_shape(kl, ze / spec.L + 0.5) / peak, x=ze) / spec.L_e)
    if abs(scale) < 1e-9:
        raise ConfigError(f"normalization {normalization!r} is undefined for mode {mode} (zero mean deflection)")

    u = u_max / scale
    alpha = float(simpson(u * u, x=z) / spec.L)
    m_eff = alpha * spec.rho * spec.w * spec.L * spec.t
    x_zp = math.sqrt(HBAR / (2 * m_eff * 2 * math.pi * omega))
    return ModeResult(mode, omega, alpha, m_eff, x_zp, z, u, normalization, scale,
                      spec.L, kl, float(peak))


# --- electrostatics and couplings -------------------------------------------

@dataclass(frozen=True)
class CapacitanceGradient:
    dCdx: float
    C_NR_pp: float


def capacitance_gradient(spec: BeamSpec, mode: ModeResult, n_points: int = 2001) -> CapacitanceGradient:
    """Parallel-plate dC/dx = beta * eps0 t / d^2 * int_{-L_e/2}^{L_e/2} U(z) dz."""
    if n_points % 2 == 0:
        n_points += 1
    ze = np.linspace(-spec.L_e / 2, spec.L_e / 2, n_points)
    overlap = float(simpson(mode.shape(ze), x=ze))
    dcdx = spec.beta * EPS0 * spec.t / spec.d ** 2 * overlap
    return CapacitanceGradient(dcdx, EPS0 * spec.t * spec.L_e / spec.d)


def coupling_lambda(E_C: float, dCdx: float, V_NR: float, x_zp: float) -> float:
    """lambda/2pi = -4 (E_C/h) dC/dx (V_NR/e) x_zp, in Hz."""
    return -4.0 * E_C * dCdx * V_NR / E_CHARGE * x_zp


def lambda_max(E_C: float, omega_NR: float, C_NR: float, beta: float = 1.0) -> float:
    """Magnitude of the maximal flexural coupling, in Hz (the coupling itself is negative)."""
    if not 0 < beta <= 1:
        raise ConfigError(f"beta must lie in (0, 1], got {beta}")
    return 8.0 * E_C * math.sqrt(beta * H * omega_NR * C_NR / (27.0 * E_CHARGE ** 2))


def lambda_lc(E_C: float, C_Q: float, omega_LC: float, C_T: float) -> float:
    """Qubit/LC coupling (4 E_C/h) C_Q V_zp / e with V_zp = sqrt(h f_LC / 2 C_T), in Hz."""
    v_zp = math.sqrt(H * omega_LC / (2.0 * C_T))
    return 4.0 * E_C * C_Q * v_zp / E_CHARGE


def pullin_voltage(k_eff: float, d: float, C_NR: float) -> float:
    return math.sqrt(8.0 * k_eff * d * d / (27.0 * C_NR))


@dataclass(frozen=True)
class DampingResult:
    Gamma: float
    T1: float
    T2_max: float


def radiative_damping(delta_E: float, circuit: BiasCircuit) -> DampingResult:
    """Radiative decay through the bias line, Gamma = dE^2 C_NR^2 Z0 / (hbar^2 C_CPB)."""
    e = H * delta_E
    gamma = e * e * circuit.C_NR ** 2 * circuit.Z0 / (HBAR ** 2 * circuit.C_CPB)
    if gamma == 0.0:
        return DampingResult(0.0, math.inf, math.inf)
    return DampingResult(gamma, 1.0 / gamma, 2.0 / gamma)


def thermal_occupation(omega: float, T: float) -> float:
    """Bose-Einstein occupation of a mode at frequency ``omega`` (Hz) and temperature T (K)."""
    if omega <= 0:
        raise ConfigError(f"omega must be > 0, got {omega!r}")
    if T < 0:
        raise ConfigError(f"T must be >= 0, got {T!r}")
    if T == 0:
        return 0.0
    return 1.0 / math.expm1(H * omega / (K_B * T))


def design_report(spec: BeamSpec, circuit: BiasCircuit, E_C: float, temperature: float,
                  omega_LC: float, delta_E: float, mode: int = 1) -> dict:
    """All design figures for one beam, bias circuit and qubit."""
    m = beam_mode(spec, mode)
    grad = capacitance_gradient(spec, m)
    damping = radiative_damping(delta_E, circuit)
    return {
        "omega_NR": m.omega,
        "alpha": m.alpha,
        "m_eff": m.m_eff,
        "k_eff": m.k_eff,
        "x_zp": m.x_zp,
        "dCdx": grad.dCdx,
        "C_NR_pp": grad.C_NR_pp,
        "lambda": coupling_lambda(E_C, grad.dCdx, circuit.V_NR, m.x_zp),
        "lambda_max": lambda_max(E_C, m.omega, circuit.C_NR, spec.beta),
        "lambda_LC": lambda_lc(E_C, circuit.C_Q, omega_LC, circuit.C_T),
        "V_Sn": pullin_voltage(m.k_eff, spec.d, circuit.C_NR),
        "Gamma": damping.Gamma,
        "T1": damping.T1,
        "T2_max": damping.T2_max,
        "N_TH": thermal_occupation(m.omega, temperature),
    }


DESIGN_UNITS = {
    "omega_NR": "Hz", "alpha": "1", "m_eff": "kg", "k_eff": "N/m", "x_zp": "m", "dCdx": "F/m",
    "C_NR_pp": "F", "lambda": "Hz", "lambda_max": "Hz", "lambda_LC": "Hz", "V_Sn": "V",
    "Gamma": "1/s", "T1": "s", "T2_max": "s", "N_TH": "1",
}
