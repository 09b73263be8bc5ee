"""Least-squares fits of resonator traces (Lorentzian peak/dip or hanger notch)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import uniform_filter1d
from scipy.optimize import least_squares

from .errors import FitError

MODELS = ("lorentzian", "hanger")


@dataclass(frozen=True)
class ResonanceFit:
    f0: float
    Q_L: float
    Q_i: float
    residual_norm: float
    Q_c: float = math.inf
    model: str = "hanger"
    scale: float = 1.0


def hanger_s21(f, f0, Q_L, Q_c, scale=1.0):
    """|S21| of a notch-type resonator: scale * |1 - (Q_L/Q_c) / (1 + 2i Q_L (f - f0)/f0)|."""
    x = (np.asarray(f, dtype=np.float64) - f0) / f0
    return scale * np.abs(1.0 - (Q_L / Q_c) / (1.0 + 2j * Q_L * x))


def lorentzian(f, f0, kappa, A0, B=0.0):
    hw2 = (0.5 * kappa) ** 2
    return A0 * hw2 / ((np.asarray(f, dtype=np.float64) - f0) ** 2 + hw2) + B


def _half_width(f, y, i0, level):
    """Full width of the excursion around index ``i0`` at ``level`` (y is an excursion > 0)."""
    left = i0
    while left > 0 and y[left] > level:
        left -= 1
    right = i0
    while right < y.size - 1 and y[right] > level:
        right += 1
    return f[right] - f[left]


def _smooth(y):
    # Initial guesses only; the fit itself sees raw data.
    return uniform_filter1d(y, size=max(1, y.size // 200), mode="nearest")


def _fit_hanger(f, y):
    baseline = float(np.median(np.concatenate([y[: max(2, y.size // 20)], y[-max(2, y.size // 20):]])))
    yn = y / baseline
    ys = _smooth(yn)
    i0 = int(np.argmin(ys))
    f0 = f[i0]
    depth = min(max(1.0 - ys[i0], 1e-6), 0.999)
    power_dip = 1.0 - ys ** 2
    fwhm = _half_width(f, power_dip, i0, 0.5 * power_dip[i0])
    fwhm = max(fwhm, f[1] - f[0])
    q_l = f0 / fwhm
    q_c = q_l / depth
    x0 = np.array([1.0, 0.0, math.log(q_l), math.log(q_c)])

    def resid(p):
        return hanger_s21(f, f0 + p[1] * fwhm, math.exp(p[2]), math.exp(p[3]), p[0]) - yn

    sol = least_squares(resid, x0, method="lm", x_scale=1e-2, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=4000)
    if not sol.success:
        raise FitError(f"hanger fit did not converge: {sol.message}")
    scale, df, lq_l, lq_c = sol.x
    q_l, q_c = math.exp(lq_l), math.exp(lq_c)
    inv_qi = 1.0 / q_l - 1.0 / q_c
    q_i = 1.0 / inv_qi if inv_qi > 0 else math.inf
    return ResonanceFit(float(f0 + df * fwhm), q_l, q_i, float(np.linalg.norm(sol.fun) * baseline),
                        q_c, "hanger", float(scale * baseline))


def _fit_lorentzian(f, y):
    edge = max(2, y.size // 20)
    b0 = float(np.median(np.concatenate([y[:edge], y[-edge:]])))
    dev = _smooth(y) - b0
    i0 = int(np.argmax(np.abs(dev)))
    sign = math.copysign(1.0, dev[i0])
    span = abs(dev[i0])
    exc = sign * dev / span
    fwhm = max(_half_width(f, exc, i0, 0.5), f[1] - f[0])
    f0 = f[i0]
    yn = y / span
    x0 = np.array([0.0, math.log(fwhm / f0), sign, b0 / span])

    def resid(p):
        return lorentzian(f, f0 + p[0] * fwhm, f0 * math.exp(p[1]), p[2], p[3]) - yn

    sol = least_squares(resid, x0, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=4000)
    if not sol.success:
        raise FitError(f"lorentzian fit did not converge: {sol.message}")
    df, lk, a0, _ = sol.x
    kappa = float(f0) * math.exp(lk)
    fc = f0 + df * fwhm
    return ResonanceFit(float(fc), float(fc / kappa), math.inf, float(np.linalg.norm(sol.fun) * span),
                        math.inf, "lorentzian", float(a0 * span))


def fit_resonance(omega, amplitude, model: str = "hanger") -> ResonanceFit:
    """Fit a magnitude trace and return f0, loaded and intrinsic Q.

    ``Q_i`` follows from 1/Q_L = 1/Q_i + 1/Q_c for the hanger model; the
    Lorentzian model carries no coupling information and reports Q_i = inf.
    """
    if model not in MODELS:
        raise FitError(f"unknown model {model!r}; expected one of {MODELS}")
    f = np.asarray(omega, dtype=np.float64)
    y = np.asarray(amplitude, dtype=np.float64)
    if f.shape != y.shape or f.ndim != 1:
        raise FitError("trace must be two equal-length 1-D arrays")
    if f.size < 10:
        raise FitError(f"need at least 10 points, got {f.size}")
    if not np.all(np.isfinite(f)) or not np.all(np.isfinite(y)):
        raise FitError("trace contains non-finite values")
    order = np.argsort(f, kind="stable")
    f, y = f[order], y[order]
    spread = y.max() - y.min()
    if spread <= 1e-12 * max(abs(y.max()), 1e-300):
        raise FitError("trace is flat; nothing to fit")
    result = _fit_hanger(f, y) if model == "hanger" else _fit_lorentzian(f, y)
    if not f[0] <= result.f0 <= f[-1]:
        raise FitError(f"fitted f0={result.f0:.6g} lies outside the trace span")
    if f[-1] - f[0] < 3 * result.f0 / result.Q_L:
        raise FitError("trace spans fewer than 3 linewidths")
    return result
