"""Hot inner loops: dense composite-matrix assembly and Lorentzian accumulation.

Each kernel has a numba ``@njit`` implementation and a pure-numpy twin with
identical semantics. The numba path is used when numba imports and the
environment variable ``QEMSIM_DISABLE_NUMBA`` is unset (or falsy); the
selection happens once, at import.
"""
from __future__ import annotations

import os

import numpy as np

_FALSY = {"", "0", "false", "no", "off"}
DISABLED_BY_ENV = os.environ.get("QEMSIM_DISABLE_NUMBA", "").strip().lower() not in _FALSY

try:
    import numba
except ImportError:  # pragma: no cover - numba is optional
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and not DISABLED_BY_ENV
BACKEND = "numba" if USE_NUMBA else "numpy"


# --- composite Hamiltonian -------------------------------------------------

def composite_matrix_numpy(charge_diag, hop, coupling_diag, omega, n_fock):
    """Dense H = H_q (x) 1 + 1 (x) omega(a^+a + 1/2) + diag(coupling_diag) (x) (a + a^+).

    ``charge_diag`` and ``hop`` describe the tridiagonal qubit block (``hop`` is
    the (q, q+1) element). ``coupling_diag`` already carries the factor lambda.
    """
    nq = charge_diag.shape[0]
    nk = n_fock + 1
    hq = np.diag(charge_diag) + np.diag(np.full(nq - 1, hop), 1) + np.diag(np.full(nq - 1, hop), -1)
    k = np.arange(nk, dtype=np.float64)
    x = np.diag(np.sqrt(k[1:]), 1)
    x = x + x.T
    h = np.kron(hq, np.eye(nk))
    h += np.kron(np.eye(nq), np.diag(omega * (k + 0.5)))
    h += np.kron(np.diag(coupling_diag), x)
    return h


def _composite_matrix_loops(charge_diag, hop, coupling_diag, omega, n_fock):
    nq = charge_diag.shape[0]
    nk = n_fock + 1
    dim = nq * nk
    h = np.zeros((dim, dim))
    for q in range(nq):
        for k in range(nk):
            i = q * nk + k
            h[i, i] = charge_diag[q] + omega * (k + 0.5)
            if k + 1 < nk:
                v = coupling_diag[q] * np.sqrt(k + 1.0)
                h[i, i + 1] = v
                h[i + 1, i] = v
            if q + 1 < nq:
                j = i + nk
                h[i, j] = hop
                h[j, i] = hop
    return h


# --- linear response ---------------------------------------------------------

def lorentz_response_numpy(omega_grid, freqs, weights, eta, chunk=4096):
    """Absorption sum and complex susceptibility on ``omega_grid``.

    absorption(w) = sum_t weights_t * eta^2 / ((w - freqs_t)^2 + eta^2)
    suscept(w)    = sum_t weights_t / (freqs_t - w - i*eta)
    """
    n = omega_grid.shape[0]
    absorption = np.zeros(n)
    re = np.zeros(n)
    im = np.zeros(n)
    eta2 = eta * eta
    for start in range(0, freqs.shape[0], chunk):
        f = freqs[start:start + chunk]
        w = weights[start:start + chunk]
        det = f[None, :] - omega_grid[:, None]
        den = det * det + eta2
        absorption += (w * eta2 / den).sum(axis=1)
        re += (w * det / den).sum(axis=1)
        im += (w * eta / den).sum(axis=1)
    return absorption, re + 1j * im


def _lorentz_response_loops(omega_grid, freqs, weights, eta):
    n = omega_grid.shape[0]
    absorption = np.zeros(n)
    re = np.zeros(n)
    im = np.zeros(n)
    eta2 = eta * eta
    for j in range(n):
        w0 = omega_grid[j]
        a = 0.0
        r = 0.0
        s = 0.0
        for t in range(freqs.shape[0]):
            det = freqs[t] - w0
            den = det * det + eta2
            wt = weights[t] / den
            a += wt * eta2
            r += wt * det
            s += wt * eta
        absorption[j] = a
        re[j] = r
        im[j] = s
    return absorption, re + 1j * im


if HAVE_NUMBA:
    composite_matrix_numba = numba.njit(cache=True)(_composite_matrix_loops)
    lorentz_response_numba = numba.njit(cache=True)(_lorentz_response_loops)
else:  # pragma: no cover
    composite_matrix_numba = None
    lorentz_response_numba = None


def composite_matrix(charge_diag, hop, coupling_diag, omega, n_fock):
    charge_diag = np.ascontiguousarray(charge_diag, dtype=np.float64)
    coupling_diag = np.ascontiguousarray(coupling_diag, dtype=np.float64)
    if USE_NUMBA:
        return composite_matrix_numba(charge_diag, float(hop), coupling_diag, float(omega), int(n_fock))
    return composite_matrix_numpy(charge_diag, float(hop), coupling_diag, float(omega), int(n_fock))


def lorentz_response(omega_grid, freqs, weights, eta):
    omega_grid = np.ascontiguousarray(omega_grid, dtype=np.float64)
    freqs = np.ascontiguousarray(freqs, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    if USE_NUMBA:
        return lorentz_response_numba(omega_grid, freqs, weights, float(eta))
    return lorentz_response_numpy(omega_grid, freqs, weights, float(eta))
