"""Hot loops, with a numba path and a pure-numpy fallback.

Set ``QNM_USC_DISABLE_NUMBA=1`` to force the numpy implementations (or when
numba is not importable).  Both paths are always importable so that the
benchmark and the tests can compare them.
"""
from __future__ import annotations

import os

import numpy as np
from scipy.linalg import solve_triangular

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

DISABLE_ENV = "QNM_USC_DISABLE_NUMBA"
USE_NUMBA = numba is not None and os.environ.get(DISABLE_ENV, "0").lower() not in ("1", "true", "yes")
BACKEND = "numba" if USE_NUMBA else "numpy"


def _njit(fn):
    if numba is None:  # pragma: no cover
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


# -- dissipator superoperator -------------------------------------------------
# D(rho) = Y rho X^+ + X rho Y^+ - X^+ Y rho - rho Y^+ X, acting on row-major vec(rho).

def dissipator_super_numpy(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    m = y.shape[0]
    eye = np.eye(m)
    xy = x.conj().T @ y
    yx = y.conj().T @ x
    return (np.kron(y, x.conj()) + np.kron(x, y.conj())
            - np.kron(xy, eye) - np.kron(eye, yx.T))


def _dissipator_super_loops(y, x):
    m = y.shape[0]
    xy = np.zeros((m, m), dtype=np.complex128)
    yx = np.zeros((m, m), dtype=np.complex128)
    for i in range(m):
        for j in range(m):
            s1 = 0j
            s2 = 0j
            for k in range(m):
                s1 += np.conj(x[k, i]) * y[k, j]
                s2 += np.conj(y[k, i]) * x[k, j]
            xy[i, j] = s1
            yx[i, j] = s2
    out = np.zeros((m * m, m * m), dtype=np.complex128)
    for a in range(m):
        for c in range(m):
            yac = y[a, c]
            xac = x[a, c]
            if yac == 0 and xac == 0:
                continue
            for b in range(m):
                row = a * m + b
                for d in range(m):
                    out[row, c * m + d] += yac * np.conj(x[b, d]) + xac * np.conj(y[b, d])
    for a in range(m):
        for b in range(m):
            row = a * m + b
            for c in range(m):
                out[row, c * m + b] -= xy[a, c]
            for d in range(m):
                out[row, a * m + d] -= yx[d, b]
    return out


dissipator_super_numba = _njit(_dissipator_super_loops)


# -- resolvent sweep over an upper-triangular (Schur) factor ------------------
# For each w: solve (T + i w) y = v by back substitution, return Re(-u . y).

def resolvent_sweep_numpy(t: np.ndarray, v: np.ndarray, u: np.ndarray, omegas: np.ndarray) -> np.ndarray:
    n = t.shape[0]
    out = np.empty(omegas.size)
    eye = np.eye(n)
    for i, w in enumerate(omegas):
        y = solve_triangular(t + 1j * w * eye, v, lower=False, check_finite=False)
        out[i] = np.real(-(u @ y))
    return out


def _resolvent_sweep_loops(t, v, u, omegas):
    n = t.shape[0]
    nw = omegas.size
    out = np.empty(nw)
    y = np.empty(n, dtype=np.complex128)
    for iw in range(nw):
        shift = 1j * omegas[iw]
        for i in range(n - 1, -1, -1):
            s = v[i]
            for k in range(i + 1, n):
                s -= t[i, k] * y[k]
            y[i] = s / (t[i, i] + shift)
        acc = 0j
        for i in range(n):
            acc += u[i] * y[i]
        out[iw] = -acc.real
    return out


resolvent_sweep_numba = _njit(_resolvent_sweep_loops)


def dissipator_super(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    y = np.ascontiguousarray(y, dtype=np.complex128)
    x = np.ascontiguousarray(x, dtype=np.complex128)
    if USE_NUMBA:
        return dissipator_super_numba(y, x)
    return dissipator_super_numpy(y, x)


def resolvent_sweep(t: np.ndarray, v: np.ndarray, u: np.ndarray, omegas: np.ndarray) -> np.ndarray:
    t = np.ascontiguousarray(t, dtype=np.complex128)
    v = np.ascontiguousarray(v, dtype=np.complex128)
    u = np.ascontiguousarray(u, dtype=np.complex128)
    omegas = np.ascontiguousarray(omegas, dtype=np.float64)
    if USE_NUMBA:
        return resolvent_sweep_numba(t, v, u, omegas)
    return resolvent_sweep_numpy(t, v, u, omegas)
