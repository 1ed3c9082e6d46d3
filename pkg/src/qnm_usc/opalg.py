"""Dense operators on the truncated cavity (x) TLS / matter Hilbert space.

Ordering convention, used everywhere in the package: the cavity factor comes
first and the TLS (or matter boson) factor second, so a product state
|n> (x) |s> sits at index ``n * dim_second + s``.  The TLS basis is ordered
(|e>, |g>), which makes sigma_z = diag(+1, -1) and sigma_x = |e><g| + |g><e|.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import InvalidDimensionError, NonHermitianError

OperatorMatrix = np.ndarray

HERMITIAN_RTOL = 1e-10

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _frozen(m: np.ndarray) -> np.ndarray:
    m.flags.writeable = False
    return m


def annihilation(n_fock: int) -> OperatorMatrix:
    """Bosonic lowering operator truncated to ``n_fock`` Fock states."""
    if int(n_fock) != n_fock or n_fock < 2:
        raise InvalidDimensionError(f"n_fock must be an integer >= 2, got {n_fock!r}")
    n_fock = int(n_fock)
    a = np.diag(np.sqrt(np.arange(1, n_fock, dtype=float)), k=1).astype(complex)
    return _frozen(a)


def creation(n_fock: int) -> OperatorMatrix:
    return _frozen(annihilation(n_fock).conj().T.copy())


def number(n_fock: int) -> OperatorMatrix:
    return _frozen(np.diag(np.arange(n_fock, dtype=float)).astype(complex))


def identity(dim: int) -> OperatorMatrix:
    if dim < 1:
        raise InvalidDimensionError(f"dim must be >= 1, got {dim}")
    return _frozen(np.eye(dim, dtype=complex))


def pauli(axis: str) -> OperatorMatrix:
    try:
        return _frozen(_PAULI[axis].copy())
    except KeyError:
        raise ValueError(f"unknown Pauli axis {axis!r}; expected 'x', 'y' or 'z'") from None


def sigma_minus() -> OperatorMatrix:
    """|g><e| in the (|e>, |g>) ordering."""
    return _frozen(np.array([[0, 0], [1, 0]], dtype=complex))


def kron(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    return _frozen(np.kron(a, b))


def hermiticity_violation(h: OperatorMatrix) -> float:
    """max|h - h^dagger| relative to max|h| (0 for the zero matrix)."""
    scale = np.max(np.abs(h)) if h.size else 0.0
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(h - h.conj().T)) / scale)


def check_hermitian(h: OperatorMatrix, rtol: float = HERMITIAN_RTOL) -> None:
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise InvalidDimensionError(f"expected a square matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise NonHermitianError("matrix has non-finite entries", float("inf"))
    v = hermiticity_violation(h)
    if v > rtol:
        raise NonHermitianError(
            f"matrix is not Hermitian: max|H - H^dag| / max|H| = {v:.3e} > {rtol:.1e}", v
        )


def hermitian_function(h: OperatorMatrix, f: Callable[[np.ndarray], np.ndarray]) -> OperatorMatrix:
    """Spectral calculus U f(Lambda) U^dagger for Hermitian ``h``."""
    check_hermitian(h)
    h = np.asarray(h, dtype=complex)
    evals, u = np.linalg.eigh(0.5 * (h + h.conj().T))
    fvals = np.asarray(f(evals))
    out = (u * fvals) @ u.conj().T
    if np.isrealobj(fvals):
        out = 0.5 * (out + out.conj().T)
    return _frozen(out)


def dagger(op: OperatorMatrix) -> OperatorMatrix:
    return op.conj().T
