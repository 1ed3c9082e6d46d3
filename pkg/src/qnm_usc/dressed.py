"""Dressed-state basis and the transition list alpha = (j, k), w_k > w_j."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import opalg
from .hamiltonian import dipole_gauge_shifted_a  # noqa: F401  (re-exported)

DEFAULT_KEEP_TLS = 24
DEFAULT_KEEP_HOPFIELD = 30
DROP_TOL = 1e-10
OMEGA_FLOOR = 1e-9


@dataclass(frozen=True)
class DressedSystem:
    """All eigenpairs of H, energies shifted so the ground state sits at 0.

    Only the lowest ``keep`` levels enter transition enumeration; the rest are
    retained for truncation checks.
    """

    energies: np.ndarray
    states: np.ndarray
    keep: int
    ground_offset: float = 0.0

    @property
    def dim(self) -> int:
        return self.energies.size

    @property
    def kept_energies(self) -> np.ndarray:
        return self.energies[: self.keep]

    def to_dressed(self, op: np.ndarray) -> np.ndarray:
        """<j|op|k> for kept j, k."""
        u = self.states[:, : self.keep]
        return u.conj().T @ np.asarray(op) @ u


def diagonalize(h: np.ndarray, keep: int) -> DressedSystem:
    opalg.check_hermitian(h)
    h = np.asarray(h, dtype=complex)
    d = h.shape[0]
    if not 2 <= keep <= d:
        raise ValueError(f"keep must satisfy 2 <= keep <= {d}, got {keep}")
    evals, evecs = np.linalg.eigh(0.5 * (h + h.conj().T))
    e0 = evals[0]
    return DressedSystem(evals - e0, evecs, int(keep), float(e0))


@dataclass(frozen=True)
class TransitionSet:
    """Positive-frequency transitions among the kept dressed levels.

    ``c_a`` holds elements of whichever operator couples to the reservoir
    (the bath operator Pi; the cavity annihilation operator by default).
    """

    j: np.ndarray
    k: np.ndarray
    omega: np.ndarray
    c_a: np.ndarray
    c_det: np.ndarray
    c_drive: np.ndarray
    dim: int

    def __len__(self) -> int:
        return self.omega.size

    def lowering(self, which: str = "c_a", weights=None) -> np.ndarray:
        """sum_alpha w_alpha c_alpha |j><k| as a dim x dim matrix."""
        c = getattr(self, which)
        if weights is not None:
            c = c * weights
        out = np.zeros((self.dim, self.dim), dtype=complex)
        np.add.at(out, (self.j, self.k), c)
        return out


def transitions(ds: DressedSystem, ops: dict, drop_tol: float = DROP_TOL,
                omega_floor: float = OMEGA_FLOOR) -> TransitionSet:
    """Enumerate j < k among kept levels with w_k - w_j > omega_floor.

    ``ops`` maps any of 'a_op', 'det_op', 'drive_op' to full-space operators;
    missing entries give zero elements.
    """
    unknown = set(ops) - {"a_op", "det_op", "drive_op"}
    if unknown:
        raise ValueError(f"unknown operator keys {sorted(unknown)}")
    m = ds.keep
    e = ds.kept_energies
    jj, kk = np.triu_indices(m, k=1)
    om = e[kk] - e[jj]
    elems = {}
    for key in ("a_op", "det_op", "drive_op"):
        op = ops.get(key)
        elems[key] = np.zeros(jj.size, complex) if op is None else ds.to_dressed(op)[jj, kk]
    mag = np.maximum.reduce([np.abs(v) for v in elems.values()])
    sel = (om > omega_floor) & (mag > drop_tol)
    return TransitionSet(jj[sel], kk[sel], om[sel], elems["a_op"][sel],
                         elems["det_op"][sel], elems["drive_op"][sel], m)


def detection_operator(a_op: np.ndarray, eta_c: complex) -> np.ndarray:
    """x_det = i eta a - i eta^* a^dag (full space)."""
    eta = complex(eta_c)
    a_op = np.asarray(a_op)
    return 1j * eta * a_op - 1j * eta.conjugate() * a_op.conj().T


def detection_operator_elements(ds: DressedSystem, eta_c: complex, a_op: np.ndarray | None = None,
                                pairs: tuple[np.ndarray, np.ndarray] | None = None) -> np.ndarray:
    """c^det_alpha = <j| i eta a - i eta^* a^dag |k> for kept pairs.

    ``a_op`` defaults to the cavity operator of a cavity (x) TLS space; pass
    ``pairs=(j, k)`` to match an existing TransitionSet.
    """
    if a_op is None:
        n_fock = ds.dim // 2
        from .hamiltonian import cavity_annihilation
        a_op = cavity_annihilation(n_fock)
    x = ds.to_dressed(detection_operator(a_op, eta_c))
    if pairs is None:
        pairs = np.triu_indices(ds.keep, k=1)
    return x[pairs]
