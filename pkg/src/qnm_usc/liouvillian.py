"""Dressed-basis Born-Markov master equation: assembly and steady state.

Density matrices are vectorized row-major, vec(rho)[a*M + b] = rho[a, b].

Normalization: the channel for transition alpha relaxes populations at
Gamma_alpha = 2 pi |c_alpha|^2 Lambda^2(w_alpha), so an empty cavity decays at
kappa_c and a pump with Lambda_inc^2 = (gamma_inc/kappa_c) kappa_c/2pi at
w_c excites at gamma_inc.
"""
from __future__ import annotations

import enum
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels
from .dressed import TransitionSet
from .errors import DegenerateSteadyStateError, NegativeRateError, InvalidDimensionError
from .qnm import QnmParams, SpectralDensityModel, spectral_density

log = logging.getLogger(__name__)

PSD_TOL = 1e-8
NULL_RTOL = 1e-10


class BathCoupling(enum.Enum):
    """Cavity operator Pi coupled to the reservoir."""

    A = "a"
    Q = "Q"
    P = "P"
    Q_PLUS_P = "Q+P"
    Q_MINUS_P = "Q-P"

    def operator(self, a: np.ndarray) -> np.ndarray:
        ad = a.conj().T
        q = a + ad
        p = 1j * (ad - a)
        return {
            BathCoupling.A: a,
            BathCoupling.Q: q,
            BathCoupling.P: p,
            BathCoupling.Q_PLUS_P: (q + p) / math.sqrt(2.0),
            BathCoupling.Q_MINUS_P: (q - p) / math.sqrt(2.0),
        }[self]

    @classmethod
    def parse(cls, s: str | "BathCoupling") -> "BathCoupling":
        if isinstance(s, cls):
            return s
        key = str(s).strip().replace(" ", "")
        aliases = {"a": cls.A, "A": cls.A, "Q": cls.Q, "P": cls.P, "Q+P": cls.Q_PLUS_P,
                   "QplusP": cls.Q_PLUS_P, "Qquad": cls.Q, "Pquad": cls.P, "Q-P": cls.Q_MINUS_P, "QminusP": cls.Q_MINUS_P}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown bath coupling operator {s!r}") from None


class NegativeRatePolicy(enum.Enum):
    REJECT = "reject"
    CLAMP_ZERO = "clamp"
    ALLOW = "allow"


@dataclass
class SuperTerm:
    matrix: np.ndarray
    label: str
    warnings: list[str] = field(default_factory=list)


@dataclass
class Liouvillian:
    dim: int
    matrix: np.ndarray
    metadata: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return (self.matrix @ np.asarray(rho).reshape(-1)).reshape(self.dim, self.dim)


@dataclass
class SteadyState:
    rho: np.ndarray
    min_eigenvalue: float
    warnings: list[str] = field(default_factory=list)

    @property
    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.rho))


def _police_rates(lam2: np.ndarray, omegas: np.ndarray, policy: NegativeRatePolicy, term: SuperTerm):
    bad = lam2 < 0
    if not np.any(bad):
        return lam2
    if policy is NegativeRatePolicy.REJECT:
        w = np.sort(omegas[bad])
        shown = np.array2string(w[:6], precision=5) + (" ..." if w.size > 6 else "")
        raise NegativeRateError(
            f"unphysical negative decay rates on {w.size} transition(s) (single-mode approximation "
            f"breaks down); lowest transition energies {shown} eV",
            omegas[bad],
        )
    if policy is NegativeRatePolicy.CLAMP_ZERO:
        msg = f"clamped {int(bad.sum())} negative spectral-density values to zero"
        term.warnings.append(msg)
        warnings.warn(msg, RuntimeWarning)
        return np.where(bad, 0.0, lam2)
    term.warnings.append(f"{int(bad.sum())} negative spectral-density values kept (policy=allow)")
    return lam2


def _secular_super(m: int, ts: TransitionSet, rates: np.ndarray, which: str) -> np.ndarray:
    """sum_alpha r_alpha (sigma rho sigma^+ - sigma^+ sigma rho) + h.c., r = pi w |c|^2."""
    c = getattr(ts, which)
    r = rates * np.abs(c) ** 2
    out = np.zeros((m * m, m * m), dtype=complex)
    idx = np.arange(m)
    for j, k, ra in zip(ts.j, ts.k, r):
        out[j * m + j, k * m + k] += 2.0 * ra
        out[k * m + idx, k * m + idx] -= ra
        out[idx * m + k, idx * m + k] -= ra
    return out


def dissipator(ts: TransitionSet, sd: SpectralDensityModel | Callable, secular: bool = False,
               policy: NegativeRatePolicy = NegativeRatePolicy.REJECT) -> SuperTerm:
    """Cavity-loss dissipator built from the bath-operator elements ``ts.c_a``."""
    term = SuperTerm(np.zeros((ts.dim ** 2,) * 2, complex), "loss")
    if len(ts) == 0:
        return term
    lam2 = np.atleast_1d(sd(ts.omega) if callable(sd) else spectral_density(sd, ts.omega))
    lam2 = _police_rates(np.asarray(lam2, float), ts.omega, NegativeRatePolicy(policy), term)
    rates = math.pi * lam2
    if secular:
        term.matrix = _secular_super(ts.dim, ts, rates, "c_a")
    else:
        y = ts.lowering("c_a", rates)
        x = ts.lowering("c_a")
        term.matrix = _kernels.dissipator_super(y, x)
    return term


def cavity_pump_density(p: QnmParams) -> Callable:
    """Lambda_inc^2(w) = kappa_c w_c / (2 pi w)."""
    return lambda w: p.kappa_c * p.omega_c / (2.0 * math.pi * np.asarray(w))


def matter_pump_density(p: QnmParams) -> Callable:
    """Lambda_inc^2(w) = kappa_c w^2 / (2 pi w_c^2)."""
    return lambda w: p.kappa_c * np.asarray(w) ** 2 / (2.0 * math.pi * p.omega_c ** 2)


def incoherent_pump(ts: TransitionSet, p: QnmParams, strength: float, target: str = "cavity",
                    rate_model: Callable | None = None, secular: bool = False) -> SuperTerm:
    """Raising-operator pump on the elements ``ts.c_drive``.

    ``strength`` is gamma_inc / kappa_c; the rate model defaults to the
    cavity (1/w) or matter (w^2) form according to ``target``.
    """
    if target not in ("cavity", "matter"):
        raise ValueError(f"unknown pump target {target!r}; expected 'cavity' or 'matter'")
    term = SuperTerm(np.zeros((ts.dim ** 2,) * 2, complex), f"pump:{target}")
    if strength == 0 or len(ts) == 0:
        return term
    if rate_model is None:
        rate_model = cavity_pump_density(p) if target == "cavity" else matter_pump_density(p)
    rates = math.pi * strength * np.asarray(rate_model(ts.omega), float)
    if np.any(rates < 0):
        raise NegativeRateError("incoherent pump spectral density is negative", ts.omega[rates < 0])
    if secular:
        # raising channels |k><j|: swap the roles of j and k
        flipped = TransitionSet(ts.k, ts.j, ts.omega, ts.c_a, ts.c_det, ts.c_drive.conj(), ts.dim)
        term.matrix = _secular_super(ts.dim, flipped, rates, "c_drive")
    else:
        y = ts.lowering("c_drive", rates).conj().T
        x = ts.lowering("c_drive").conj().T
        term.matrix = _kernels.dissipator_super(y, x)
    return term


def assemble(energies: np.ndarray, terms: list[SuperTerm], metadata: dict | None = None) -> Liouvillian:
    """L = -i[diag(E), .] + sum of terms."""
    e = np.asarray(energies, float)
    m = e.size
    lmat = np.diag((-1j * (e[:, None] - e[None, :])).reshape(-1))
    warns = []
    for t in terms:
        if t.matrix.shape != (m * m, m * m):
            raise InvalidDimensionError(
                f"term {t.label!r} has shape {t.matrix.shape}, expected {(m * m, m * m)}")
        lmat = lmat + t.matrix
        warns.extend(t.warnings)
    return Liouvillian(m, lmat, dict(metadata or {}), warns)


def steady_state(l: Liouvillian, null_rtol: float = NULL_RTOL, check_unique: bool = True) -> SteadyState:
    """Solve L(rho) = 0 with Tr rho = 1 (bordered system)."""
    m = l.dim
    lm = l.matrix
    if check_unique:
        sv = np.linalg.svd(lm, compute_uv=False)
        null_dim = int(np.sum(sv <= null_rtol * sv[0]))
        if null_dim > 1:
            raise DegenerateSteadyStateError(
                f"Liouvillian null space has dimension {null_dim}: disconnected sectors "
                "(lower omega_floor or add a pump)", null_dim)
    a = lm.copy()
    a[0, :] = 0.0
    a[0, np.arange(m) * (m + 1)] = 1.0
    rhs = np.zeros(m * m, complex)
    rhs[0] = 1.0
    rho = np.linalg.solve(a, rhs).reshape(m, m)
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real
    lmin = float(np.linalg.eigvalsh(rho)[0])
    warns = []
    if lmin < -PSD_TOL:
        msg = f"steady state has negative eigenvalue {lmin:.3e} (non-secular generator)"
        warns.append(msg)
        log.warning(msg)
    return SteadyState(rho, lmin, warns)
