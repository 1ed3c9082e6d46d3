"""Closed-form Bloch-Siegert results for the resonant (w0 = wc) TLS-cavity system."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .qnm import QnmParams


@dataclass(frozen=True)
class BsResult:
    e_minus: float
    e_plus: float
    gamma_minus: float
    gamma_plus: float


def bs_energies(omega0: float, eta_abs: float) -> tuple[float, float]:
    """(E_-, E_+) = w0 (1 -/+ |eta| sqrt(1 + 9|eta|^2/4)), ground state at zero."""
    shift = omega0 * eta_abs * math.sqrt(1.0 + 2.25 * eta_abs ** 2)
    return omega0 - shift, omega0 + shift


def bs_linewidths(p: QnmParams, eta_abs: float) -> tuple[float, float]:
    """(Gamma_-, Gamma_+) FWHM of the red and blue dominant peaks."""
    asym = 0.5 * eta_abs * (1.0 - 4.0 * p.q * p.tan_2phi0)
    half = 0.5 * p.kappa_c
    return half * (1.0 - asym), half * (1.0 + asym)


def bs_result(p: QnmParams, eta_abs: float) -> BsResult:
    em, ep = bs_energies(p.omega_c, eta_abs)
    gm, gp = bs_linewidths(p, eta_abs)
    return BsResult(em, ep, gm, gp)


def symmetric_phase(p: QnmParams) -> float:
    """phi0* with 4 Q tan(2 phi0*) = 1 exactly."""
    return 0.5 * math.atan(1.0 / (4.0 * p.q))


def symmetric_phase_small_angle(p: QnmParams) -> float:
    return 1.0 / (8.0 * p.q)
