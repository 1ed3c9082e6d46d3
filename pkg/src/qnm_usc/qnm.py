"""Single-QNM parameters and the closed-form weak-coupling quantities built on them.

All frequencies are photon energies in eV unless a docstring says otherwise.
"""
from __future__ import annotations

import json
import math
import os
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import constants as sc

from .errors import ConfigError

PHI0_LIMIT = math.pi / 8
ETA_FIELD_PREFACTOR = 9.5e-14  # eV^(1/2) m^(3/2), for d = 1 e nm

DATA_ENV = "QNM_USC_DATA"


@dataclass(frozen=True)
class QnmParams:
    omega_c: float
    gamma_c: float
    phi0: float = 0.0
    f_amp: complex | None = None
    label: str = ""
    l_eff_m: float | None = None
    notes: str = ""

    def __post_init__(self):
        if not (self.gamma_c > 0 and math.isfinite(self.gamma_c)):
            raise ValueError(f"gamma_c must be > 0, got {self.gamma_c}")
        if not (self.omega_c > 0 and math.isfinite(self.omega_c)):
            raise ValueError(f"omega_c must be > 0, got {self.omega_c}")
        if not abs(self.phi0) < PHI0_LIMIT:
            raise ValueError(
                f"|phi0| = {abs(self.phi0):.4g} violates the single-QNM phase guard |phi0| < pi/8"
            )

    @classmethod
    def from_quality(cls, omega_c: float, q: float, phi0: float = 0.0, **kw) -> "QnmParams":
        return cls(omega_c=omega_c, gamma_c=omega_c / (2.0 * q), phi0=phi0, **kw)

    @property
    def q(self) -> float:
        return self.omega_c / (2.0 * self.gamma_c)

    @property
    def kappa_c(self) -> float:
        return 2.0 * self.gamma_c

    @property
    def tan_2phi0(self) -> float:
        return math.tan(2.0 * self.phi0)

    @property
    def complex_frequency(self) -> complex:
        return complex(self.omega_c, -self.gamma_c)

    @property
    def f_abs(self) -> float:
        """|f| in m^-3/2; 2D amplitudes (m^-1) are scaled by l_eff^-1/2."""
        if self.f_amp is None:
            raise ValueError(f"QNM {self.label!r} carries no field amplitude")
        f = abs(self.f_amp)
        if self.l_eff_m is not None:
            f /= math.sqrt(self.l_eff_m)
        return f

    def with_phi0(self, phi0: float) -> "QnmParams":
        return QnmParams(self.omega_c, self.gamma_c, phi0, self.f_amp, self.label, self.l_eff_m, self.notes)


# -- parameter files ---------------------------------------------------------

_PARAM_KEYS = {"label", "omega_c_eV", "gamma_c_eV", "phi0_rad", "tan_2phi0",
               "f_amp_re", "f_amp_im", "l_eff_m", "notes"}


def params_from_dict(d: dict) -> QnmParams:
    problems = []
    unknown = sorted(set(d) - _PARAM_KEYS)
    if unknown:
        problems += [f"unknown key {k!r}" for k in unknown]
    for k in ("omega_c_eV", "gamma_c_eV"):
        if k not in d:
            problems.append(f"missing key {k!r}")
    has_phi, has_tan = "phi0_rad" in d, "tan_2phi0" in d
    if has_phi == has_tan:
        problems.append("exactly one of 'phi0_rad' or 'tan_2phi0' is required")
    if problems:
        raise ConfigError(f"bad QNM parameter entry {d.get('label', '?')!r}", problems)
    phi0 = float(d["phi0_rad"]) if has_phi else 0.5 * math.atan(float(d["tan_2phi0"]))
    f_amp = None
    if "f_amp_re" in d or "f_amp_im" in d:
        f_amp = complex(float(d.get("f_amp_re", 0.0)), float(d.get("f_amp_im", 0.0)))
    try:
        return QnmParams(
            omega_c=float(d["omega_c_eV"]),
            gamma_c=float(d["gamma_c_eV"]),
            phi0=phi0,
            f_amp=f_amp,
            label=str(d.get("label", "")),
            l_eff_m=None if d.get("l_eff_m") is None else float(d["l_eff_m"]),
            notes=str(d.get("notes", "")),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid QNM parameters {d.get('label', '?')!r}", [str(exc)]) from exc


def params_to_dict(p: QnmParams) -> dict:
    d = {"label": p.label, "omega_c_eV": p.omega_c, "gamma_c_eV": p.gamma_c, "phi0_rad": p.phi0}
    if p.f_amp is not None:
        d["f_amp_re"], d["f_amp_im"] = p.f_amp.real, p.f_amp.imag
    if p.l_eff_m is not None:
        d["l_eff_m"] = p.l_eff_m
    if p.notes:
        d["notes"] = p.notes
    return d


def data_dir() -> Path:
    env = os.environ.get(DATA_ENV)
    return Path(env) if env else Path(__file__).with_name("data")


def load_params(path: str | os.PathLike) -> list[QnmParams]:
    """Load one QNM object or a list of them from a JSON file.

    Relative paths that do not exist are looked up in the data directory
    (``$QNM_USC_DATA`` or the bundled tables).
    """
    path = Path(path)
    if not path.exists() and not path.is_absolute():
        path = data_dir() / path
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"QNM parameter file not found: {path}", [str(path)]) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"QNM parameter file is not valid JSON: {path}", [str(exc)]) from exc
    entries = raw if isinstance(raw, list) else [raw]
    return [params_from_dict(e) for e in entries]


def find_mode(modes: Sequence[QnmParams], label: str) -> QnmParams:
    for m in modes:
        if m.label == label:
            return m
    raise ConfigError(f"no QNM labelled {label!r}", [f"available: {[m.label for m in modes]}"])


# -- closed-form single-mode quantities --------------------------------------

def zeta_factor(p: QnmParams, omega):
    """zeta_c(phi0, w) = 1 - 2 Q tan(2 phi0) (w/w_c - 1); may go negative."""
    return 1.0 - 2.0 * p.q * p.tan_2phi0 * (np.asarray(omega) / p.omega_c - 1.0)


@dataclass(frozen=True)
class SpectralDensityModel:
    """Lambda^2(w) = (kappa/2pi) (w/w_c)^n [zeta(w)], or flat kappa/2pi.

    ``ab_initio`` is n = -1 with the zeta factor, which equals
    (gamma_c/pi)(w_c/w) zeta(w).
    """

    params: QnmParams
    n: int = -1
    zeta_enabled: bool = True
    flat: bool = False
    kind: str = field(default="ab_initio")

    @classmethod
    def ab_initio(cls, p: QnmParams) -> "SpectralDensityModel":
        return cls(p, n=-1, zeta_enabled=True, flat=False, kind="ab_initio")

    @classmethod
    def power_law(cls, p: QnmParams, n: int, zeta_enabled: bool = True) -> "SpectralDensityModel":
        return cls(p, n=int(n), zeta_enabled=zeta_enabled, flat=False, kind="power_law")

    @classmethod
    def flat_density(cls, p: QnmParams) -> "SpectralDensityModel":
        return cls(p, n=0, zeta_enabled=False, flat=True, kind="flat")

    @classmethod
    def from_spec(cls, p: QnmParams, spec: str) -> "SpectralDensityModel":
        """Parse 'ab_initio', 'flat', 'power:N' or 'power:N:nozeta'."""
        spec = spec.strip().lower()
        if spec in ("ab_initio", "abinitio"):
            return cls.ab_initio(p)
        if spec == "flat":
            return cls.flat_density(p)
        if spec.startswith("power:"):
            parts = spec.split(":")
            zeta = not (len(parts) > 2 and parts[2] == "nozeta")
            return cls.power_law(p, int(parts[1]), zeta)
        raise ValueError(f"unknown spectral density spec {spec!r}")

    def describe(self) -> str:
        if self.flat:
            return "flat"
        if self.kind == "ab_initio":
            return "ab_initio"
        return f"power:{self.n}" + ("" if self.zeta_enabled else ":nozeta")

    def __call__(self, omega):
        return spectral_density(self, omega)


def spectral_density(m: SpectralDensityModel, omega):
    """Lambda^2(omega).  Negative values are returned as-is for the caller to police."""
    p = m.params
    base = p.kappa_c / (2.0 * math.pi)
    omega = np.asarray(omega, dtype=float)
    if m.flat:
        out = np.full_like(omega, base)
    else:
        out = base * (omega / p.omega_c) ** m.n
        if m.zeta_enabled:
            out = out * zeta_factor(p, omega)
    return out if out.ndim else float(out)


def broadband_threshold(p: QnmParams) -> float:
    denom = abs(1.0 - 4.0 * p.q * p.tan_2phi0)
    if denom == 0.0:
        warnings.warn("degenerate denominator |1 - 4 Q tan 2phi0| = 0; returning 0.1", RuntimeWarning)
        return 0.1
    return 0.1 * min(1.0, 1.0 / denom)


def eta_max_first_order(p: QnmParams) -> float:
    """First-order bound 1/|2 Q tan 2phi0|; ``inf`` when phi0 = 0."""
    t = 2.0 * p.q * p.tan_2phi0
    return math.inf if t == 0.0 else 1.0 / abs(t)


def eta_from_field(f_amp_modulus: float, omega_c: float, d_over_d0: float = 1.0) -> float:
    """|eta_c| from the QNM amplitude (m^-3/2) at the dipole and hbar w_c in eV."""
    if f_amp_modulus <= 0 or omega_c <= 0 or d_over_d0 <= 0:
        raise ValueError("f_amp_modulus, omega_c and d_over_d0 must all be positive")
    return ETA_FIELD_PREFACTOR * d_over_d0 * f_amp_modulus / math.sqrt(omega_c)


def qnm_expansion_coefficient(p: QnmParams, omega):
    return np.asarray(omega) / (2.0 * (p.complex_frequency - np.asarray(omega)))


def _lorentzian_shape(p: QnmParams, omega):
    k2 = p.kappa_c ** 2 / 4.0
    return k2 / (k2 + (np.asarray(omega) - p.omega_c) ** 2)


def purcell_rate_single(p: QnmParams, g_dipole_mag: float, omega0):
    """Single-QNM weak-coupling decay rate (same units as g and kappa)."""
    omega0 = np.asarray(omega0, dtype=float)
    return (4.0 * g_dipole_mag ** 2 / p.kappa_c) * (omega0 / p.omega_c) \
        * _lorentzian_shape(p, omega0) * zeta_factor(p, omega0)


def purcell_rate_multimode(modes: Iterable[tuple[QnmParams, complex]], dipole_mag: float, omega0):
    """Sum over QNMs of (2 d^2 |f|^2 / hbar eps0) Im{A(w0) e^{2i phi}}, in s^-1.

    Each entry pairs the mode with its projected field d_hat.f (m^-3/2); the
    phase of that field is the mode's phase at the dipole.
    """
    modes = list(modes)
    if not modes:
        raise ValueError("purcell_rate_multimode needs at least one mode")
    total = 0.0
    for p, f in modes:
        a = qnm_expansion_coefficient(p, omega0)
        phase = np.exp(2j * np.angle(f))
        total = total + 2.0 * dipole_mag ** 2 * abs(f) ** 2 / (sc.hbar * sc.epsilon_0) * np.imag(a * phase)
    return total


def lorentzian_norm(p: QnmParams, gamma_at_peak: float, omega):
    return gamma_at_peak * _lorentzian_shape(p, omega)


def free_space_rate(dipole_mag: float, omega: float) -> float:
    """|d|^2 w^3 / (3 pi eps0 hbar c^3), SI (d in C m, omega in rad/s)."""
    return dipole_mag ** 2 * omega ** 3 / (3.0 * math.pi * sc.epsilon_0 * sc.hbar * sc.c ** 3)


def ev_to_rad_per_s(e_ev):
    return np.asarray(e_ev) * sc.e / sc.hbar


def dipole_coupling(p: QnmParams, dipole_mag: float, f_abs: float | None = None) -> float:
    """|g^d| = d |f| sqrt(w_c / (2 eps0 hbar)) in rad/s."""
    f = p.f_abs if f_abs is None else f_abs
    w = float(ev_to_rad_per_s(p.omega_c))
    return dipole_mag * f * math.sqrt(w / (2.0 * sc.epsilon_0 * sc.hbar))


def detection_scale(p: QnmParams) -> float:
    return math.sqrt(math.cos(2.0 * p.phi0))


def s_c(p: QnmParams) -> float:
    """Pole-approximated quantization factor S_c ~ cos(2 phi0)."""
    return math.cos(2.0 * p.phi0)


@dataclass(frozen=True)
class CriteriaRow:
    label: str
    q: float
    tan_2phi0: float
    eta_max_first_order: float
    omega_bb: float
    eta_d0: float | None


def criteria_table(modes: Iterable[QnmParams]) -> list[CriteriaRow]:
    rows = []
    for p in modes:
        eta = eta_from_field(p.f_abs, p.omega_c) if p.f_amp is not None else None
        rows.append(CriteriaRow(p.label, p.q, p.tan_2phi0, eta_max_first_order(p),
                                broadband_threshold(p), eta))
    return rows
