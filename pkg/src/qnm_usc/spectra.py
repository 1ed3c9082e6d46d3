"""Steady-state emission spectra (quantum regression), two-Lorentzian fits and
classical single-QNM scattering spectra."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, optimize, signal

from . import _kernels
from .dressed import TransitionSet
from .errors import FitConvergenceError, PeaksUnresolvedError, SingularResolventError
from .liouvillian import Liouvillian, SteadyState
from .qnm import QnmParams, qnm_expansion_coefficient, s_c

NEG_TOL = 1e-8


@dataclass
class SpectrumResult:
    omega_grid: np.ndarray
    values: np.ndarray
    normalization: str = "raw"
    metadata: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.omega_grid = np.asarray(self.omega_grid, float)
        self.values = np.asarray(self.values, float)
        if self.omega_grid.shape != self.values.shape:
            raise ValueError("grid and values differ in shape")
        if np.any(np.diff(self.omega_grid) <= 0):
            raise ValueError("omega grid must be strictly ascending")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("spectrum has non-finite values")

    def normalized(self) -> "SpectrumResult":
        peak = np.max(self.values)
        if peak <= 0:
            raise ValueError("cannot peak-normalize a spectrum with no positive values")
        return SpectrumResult(self.omega_grid, self.values / peak, "peak=1",
                              dict(self.metadata), list(self.warnings))

    def peaks(self, min_rel_height: float = 1e-3) -> np.ndarray:
        """Grid frequencies of local maxima, refined by a parabola through 3 points."""
        v = self.values
        idx, _ = signal.find_peaks(v, height=min_rel_height * v.max())
        w = self.omega_grid
        out = []
        for i in idx:
            y0, y1, y2 = v[i - 1], v[i], v[i + 1]
            den = y0 - 2 * y1 + y2
            shift = 0.5 * (y0 - y2) / den if den != 0 else 0.0
            out.append(w[i] + shift * (w[i + 1] - w[i - 1]) / 2)
        return np.array(out)


def default_grid(p: QnmParams, eta_abs: float, n: int = 2000) -> np.ndarray:
    half = 3.0 * eta_abs + 6.0 / p.q
    lo = max(p.omega_c * (1.0 - half), 1e-6 * p.omega_c)
    return np.linspace(lo, p.omega_c * (1.0 + half), n)


def _vectors(rho_ss: SteadyState | np.ndarray, x_det: TransitionSet | np.ndarray):
    rho = rho_ss.rho if isinstance(rho_ss, SteadyState) else np.asarray(rho_ss)
    x = x_det.lowering("c_det") if isinstance(x_det, TransitionSet) else np.asarray(x_det)
    r = (rho @ x.conj().T).reshape(-1)
    left = x.T.reshape(-1)  # Tr[X Y] = left . vec(Y)
    return left, r


def emission_spectrum(l: Liouvillian, rho_ss, x_det, omega_grid, method: str = "schur") -> SpectrumResult:
    """S(w) = Re Tr[X (-L - i w)^-1 (rho X^dag)], X = sum_alpha c^det_alpha |j><k|.

    ``method='schur'`` factors L once and back-substitutes per frequency;
    ``method='solve'`` does a dense LU solve per frequency.
    """
    w = np.asarray(omega_grid, float)
    left, r = _vectors(rho_ss, x_det)
    lm = l.matrix
    scale = np.linalg.norm(lm, 1)
    if method == "schur":
        t, z = linalg.schur(lm, output="complex")
        diag = np.diag(t)
        gap = np.min(np.abs(diag[:, None] + 1j * w[None, :]), axis=0)
        _check_singular(gap, scale, w)
        vals = _kernels.resolvent_sweep(t, z.conj().T @ r, z.T @ left, w)
    elif method == "solve":
        eye = np.eye(lm.shape[0])
        vals = np.empty(w.size)
        for i, om in enumerate(w):
            a = -lm - 1j * om * eye
            try:
                y = linalg.solve(a, r, check_finite=False)
            except linalg.LinAlgError as exc:
                raise SingularResolventError(f"resolvent singular at w = {om}") from exc
            vals[i] = np.real(left @ y)
    else:
        raise ValueError(f"unknown method {method!r}")
    res = SpectrumResult(w, vals, "raw", {"method": method})
    peak = np.max(np.abs(vals)) if vals.size else 0.0
    if np.min(vals, initial=0.0) < -NEG_TOL * peak:
        res.warnings.append(f"spectrum dips negative to {vals.min() / peak:.2e} of peak")
    return res


def _check_singular(gap, scale, w):
    bad = gap < 1e-13 * max(scale, 1.0)
    if np.any(bad):
        raise SingularResolventError(
            f"resolvent is singular at w = {w[bad][:3]} (undamped transition); "
            "check the negative-rate policy and that every transition is damped")


def emission_spectrum_time_domain(l: Liouvillian, rho_ss, x_det, omegas, t_max: float | None = None,
                                  chunk: float | None = None, nodes: int = 16) -> np.ndarray:
    """Independent check: Gauss-Legendre quadrature of Re int e^{iwt} <X^dag(0) X(t)> dt,
    with the correlation propagated by matrix exponentials."""
    w = np.atleast_1d(np.asarray(omegas, float))
    left, r = _vectors(rho_ss, x_det)
    lm = l.matrix
    ev = np.linalg.eigvals(lm)
    rates = -ev.real[np.abs(ev) > 1e-9 * np.abs(ev).max()]
    if t_max is None:
        t_max = 40.0 / rates[rates > 0].min()
    if chunk is None:
        chunk = min(0.5, math.pi / max(np.abs(ev.imag).max(), w.max()))
    n_chunks = int(math.ceil(t_max / chunk))
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    tn = 0.5 * chunk * (xg + 1.0)
    wn = 0.5 * chunk * wg
    p_nodes = [linalg.expm(lm * t) for t in tn]
    p_step = linalg.expm(lm * chunk)
    acc = np.zeros(w.size, complex)
    v = r.copy()
    for ic in range(n_chunks):
        t0 = ic * chunk
        for t, wt, pn in zip(tn, wn, p_nodes):
            c = left @ (pn @ v)
            acc += wt * np.exp(1j * w * (t0 + t)) * c
        v = p_step @ v
    return acc.real


# -- two-Lorentzian fit ----------------------------------------------------------

@dataclass(frozen=True)
class LinewidthFit:
    omega_minus: float
    omega_plus: float
    gamma_minus: float
    gamma_plus: float
    amp_minus: float
    amp_plus: float
    residual_rms: float


def lorentzian(w, amp, center, fwhm):
    hw2 = (0.5 * fwhm) ** 2
    return amp * hw2 / ((w - center) ** 2 + hw2)


def two_lorentzians(w, params):
    a1, c1, g1, a2, c2, g2 = params
    return lorentzian(w, a1, c1, g1) + lorentzian(w, a2, c2, g2)


def _jacobian(w, params):
    jac = np.empty((w.size, 6))
    for i in (0, 3):
        a, c, g = params[i:i + 3]
        hw2 = 0.25 * g * g
        den = (w - c) ** 2 + hw2
        jac[:, i] = hw2 / den
        jac[:, i + 1] = a * hw2 * 2 * (w - c) / den ** 2
        jac[:, i + 2] = a * 0.5 * g * (w - c) ** 2 / den ** 2
    return jac


def _initial_guess(w, v):
    idx, _ = signal.find_peaks(v)
    if idx.size < 2:
        raise PeaksUnresolvedError(
            f"found {idx.size} local maximum in the fit window; peaks unresolved (reduce |eta| range)")
    top = idx[np.argsort(v[idx])[-2:]]
    top.sort()
    widths = signal.peak_widths(v, top, rel_height=0.5)[0]
    dw = np.mean(np.diff(w))
    guess = []
    for i, wd in zip(top, widths):
        guess += [v[i], w[i], max(wd * dw, 2 * dw)]
    return np.array(guess)


def fit_two_lorentzians(s: SpectrumResult, window: tuple[float, float] | None = None,
                        max_iter: int = 500, gtol: float = 1e-10) -> LinewidthFit:
    w, v = s.omega_grid, s.values
    if window is not None:
        sel = (w >= window[0]) & (w <= window[1])
        w, v = w[sel], v[sel]
    scale = v.max()
    if scale <= 0:
        raise PeaksUnresolvedError("no positive spectral weight in the fit window")
    vn = v / scale
    x0 = _initial_guess(w, vn)
    res = optimize.least_squares(
        lambda prm: two_lorentzians(w, prm) - vn, x0,
        jac=lambda prm: _jacobian(w, prm), method="lm",
        xtol=1e-15, ftol=1e-15, gtol=gtol, max_nfev=max_iter * 7, x_scale="jac",
    )
    rms = float(np.sqrt(np.mean(res.fun ** 2)))
    if res.status <= 0:
        raise FitConvergenceError(f"two-Lorentzian fit did not converge ({res.message}); rms={rms:.3e}", rms)
    a1, c1, g1, a2, c2, g2 = res.x
    g1, g2 = abs(g1), abs(g2)
    if c1 > c2:
        (a1, c1, g1), (a2, c2, g2) = (a2, c2, g2), (a1, c1, g1)
    return LinewidthFit(c1, c2, g1, g2, a1 * scale, a2 * scale, rms)


# -- classical single-QNM scattering ---------------------------------------------

CLASSICAL_VARIANTS = ("bare", "qnm", "qnm_negfreq")


def polarizability(p: QnmParams, eta_c: complex, omega0: float, omega, variant: str):
    """Scalar dipole polarizability in units of 2 d^2 / (hbar eps0)."""
    w = np.asarray(omega, float)
    bare_den = omega0 ** 2 - w ** 2
    if variant == "bare":
        return omega0 / bare_den
    a = qnm_expansion_coefficient(p, w)
    eta2 = complex(eta_c) ** 2
    coupling = a * eta2
    if variant == "qnm_negfreq":
        coupling = coupling + np.conj(qnm_expansion_coefficient(p, -w)) * eta2.conjugate()
    elif variant != "qnm":
        raise ValueError(f"unknown classical variant {variant!r}; expected one of {CLASSICAL_VARIANTS}")
    return omega0 / (bare_den - 4.0 * omega0 * p.omega_c * coupling / s_c(p))


def detection_propagator(p: QnmParams, omega, variant: str = "qnm"):
    """Scalar QNM Green function from the dipole to a detector with the same projected phase.

    The negative-frequency variant adds the conjugate pole A*(-w) f* f*, matching the
    modified expansion used inside its polarizability.
    """
    w = np.asarray(omega, float)
    ph = np.exp(2j * p.phi0)
    g = qnm_expansion_coefficient(p, w) * ph
    if variant == "qnm_negfreq":
        g = g + np.conj(qnm_expansion_coefficient(p, -w) * ph)
    return g


def classical_spectrum(p: QnmParams, eta_c: complex, omega0: float, e0: float, variant: str,
                       omega_grid, normalize: bool = True) -> SpectrumResult:
    """S_cl(w) = |G(w) alpha(w) E0|^2 with detector and dipole constants folded into E0.

    ``eta_c`` carries the QNM phase (|eta| exp(i phi0)); a real value describes a
    different emitter position, not the same one with the phase dropped.
    """
    w = np.asarray(omega_grid, float)
    warns = []
    if variant == "bare":
        on_pole = np.isclose(w, omega0, rtol=0, atol=1e-14 * omega0)
        if np.any(on_pole):
            warns.append(f"skipped {int(on_pole.sum())} grid point(s) on the bare pole w = w0")
            warnings.warn(warns[-1], RuntimeWarning)
            w = w[~on_pole]
    field_amp = detection_propagator(p, w, variant) * polarizability(p, eta_c, omega0, w, variant) * e0
    res = SpectrumResult(w, np.abs(field_amp) ** 2, "raw",
                         {"variant": variant, "eta_c": [complex(eta_c).real, complex(eta_c).imag]}, warns)
    return res.normalized() if normalize else res
