"""End-to-end pipelines: Hamiltonian -> dressed transitions -> Liouvillian ->
steady state -> near-field spectrum."""
from __future__ import annotations

import cmath
import warnings
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import hamiltonian as ham
from .dressed import DROP_TOL, OMEGA_FLOOR, DressedSystem, TransitionSet, detection_operator, diagonalize, transitions
from .liouvillian import (BathCoupling, Liouvillian, NegativeRatePolicy, SteadyState, assemble,
                          dissipator, incoherent_pump, steady_state)
from .errors import NegativeRateError
from .qnm import QnmParams, SpectralDensityModel
from .spectra import SpectrumResult, default_grid, emission_spectrum, fit_two_lorentzians


@dataclass(frozen=True)
class Settings:
    n_fock: int = ham.DEFAULT_N_FOCK
    n_matter: int = ham.DEFAULT_HOPFIELD_N
    keep: int = 24
    pump_fraction: float = 1e-4
    pump_target: str = "cavity"
    bath: str = "a"
    density: str = "ab_initio"
    secular: bool = False
    policy: str = "reject"
    gauge: str = "coulomb"
    drop_tol: float = DROP_TOL
    omega_floor: float = OMEGA_FLOOR
    method: str = "schur"
    active_population: float = 1e-3

    def with_(self, **kw) -> "Settings":
        return replace(self, **kw)

    def as_dict(self) -> dict:
        return asdict(self)


HOPFIELD_SETTINGS = Settings(n_fock=12, n_matter=12, keep=30)


@dataclass
class SimulationResult:
    spectrum: SpectrumResult
    dressed: DressedSystem
    transitions: TransitionSet
    liouvillian: Liouvillian
    steady: SteadyState
    metadata: dict = field(default_factory=dict)

    @property
    def warnings(self) -> list[str]:
        return self.liouvillian.warnings + self.steady.warnings + self.spectrum.warnings


def _detection_phase(eta: complex) -> complex:
    """Unit-modulus detection coupling; |eta| only rescales S(w)."""
    return cmath.exp(1j * cmath.phase(eta)) if eta != 0 else 1.0


def build_system(kind: str, p: QnmParams, eta: complex, omega0: float | None, s: Settings):
    """Return (H, bath-side cavity operator a, drive operator, detection operator)."""
    omega0 = p.omega_c if omega0 is None else omega0
    if kind == "empty":
        h = ham.empty_cavity(p.omega_c, s.n_fock)
        a = ham.cavity_annihilation(s.n_fock, 1)
        return h, a, a, detection_operator(a, 1.0)
    cfg = ham.CouplingConfig(eta, omega0, p.omega_c, s.n_fock, s.n_matter)
    if kind == "tls":
        if s.gauge == "coulomb":
            h = ham.coulomb_single_mode(cfg)
            a = ham.cavity_annihilation(s.n_fock)
        elif s.gauge == "dipole":
            h = ham.dipole_gauge_qrm(cfg)
            a = ham.dipole_gauge_shifted_a(eta, s.n_fock)
        else:
            raise ValueError(f"unknown gauge {s.gauge!r}")
        return h, a, a, detection_operator(a, _detection_phase(eta))
    if kind == "hopfield":
        h = ham.hopfield_coulomb(cfg, eta)
        a = ham.cavity_annihilation(s.n_fock, s.n_matter)
        drive = a if s.pump_target == "cavity" else ham.matter_drive_operator(s.n_fock, s.n_matter)
        return h, a, drive, detection_operator(a, _detection_phase(eta))
    raise ValueError(f"unknown system kind {kind!r}")


def _clamped_loss(ts, sd, secular):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return dissipator(ts, sd, secular, NegativeRatePolicy.CLAMP_ZERO)


def simulate(p: QnmParams, eta: complex, kind: str = "tls", omega0: float | None = None,
             settings: Settings = Settings(), grid=None, normalize: bool = True) -> SimulationResult:
    """Full steady-state spectrum for one parameter point."""
    s = settings
    h, a, drive, det = build_system(kind, p, eta, omega0, s)
    keep = min(s.keep, h.shape[0])
    ds = diagonalize(h, keep)
    pi_op = BathCoupling.parse(s.bath).operator(a)
    ts = transitions(ds, {"a_op": pi_op, "det_op": det, "drive_op": drive}, s.drop_tol, s.omega_floor)
    sd = SpectralDensityModel.from_spec(p, s.density)
    policy = NegativeRatePolicy(s.policy)
    pump = incoherent_pump(ts, p, s.pump_fraction, s.pump_target, secular=s.secular)
    try:
        loss = dissipator(ts, sd, s.secular, policy)
    except NegativeRateError as exc:
        # Retry with the offending channels switched off; they are tolerated only if
        # their upper levels hold a negligible share of the excited population.
        loss = _clamped_loss(ts, sd, s.secular)
        probe = steady_state(assemble(ds.kept_energies, [loss, pump]))
        bad = np.asarray(sd(ts.omega)) < 0
        excited = max(1.0 - probe.populations[0], np.finfo(float).tiny)
        share = float(np.max(probe.populations[ts.k[bad]])) / excited
        if share > s.active_population:
            raise NegativeRateError(
                f"{exc} (upper levels hold {share:.2e} of the excited population, "
                f"limit {s.active_population:.0e})", exc.omegas) from None
        loss.warnings.append(f"{int(bad.sum())} negative-rate transition(s) switched off; their upper "
                             f"levels hold {share:.1e} of the excited population")
    terms = [loss, pump]
    meta = {"kind": kind, "eta": [complex(eta).real, complex(eta).imag], "omega0": omega0,
            "qnm": {"omega_c": p.omega_c, "gamma_c": p.gamma_c, "phi0": p.phi0, "label": p.label},
            "settings": s.as_dict(), "n_transitions": len(ts)}
    lv = assemble(ds.kept_energies, terms, meta)
    ss = steady_state(lv)
    if grid is None:
        grid = default_grid(p, abs(eta))
    spec = emission_spectrum(lv, ss, ts, grid, method=s.method)
    spec.metadata.update(meta)
    if normalize:
        spec = spec.normalized()
    return SimulationResult(spec, ds, ts, lv, ss, meta)


def fitted_linewidths(p: QnmParams, eta: float, settings: Settings = Settings(), grid=None, window=None):
    res = simulate(p, eta, "tls", settings=settings, grid=grid)
    return fit_two_lorentzians(res.spectrum, window), res
