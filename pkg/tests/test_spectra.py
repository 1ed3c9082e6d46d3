import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import trapezoid

from qnm_usc.errors import PeaksUnresolvedError, SingularResolventError
from qnm_usc.liouvillian import assemble
from qnm_usc.qnm import QnmParams
from qnm_usc.simulate import Settings, simulate
from qnm_usc.spectra import (SpectrumResult, classical_spectrum, default_grid, emission_spectrum,
                             emission_spectrum_time_domain, fit_two_lorentzians, polarizability,
                             two_lorentzians)

SMALL = Settings(n_fock=12, keep=12)


def test_spectrum_result_validation():
    with pytest.raises(ValueError):
        SpectrumResult([1.0, 0.5], [1.0, 1.0])
    with pytest.raises(ValueError):
        SpectrumResult([0.5, 1.0], [1.0, np.nan])
    s = SpectrumResult([0.0, 1.0, 2.0], [1.0, 4.0, 2.0]).normalized()
    assert s.values.max() == 1.0 and s.normalization == "peak=1"


def test_default_grid_span():
    p = QnmParams.from_quality(2.0, 20)
    g = default_grid(p, 0.1)
    assert g.size == 2000
    assert g[0] == pytest.approx(2.0 * (1 - 0.3 - 0.3))
    assert g[-1] == pytest.approx(2.0 * (1 + 0.3 + 0.3))


def test_fit_round_trip_synthetic():
    kappa = 0.05
    truth = np.array([1.0, 1.0 - 2 * kappa, 0.4 * kappa, 0.7, 1.0 + 2 * kappa, 0.6 * kappa])
    w = np.linspace(0.7, 1.3, 3001)
    fit = fit_two_lorentzians(SpectrumResult(w, two_lorentzians(w, truth)))
    got = [fit.amp_minus, fit.omega_minus, fit.gamma_minus, fit.amp_plus, fit.omega_plus, fit.gamma_plus]
    assert np.allclose(got, truth, rtol=1e-6)
    assert fit.residual_rms < 1e-10


@settings(max_examples=25, deadline=None)
@given(st.floats(0.3, 1.0), st.floats(0.3, 1.0), st.floats(0.2, 1.0), st.floats(3.0, 8.0))
def test_fit_round_trip_property(g1, g2, a2, split):
    truth = np.array([1.0, 1.0 - split / 2 * 0.01, g1 * 0.01, a2, 1.0 + split / 2 * 0.01, g2 * 0.01])
    w = np.linspace(0.9, 1.1, 2001)
    fit = fit_two_lorentzians(SpectrumResult(w, two_lorentzians(w, truth)))
    assert fit.omega_minus < fit.omega_plus
    assert [fit.gamma_minus, fit.gamma_plus] == pytest.approx([truth[2], truth[5]], rel=1e-6)


def test_fit_single_peak_is_unresolved():
    w = np.linspace(0.5, 1.5, 501)
    with pytest.raises(PeaksUnresolvedError):
        fit_two_lorentzians(SpectrumResult(w, 1 / (1 + (w - 1) ** 2 / 0.01)))


def test_empty_cavity_lorentzian():
    p = QnmParams.from_quality(1.0, 20)
    res = simulate(p, 0.0, "empty", settings=Settings(n_fock=6, density="flat"),
                   grid=np.linspace(0.7, 1.3, 2001))
    w, v = res.spectrum.omega_grid, res.spectrum.values
    half = w[v >= 0.5]
    assert half[-1] - half[0] == pytest.approx(p.kappa_c, rel=0.01)
    assert w[np.argmax(v)] == pytest.approx(1.0, abs=1e-3)


def test_time_domain_matches_resolvent():
    p = QnmParams.from_quality(1.0, 10, 0.01)
    res = simulate(p, 0.2, settings=Settings(n_fock=8, keep=6, pump_fraction=1e-2), normalize=False,
                   grid=np.linspace(0.6, 1.4, 51))
    spot = np.array([0.8, 0.9, 1.1])
    ref = emission_spectrum(res.liouvillian, res.steady, res.transitions, spot).values
    td = emission_spectrum_time_domain(res.liouvillian, res.steady, res.transitions, spot)
    assert np.max(np.abs(td - ref) / np.abs(ref)) < 1e-6


def test_schur_matches_solve():
    p = QnmParams.from_quality(1.0, 20, -0.01)
    res = simulate(p, 0.2, settings=SMALL, normalize=False, grid=np.linspace(0.6, 1.4, 41))
    alt = emission_spectrum(res.liouvillian, res.steady, res.transitions, res.spectrum.omega_grid, "solve")
    assert np.max(np.abs(alt.values - res.spectrum.values)) < 1e-10 * np.max(res.spectrum.values)


@pytest.mark.parametrize("theta", [0.5, math.pi / 2, 2.5])
def test_global_phase_of_eta(theta):
    p = QnmParams.from_quality(1.0, 20, 0.01)
    grid = np.linspace(0.6, 1.4, 81)
    a = simulate(p, 0.2, settings=SMALL, grid=grid).spectrum.values
    b = simulate(p, 0.2 * np.exp(1j * theta), settings=SMALL, grid=grid).spectrum.values
    assert np.max(np.abs(a - b)) < 1e-8


def test_undamped_transition_is_singular():
    p = QnmParams.from_quality(1.0, 20)
    res = simulate(p, 0.0, "empty", settings=Settings(n_fock=4), grid=np.linspace(0.8, 1.2, 5))
    bare = assemble(res.dressed.kept_energies, [])
    with pytest.raises(SingularResolventError):
        emission_spectrum(bare, res.steady, res.transitions, [0.5, 1.0])


def test_pump_linearity():
    p = QnmParams.from_quality(1.0, 20)
    grid = np.linspace(0.7, 1.3, 601)
    areas = [trapezoid(simulate(p, 0.05, settings=SMALL.with_(pump_fraction=f), grid=grid,
                               normalize=False).spectrum.values, grid) for f in (1e-4, 2e-4)]
    assert areas[1] / areas[0] == pytest.approx(2.0, rel=0.01)


def test_phase_dependent_rabi_spectra():
    p_plus = QnmParams.from_quality(1.0, 13, 0.02)
    p_minus = QnmParams.from_quality(1.0, 13, -0.02)
    grid = np.linspace(0.3, 1.7, 1401)
    s = Settings(pump_fraction=1e-2, policy="clamp")
    with pytest.warns(RuntimeWarning):
        a = simulate(p_plus, 0.4, settings=s, grid=grid).spectrum
    b = simulate(p_minus, 0.4, settings=s, grid=grid).spectrum
    assert a.peaks(0.01).size >= 2 and b.peaks(0.01).size >= 2
    assert np.sqrt(np.mean((a.values - b.values) ** 2)) > 0.01


def test_flat_and_ab_initio_share_peak_positions():
    p = QnmParams.from_quality(1.0, 200)
    grid = np.linspace(0.9, 1.1, 4001)
    peaks = [simulate(p, 0.02, settings=SMALL.with_(density=d), grid=grid).spectrum.peaks(0.1)
             for d in ("flat", "ab_initio")]
    assert np.max(np.abs(peaks[0] - peaks[1])) < grid[1] - grid[0]


def test_classical_zero_coupling_is_bare():
    p = QnmParams.from_quality(1.0, 16, 0.01)
    w = np.linspace(0.55, 1.45, 10)
    assert np.allclose(polarizability(p, 0.0, 0.9, w, "qnm"), polarizability(p, 0.0, 0.9, w, "bare"))
    with pytest.raises(ValueError):
        polarizability(p, 0.1, 0.9, w, "other")


def test_classical_bare_skips_pole():
    p = QnmParams.from_quality(1.0, 16)
    with pytest.warns(RuntimeWarning, match="skipped"):
        s = classical_spectrum(p, 0.1, 1.0, 1.0, "bare", np.linspace(0.5, 1.5, 11))
    assert s.omega_grid.size == 10


def test_classical_variants_differ_in_resonances():
    p = QnmParams.from_quality(1.0, 16, -0.01)
    w = np.linspace(0.4, 1.8, 3001)
    eta = 0.5 * np.exp(1j * p.phi0)
    neg = classical_spectrum(p, eta, 1.0, 1.0, "qnm_negfreq", w).peaks(0.05)
    plain = classical_spectrum(p, eta, 1.0, 1.0, "qnm", w).peaks(0.05)
    assert neg.size == plain.size == 2
    assert np.min(np.abs(neg - plain)) > 0.03
