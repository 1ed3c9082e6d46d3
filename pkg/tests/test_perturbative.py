import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qnm_usc import hamiltonian as ham
from qnm_usc.perturbative import (bs_energies, bs_linewidths, bs_result, symmetric_phase,
                                  symmetric_phase_small_angle)
from qnm_usc.qnm import QnmParams


def test_energies():
    assert bs_energies(1.0, 0.0) == (1.0, 1.0)
    em, ep = bs_energies(1.0, 0.1)
    assert ep - 1 == pytest.approx(0.101119, abs=1e-6)
    assert 1 - em == pytest.approx(0.101119, abs=1e-6)


def test_energies_against_diagonalization():
    e = np.linalg.eigvalsh(ham.coulomb_single_mode(ham.CouplingConfig(0.1, 1.0, 1.0, 30)))
    e = e - e[0]
    em, ep = bs_energies(1.0, 0.1)
    assert abs(e[1] - em) < 5e-3 and abs(e[2] - ep) < 5e-3


def test_linewidths():
    p = QnmParams(1.0, 0.5, 0.0)  # kappa = 1
    assert bs_linewidths(p, 0.0) == (0.5, 0.5)
    assert bs_linewidths(p, 0.1) == pytest.approx((0.475, 0.525))


def test_symmetric_phase():
    q20 = QnmParams.from_quality(1.0, 20)
    assert symmetric_phase(q20) == pytest.approx(0.00624967, abs=1e-8)
    assert symmetric_phase_small_angle(q20) == pytest.approx(1 / 160)
    p = QnmParams.from_quality(1.0, 20, symmetric_phase(q20))
    gm, gp = bs_linewidths(p, 0.3)
    assert gm == pytest.approx(gp, abs=1e-15)
    q100 = QnmParams.from_quality(1.0, 100)
    rel = abs(symmetric_phase(q100) - symmetric_phase_small_angle(q100)) / symmetric_phase(q100)
    assert rel < 1e-4


@settings(max_examples=100, deadline=None)
@given(st.floats(1.5, 1e4), st.floats(-0.3, 0.3), st.floats(0, 0.9))
def test_linewidth_sum_rule(q, phi0, eta):
    p = QnmParams.from_quality(1.0, q, phi0)
    gm, gp = bs_linewidths(p, eta)
    assert gm + gp == pytest.approx(p.kappa_c, rel=1e-12)
    r = bs_result(p, eta)
    if eta > 1e-9:
        assert r.e_plus > r.e_minus
    if eta * (1 - 4 * q * math.tan(2 * phi0)) > -2 and eta * abs(1 - 4 * q * math.tan(2 * phi0)) < 2:
        assert r.gamma_minus > 0 and r.gamma_plus > 0


@pytest.mark.parametrize("etas", [(0.01, 0.05), (0.01, 0.1)])
def test_fitted_slopes_match_closed_form(etas):
    # secular treatment: the regime the closed form describes (see the acceptance notes)
    from qnm_usc.simulate import Settings, fitted_linewidths
    from qnm_usc.spectra import default_grid
    p = QnmParams.from_quality(1.0, 20, 0.0)
    widths = []
    for eta in etas:
        fit, _ = fitted_linewidths(p, eta, Settings(secular=True), grid=default_grid(p, eta, 4000))
        widths.append((fit.gamma_minus, fit.gamma_plus))
    slope = (np.array(widths[1]) - np.array(widths[0])) / (etas[1] - etas[0]) / p.kappa_c
    assert slope == pytest.approx([-0.25, 0.25], rel=0.1)
