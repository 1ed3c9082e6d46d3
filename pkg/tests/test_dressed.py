import numpy as np
import pytest

from qnm_usc import hamiltonian as ham
from qnm_usc.dressed import detection_operator, detection_operator_elements, diagonalize, transitions
from qnm_usc.errors import NonHermitianError
from qnm_usc.hamiltonian import CouplingConfig


def tls(eta, n=20, w0=1.0, gauge="coulomb"):
    cfg = CouplingConfig(eta, w0, 1.0, n)
    if gauge == "coulomb":
        return ham.coulomb_single_mode(cfg), ham.cavity_annihilation(n)
    return ham.dipole_gauge_qrm(cfg), ham.dipole_gauge_shifted_a(eta, n)


def test_diagonalize_basic_invariants(rng):
    h, _ = tls(0.3)
    ds = diagonalize(h, 24)
    assert ds.energies[0] == 0.0
    assert np.all(np.diff(ds.energies) >= 0)
    u = ds.states
    assert np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=1e-10)
    rebuilt = u @ np.diag(ds.energies + ds.ground_offset) @ u.conj().T
    assert np.max(np.abs(rebuilt - h)) < 1e-10 * np.max(np.abs(h))


def test_zero_coupling_energies():
    h, _ = tls(0.0, n=5, w0=0.8)
    raw = sorted(n + s * 0.4 for n in range(5) for s in (-1, 1))
    assert np.allclose(diagonalize(h, 4).energies, np.array(raw) - raw[0], atol=1e-12)


def test_diagonalize_errors():
    with pytest.raises(NonHermitianError):
        diagonalize(np.array([[0, 1], [0, 0]], complex), 2)
    with pytest.raises(ValueError):
        diagonalize(np.eye(3), 4)


def test_empty_cavity_single_transition():
    h = ham.empty_cavity(1.3, 2)
    a = ham.cavity_annihilation(2, 1)
    ts = transitions(diagonalize(h, 2), {"a_op": a})
    assert len(ts) == 1
    assert abs(ts.c_a[0]) == pytest.approx(1.0)
    assert ts.omega[0] == pytest.approx(1.3)


def test_keep_all_gives_every_pair():
    h, a = tls(0.2, n=3)
    ts = transitions(diagonalize(h, 6), {"a_op": a, "det_op": a + a.T, "drive_op": a}, drop_tol=-1)
    assert len(ts) == 15
    assert np.all(ts.j < ts.k) and np.all(ts.omega > 0)


def test_jc_limit_bright_doublet():
    h, a = tls(0.01)
    ts = transitions(diagonalize(h, 6), {"a_op": a})
    from_ground = np.sort(np.abs(ts.c_a[(ts.j == 0)]) ** 2)[::-1]
    assert from_ground[:2] == pytest.approx([0.5, 0.5], abs=0.02)


def test_drop_tol_filters():
    h, a = tls(0.2)
    ts = transitions(diagonalize(h, 24), {"a_op": a})
    assert np.all(np.abs(ts.c_a) > 1e-10)
    with pytest.raises(ValueError):
        transitions(diagonalize(h, 24), {"bogus": a})


def test_completeness():
    h, a = tls(0.3)
    ds = diagonalize(h, 24)
    ad = ds.to_dressed(a)
    ts = transitions(ds, {"a_op": a}, drop_tol=0.0, omega_floor=-1.0)
    upper = np.sum(np.abs(np.triu(ad, 1)) ** 2)
    assert np.sum(np.abs(ts.c_a) ** 2) == pytest.approx(upper, rel=1e-12)


def test_truncation_convergence():
    sets = []
    for n in (20, 40):
        h, a = tls(0.3, n=n)
        sets.append(transitions(diagonalize(h, 12), {"a_op": a}))
    t1, t2 = sets
    assert np.array_equal(t1.j, t2.j) and np.array_equal(t1.k, t2.k)
    assert np.max(np.abs(t1.omega - t2.omega)) < 1e-8
    assert np.max(np.abs(np.abs(t1.c_a) - np.abs(t2.c_a))) < 1e-8


def test_detection_elements():
    ds = diagonalize(ham.empty_cavity(1.0, 3), 3)
    a = ham.cavity_annihilation(3, 1)
    c = detection_operator_elements(ds, 0.2, a_op=a, pairs=(np.array([0]), np.array([1])))
    assert c[0] == pytest.approx(0.2j)
    c2 = detection_operator_elements(ds, 0.4, a_op=a, pairs=(np.array([0]), np.array([1])))
    assert c2[0] == pytest.approx(2 * c[0])


def test_detection_ground_diagonal_vanishes_by_parity():
    h, a = tls(0.3)
    ds = diagonalize(h, 10)
    x = ds.to_dressed(detection_operator(a, 0.3))
    assert abs(x[0, 0]) < 1e-12


@pytest.mark.parametrize("eta", [0.2, 0.4 * np.exp(0.4j)])
def test_cross_gauge_matrix_elements(eta):
    out = []
    for gauge in ("coulomb", "dipole"):
        h, a = tls(eta, n=50, gauge=gauge)
        out.append(transitions(diagonalize(h, 8), {"a_op": a}, drop_tol=1e-6))
    c, d = out
    assert np.array_equal(c.j, d.j) and np.array_equal(c.k, d.k)
    assert np.max(np.abs(c.omega - d.omega)) < 1e-8
    assert np.max(np.abs(np.abs(c.c_a) - np.abs(d.c_a))) < 1e-8
