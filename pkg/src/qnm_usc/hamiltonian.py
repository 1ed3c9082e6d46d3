"""System Hamiltonians in the truncated cavity (x) TLS / cavity (x) matter space.

Energies are hbar*omega in eV.  The longitudinal coupling is omitted
throughout and the cavity dispersion factor chi_cc is taken equal to
omega_c.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import opalg

DEFAULT_N_FOCK = 20
DEFAULT_HOPFIELD_N = 12


@dataclass(frozen=True)
class CouplingConfig:
    eta_c: complex
    omega_0: float
    omega_c: float
    n_fock: int = DEFAULT_N_FOCK
    n_matter: int = DEFAULT_HOPFIELD_N

    def __post_init__(self):
        if self.n_fock < 2:
            raise ValueError(f"n_fock must be >= 2, got {self.n_fock}")
        if self.n_matter < 2:
            raise ValueError(f"n_matter must be >= 2, got {self.n_matter}")
        if not abs(self.eta_c) < 1.0:
            raise ValueError(f"|eta_c| = {abs(self.eta_c)} is in the excluded deep-strong regime (>= 1)")
        if self.omega_0 <= 0 or self.omega_c <= 0:
            raise ValueError("omega_0 and omega_c must be positive")


def _cavity_tls_ops(n_fock: int):
    a = opalg.annihilation(n_fock)
    return a, opalg.identity(n_fock), opalg.identity(2)


def coulomb_single_mode(cfg: CouplingConfig) -> np.ndarray:
    """w_c a^dag a + (w_0/2)[cos(Phi) s_z + sin(Phi) s_y], Phi = 2(eta a + eta^* a^dag)."""
    a, i_f, i_2 = _cavity_tls_ops(cfg.n_fock)
    eta = complex(cfg.eta_c)
    phi = 2.0 * (eta * a + eta.conjugate() * a.conj().T)
    cos_phi = opalg.hermitian_function(phi, np.cos)
    sin_phi = opalg.hermitian_function(phi, np.sin)
    h = cfg.omega_c * np.kron(opalg.number(cfg.n_fock), i_2) + 0.5 * cfg.omega_0 * (
        np.kron(cos_phi, opalg.pauli("z")) + np.kron(sin_phi, opalg.pauli("y"))
    )
    return 0.5 * (h + h.conj().T)


def dipole_coupling_constant(cfg: CouplingConfig) -> complex:
    """g^d = -i w_c eta_c."""
    return -1j * cfg.omega_c * complex(cfg.eta_c)


def coulomb_coupling_constant(cfg: CouplingConfig) -> complex:
    """Leading-order Coulomb-gauge coupling g^C = eta_c w_0."""
    return complex(cfg.eta_c) * cfg.omega_0


def dipole_gauge_qrm(cfg: CouplingConfig) -> np.ndarray:
    a, i_f, i_2 = _cavity_tls_ops(cfg.n_fock)
    g = dipole_coupling_constant(cfg)
    h = (
        cfg.omega_c * np.kron(opalg.number(cfg.n_fock), i_2)
        + 0.5 * cfg.omega_0 * np.kron(i_f, opalg.pauli("z"))
        + np.kron(g * a + g.conjugate() * a.conj().T, opalg.pauli("x"))
    )
    return 0.5 * (h + h.conj().T)


def empty_cavity(omega_c: float, n_fock: int) -> np.ndarray:
    return omega_c * np.asarray(opalg.number(n_fock))


def hopfield_coulomb(cfg: CouplingConfig, lambda_c: complex) -> np.ndarray:
    """Coulomb-gauge Hopfield model on the cavity (x) matter-boson space."""
    a = opalg.annihilation(cfg.n_fock)
    b = opalg.annihilation(cfg.n_matter)
    lam = complex(lambda_c)
    x = lam * a + lam.conjugate() * a.conj().T
    p_b = 1j * (b - b.conj().T)
    i_a, i_b = opalg.identity(cfg.n_fock), opalg.identity(cfg.n_matter)
    h = (
        cfg.omega_c * np.kron(opalg.number(cfg.n_fock), i_b)
        + cfg.omega_0 * np.kron(i_a, opalg.number(cfg.n_matter))
        + cfg.omega_0 * np.kron(x @ x, i_b)
        + cfg.omega_0 * np.kron(x, p_b)
    )
    return 0.5 * (h + h.conj().T)


def lambda_from_dicke(eta_single: complex, n_tls: int) -> complex:
    if n_tls < 1:
        raise ValueError("n_tls must be >= 1")
    return math.sqrt(n_tls) * eta_single


def parity_operator(n_fock: int) -> np.ndarray:
    """exp(i pi a^dag a) (x) sigma_z."""
    p_f = np.diag((-1.0) ** np.arange(n_fock)).astype(complex)
    return np.kron(p_f, opalg.pauli("z"))


# -- full-space operators that accompany each Hamiltonian ---------------------

def cavity_annihilation(n_fock: int, second_dim: int = 2) -> np.ndarray:
    """a (x) 1 on a cavity (x) (TLS or matter) space; second_dim=1 gives the bare cavity."""
    return np.kron(opalg.annihilation(n_fock), np.eye(second_dim))


def matter_drive_operator(n_fock: int, n_matter: int) -> np.ndarray:
    """1 (x) i(b - b^dag), the matter-oscillator drive coupling."""
    b = opalg.annihilation(n_matter)
    return np.kron(np.eye(n_fock), 1j * (b - b.conj().T))


def dipole_gauge_shifted_a(eta_c: complex, n_fock: int) -> np.ndarray:
    """a' = a + i eta^* sigma_x: the cavity operator to pair with dipole-gauge eigenstates."""
    return cavity_annihilation(n_fock) + 1j * complex(eta_c).conjugate() * np.kron(
        np.eye(n_fock), opalg.pauli("x")
    )
