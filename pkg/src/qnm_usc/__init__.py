"""Single-mode quantized-QNM master equations for lossy ultrastrong-coupling cavity QED.

Conventions used across the package:

* energies and rates are hbar*omega in eV (hbar = 1),
* composite spaces are ordered cavity (x) TLS, or cavity (x) matter boson,
* the TLS basis is (|e>, |g>), so sigma_z = diag(1, -1),
* density matrices are vectorized row-major: vec(A rho B) = kron(A, B.T) vec(rho).
"""
__version__ = "0.1.0"

from .errors import (ConfigError, NegativeRateError, NumericalError, PhysicsError,  # noqa: F401
                     QnmUscError)
from .qnm import QnmParams, SpectralDensityModel  # noqa: F401
from .simulate import Settings, simulate  # noqa: F401
