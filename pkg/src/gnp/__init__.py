"""Multimode Gaussian-state dynamics toolkit in the normal-product formalism.

Submodules:
  matcore     structured matrices and guarded dense linear algebra
  kernels     kernel forms G / sigma / R / C, conversions, constructors
  dynamics    covariance and normal-product flows, closed form and RK4
  phasespace  Husimi-Q / Wigner / characteristic evaluation and grids
  fockoracle  independent truncated Fock-space ground truth
  bridge      empirical calibration of the published-vs-physical convention
  stateio     JSON/CSV file formats
  cli         command-line front end
"""

__version__ = "0.1.0"

from .errors import DomainError, GnpError, NumericalError, TruncationError

__all__ = [
    "__version__",
    "GnpError",
    "DomainError",
    "NumericalError",
    "TruncationError",
]
