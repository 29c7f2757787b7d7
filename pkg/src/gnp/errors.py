"""Exception hierarchy shared across the toolkit."""


class GnpError(Exception):
    """Base class for all toolkit errors."""


class DomainError(GnpError):
    """Input is outside the mathematical domain of the operation
    (pole of a matrix function, non-decaying Gaussian, unphysical kernel)."""


class NumericalError(GnpError):
    """The computation broke down numerically (singular solve,
    ill-conditioned eigenbasis, overflow, non-finite intermediate)."""


class TruncationError(GnpError):
    """A Fock-space truncation is too small for the requested quantity."""
