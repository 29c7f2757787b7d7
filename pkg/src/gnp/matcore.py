"""Dense complex matrix kernel.

Structured constant matrices, matrix exponential, analytic matrix functions
via eigendecomposition, determinants, linear solves and symplectic residuals.
All kernels in this package are small (2n x 2n with n <= 4 in practice), so
everything here is plain dense linear algebra on complex128 arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import DomainError, NumericalError

TOL_EIG = 1e-9        # relative eigendecomposition reconstruction residual
TOL_SOLVE = 1e-10     # relative linear-solve residual
COND_LIMIT = 1e12     # condition number beyond which we refuse to proceed

_KINDS = ("J", "Omega", "E", "I")


def _as_square(M) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NumericalError("matrix contains non-finite entries")
    return M


def structured(kind: str, n_modes: int) -> np.ndarray:
    """Return one of the exact 0/+-1 constant matrices.

    J = [[0, I], [-I, 0]], Omega = [[I, 0], [0, -I]], E = [[0, I], [I, 0]],
    I = identity, each of size 2*n_modes.
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown structured kind {kind!r}, expected one of {_KINDS}")
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    n = n_modes
    eye = np.eye(n)
    zero = np.zeros((n, n))
    if kind == "J":
        return np.block([[zero, eye], [-eye, zero]])
    if kind == "Omega":
        return np.block([[eye, zero], [zero, -eye]])
    if kind == "E":
        return np.block([[zero, eye], [eye, zero]])
    return np.eye(2 * n)


@dataclass(frozen=True)
class EigDecomp:
    """Eigendecomposition M = V diag(values) V^-1 with a condition estimate."""

    values: np.ndarray
    right_vectors: np.ndarray
    condition_estimate: float

    def reconstruct(self) -> np.ndarray:
        return (self.right_vectors * self.values) @ np.linalg.inv(self.right_vectors)


def eig_decomp(M) -> EigDecomp:
    """Diagonalize M, refusing ill-conditioned eigenbases.

    Raises NumericalError if the eigenvector matrix condition exceeds
    COND_LIMIT or the reconstruction residual exceeds TOL_EIG * ||M||.
    """
    M = _as_square(M)
    values, vectors = np.linalg.eig(M)
    cond = float(np.linalg.cond(vectors))
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise NumericalError(
            f"eigenbasis condition {cond:.3e} exceeds {COND_LIMIT:.1e}; "
            "matrix is defective or near-defective"
        )
    dec = EigDecomp(values=values, right_vectors=vectors, condition_estimate=cond)
    scale = max(np.linalg.norm(M), 1e-300)
    residual = np.linalg.norm(dec.reconstruct() - M) / scale
    if residual > TOL_EIG:
        raise NumericalError(
            f"eigendecomposition reconstruction residual {residual:.3e} > {TOL_EIG:.0e}"
        )
    return dec


def mat_exp(M) -> np.ndarray:
    """Matrix exponential (scaling-and-squaring, via scipy)."""
    M = _as_square(M)
    out = scipy.linalg.expm(M)
    if not np.all(np.isfinite(out)):
        raise NumericalError("matrix exponential overflowed")
    return out


def mat_analytic(M, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Evaluate a scalar analytic function of a diagonalizable matrix.

    Computes V f(diag lambda) V^-1. Raises DomainError if f is non-finite at
    an eigenvalue (e.g. coth at 0) and NumericalError for a bad eigenbasis.
    """
    dec = eig_decomp(M)
    with np.errstate(all="ignore"):
        fvals = np.asarray(f(dec.values), dtype=complex)
    if fvals.shape != dec.values.shape:
        raise ValueError("f must map the eigenvalue vector elementwise")
    if not np.all(np.isfinite(fvals)):
        bad = dec.values[~np.isfinite(fvals)]
        raise DomainError(f"function not finite at eigenvalue(s) {bad}")
    V = dec.right_vectors
    return (V * fvals) @ np.linalg.inv(V)


def determinant(M) -> complex:
    """LU-based determinant."""
    return complex(np.linalg.det(_as_square(M)))


def dense_solve(M, B) -> np.ndarray:
    """Solve M X = B, refusing near-singular systems.

    The inverse of M is dense_solve(M, I).
    """
    M = _as_square(M)
    B = np.asarray(B, dtype=complex)
    cond = float(np.linalg.cond(M))
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise NumericalError(f"matrix condition {cond:.3e} exceeds {COND_LIMIT:.1e}")
    X = np.linalg.solve(M, B)
    scale = max(np.linalg.norm(B), 1e-300)
    residual = np.linalg.norm(M @ X - B) / scale
    if residual > TOL_SOLVE:
        raise NumericalError(f"solve residual {residual:.3e} > {TOL_SOLVE:.0e}")
    return X


def inverse(M) -> np.ndarray:
    return dense_solve(M, np.eye(np.asarray(M).shape[0]))


def symplectic_residual(S) -> float:
    """max(||S^T J S - J||, ||S J S^T - J||) in the max (entrywise) norm."""
    S = _as_square(S)
    if S.shape[0] % 2 != 0:
        raise ValueError("symplectic candidates must be 2n x 2n")
    J = structured("J", S.shape[0] // 2)
    r1 = np.abs(S.T @ J @ S - J).max()
    r2 = np.abs(S @ J @ S.T - J).max()
    return float(max(r1, r2))
