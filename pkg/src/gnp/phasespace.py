"""Closed-form phase-space evaluators.

Husimi-Q, Wigner and characteristic functions of Gaussian states, the
coherent-state Gaussian integral, grid evaluation and a numerical
normalization check.  The integration measure is fixed to d^2z/pi per mode;
every PhaseTable records it.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from . import kernels, matcore
from .errors import DomainError
from .kernels import AS_PUBLISHED, CALIBRATED, DEFAULT_BRIDGE, GaussianState
from .matcore import structured

MEASURE_NOTE = "d^2z/pi per mode"


@dataclass(frozen=True)
class PhasePoint:
    """Phase-space point; z holds the n mode amplitudes."""

    z: np.ndarray

    @staticmethod
    def of(z) -> "PhasePoint":
        return PhasePoint(z=np.atleast_1d(np.asarray(z, dtype=complex)))

    @property
    def Z(self) -> np.ndarray:
        """Assembled vector (z_1..z_n, z_1*..z_n*)."""
        return np.concatenate([self.z, self.z.conj()])


@dataclass(frozen=True)
class PhaseGrid:
    re_range: Tuple[float, float, int]
    im_range: Tuple[float, float, int]
    mode_index: int = 0
    fixed_amplitudes: tuple = ()

    def __post_init__(self):
        for lo, hi, count in (self.re_range, self.im_range):
            if count < 2 and not (count == 1 and lo == hi):
                raise ValueError("grid needs count >= 2 (or a single point)")
            if not (np.isfinite(lo) and np.isfinite(hi)):
                raise ValueError("grid ranges must be finite")

    def points(self) -> List[PhasePoint]:
        res = np.linspace(*self.re_range)
        ims = np.linspace(*self.im_range)
        out = []
        fixed = [complex(c) for c in self.fixed_amplitudes]
        n = len(fixed) + 1
        for re in res:            # row-major over (re, im)
            for im in ims:
                z = np.zeros(n, dtype=complex)
                others = iter(fixed)
                for k in range(n):
                    z[k] = re + 1j * im if k == self.mode_index else next(others)
                out.append(PhasePoint(z=z))
        return out


@dataclass
class PhaseTable:
    function_kind: str            # husimi | wigner | charfn
    convention: str
    points: List[PhasePoint] = field(default_factory=list)
    values: List[complex] = field(default_factory=list)
    measure_note: str = MEASURE_NOTE

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# function_kind={self.function_kind}\n")
        buf.write(f"# convention={self.convention}\n")
        buf.write(f"# measure_note={self.measure_note}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["re", "im", "value_re", "value_im"])
        for p, v in zip(self.points, self.values):
            z = p.z[0] if len(p.z) == 1 else p.z[0]
            w.writerow([repr(float(z.real)), repr(float(z.imag)),
                        repr(float(v.real)), repr(float(v.imag))])
        return buf.getvalue()

    @staticmethod
    def from_csv(text: str) -> "PhaseTable":
        meta = {}
        rows = []
        for line in text.splitlines():
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                meta[key] = val
            elif line.strip():
                rows.append(line)
        reader = csv.reader(rows)
        header = next(reader)
        if header != ["re", "im", "value_re", "value_im"]:
            raise ValueError("unexpected phase CSV header")
        table = PhaseTable(function_kind=meta.get("function_kind", ""),
                           convention=meta.get("convention", ""),
                           measure_note=meta.get("measure_note", ""))
        for row in reader:
            re, im, vre, vim = map(float, row)
            table.points.append(PhasePoint.of(re + 1j * im))
            table.values.append(complex(vre, vim))
        return table


def _as_point(Z) -> PhasePoint:
    return Z if isinstance(Z, PhasePoint) else PhasePoint.of(Z)


# ---------------------------------------------------------------------------
# evaluators

def husimi_q(state: GaussianState, Z, convention: str = AS_PUBLISHED) -> complex:
    """Husimi-Q value at a phase point.

    as-published: sqrt(det R) exp(-1/2 Z^T R Z) with the literal kernel.
    calibrated: bridge-mapped kernel with the trace-normalizing prefactor.
    """
    p = _as_point(Z)
    R = kernels.ensure_form(state, "R")
    if convention == AS_PUBLISHED:
        N = kernels.prefactor(R, AS_PUBLISHED).value
    elif convention == CALIBRATED:
        R = kernels.apply_r_map(R, DEFAULT_BRIDGE.r_map)
        N = kernels.prefactor(R, CALIBRATED).value
    else:
        raise ValueError(f"unknown convention {convention!r}")
    Zv = p.Z
    return complex(N * np.exp(-0.5 * Zv @ R @ Zv))


def wigner(state: GaussianState, Z) -> complex:
    """W(Z) = det(sigma)^{-1/2} exp(-Z^dag sigma^-1 Z), literal form."""
    p = _as_point(Z)
    sigma = kernels.ensure_form(state, "sigma")
    det = matcore.determinant(sigma)
    if abs(det) < 1e-300:
        raise DomainError("singular covariance kernel")
    Zv = p.Z
    expo = -(Zv.conj() @ matcore.dense_solve(sigma, Zv))
    return complex(np.sqrt(det) ** -1 * np.exp(expo))


def char_fn(state: GaussianState, Z) -> complex:
    """C(Z) = exp(-1/2 Z^dag C Z)."""
    p = _as_point(Z)
    C = kernels.char_kernel(state)
    Zv = p.Z
    return complex(np.exp(-0.5 * Zv.conj() @ C @ Zv))


# ---------------------------------------------------------------------------
# coherent-state Gaussian integral

def gauss_integral(V, X, convention: str = CALIBRATED) -> complex:
    """Closed form of the coherent-state Gaussian integral

        integral (dZ) exp(-1/2 Z^dag V Z) exp(Z^dag X)

    with measure d^2z/pi per mode.

    as-published: det(V)^{-1/2} exp(-1/2 X^T E V^-1 X), exactly as printed.
    calibrated:   det(V)^{-1/2} exp(+1/2 X^T E V^-1 X), the sign that agrees
    with direct quadrature (the printed exponent sign does not).

    Precondition: the Hermitian part of V is positive definite (decay) and
    the two diagonal n x n blocks of V agree, which is the class the closed
    form is exact for (all state-derived kernels C + I/2 are in it).
    """
    V = np.asarray(V, dtype=complex)
    X = np.asarray(X, dtype=complex)
    n = V.shape[0] // 2
    herm = 0.5 * (V + V.conj().T)
    if np.linalg.eigvalsh(herm).min() <= 0:
        raise DomainError("Gaussian integrand does not decay: Hermitian part "
                          "of V is not positive definite")
    if np.abs(V[:n, :n] - V[n:, n:]).max() > 1e-10 * max(1.0, np.abs(V).max()):
        raise DomainError("closed form requires equal diagonal blocks of V")
    E = structured("E", n)
    pref = complex(np.sqrt(matcore.determinant(V))) ** -1
    quad = 0.5 * (X @ E @ matcore.dense_solve(V, X))
    sign = -1.0 if convention == AS_PUBLISHED else +1.0
    if convention not in (AS_PUBLISHED, CALIBRATED):
        raise ValueError(f"unknown convention {convention!r}")
    return complex(pref * np.exp(sign * quad))


# ---------------------------------------------------------------------------
# grids and normalization

_EVALUATORS = {
    "husimi": lambda state, p, conv: husimi_q(state, p, conv),
    "wigner": lambda state, p, conv: wigner(state, p),
    "charfn": lambda state, p, conv: char_fn(state, p),
}


def grid_eval(state: GaussianState, function_kind: str, grid: PhaseGrid,
              convention: str = AS_PUBLISHED) -> PhaseTable:
    """Pointwise evaluation over a grid, deterministic row-major over (re, im)."""
    if function_kind not in _EVALUATORS:
        raise ValueError(f"unknown function kind {function_kind!r}")
    table = PhaseTable(function_kind=function_kind, convention=convention)
    fn = _EVALUATORS[function_kind]
    for p in grid.points():
        try:
            v = fn(state, p, convention)
        except Exception as exc:
            raise type(exc)(f"evaluation failed at z = {p.z}: {exc}") from exc
        table.points.append(p)
        table.values.append(v)
    return table


@dataclass(frozen=True)
class QuadratureSpec:
    radius: Optional[float] = None   # default: max(4, 4 max|sigma|^(1/2))
    points: int = 201


def q_norm_check(state: GaussianState, convention: str = CALIBRATED,
                 quadrature_spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Integral of the Husimi-Q function over d^2z/pi (single mode).

    Raises DomainError for a non-decaying integrand; the error message
    carries the finite-box integral estimate for the record.
    """
    if state.n_modes != 1:
        raise ValueError("normalization quadrature is single-mode only")
    R = kernels.ensure_form(state, "R")
    if convention == CALIBRATED:
        R = kernels.apply_r_map(R, DEFAULT_BRIDGE.r_map)
        N = kernels.prefactor(R, CALIBRATED).value
    else:
        N = kernels.prefactor(R, AS_PUBLISHED).value
    radius = quadrature_spec.radius
    if radius is None:
        sigma = kernels.ensure_form(state, "sigma")
        radius = max(4.0, 4.0 * float(np.sqrt(np.abs(sigma).max())))
    xs = np.linspace(-radius, radius, quadrature_spec.points)
    dx = xs[1] - xs[0]
    xg, yg = np.meshgrid(xs, xs, indexing="ij")
    z = xg + 1j * yg
    expo = -0.5 * (R[0, 0] * z * z + (R[0, 1] + R[1, 0]) * z * z.conj()
                   + R[1, 1] * z.conj() * z.conj())
    integral = complex(N * np.sum(np.exp(expo)) * dx * dx / np.pi)
    form = kernels._husimi_real_form(R)
    if np.linalg.eigvalsh(form).min() <= 0:
        raise DomainError(
            "Husimi integrand does not decay (divergent normalization); "
            f"finite-box estimate over radius {radius:g}: |integral| = "
            f"{abs(integral):.6g}"
        )
    return float(integral.real)
