"""Time evolution engines.

Covariance flow       sigma-dot = (JH) sigma + sigma (JH)^T,  sigma(t) = S sigma S^T
Normal-product flow   R-dot = i (R J H - H J R)

with both closed-form propagators and a fixed-step RK4 reference integrator,
invariant monitoring (det conservation, symplecticity) and the audits that
discriminate the ordering/convention ambiguities of the closed forms.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import List

import numpy as np

from . import kernels, matcore
from .errors import NumericalError
from .matcore import structured

VARIANTS = ("a", "b")


@dataclass
class QuadraticHamiltonian:
    """Validated 2n x 2n kernel H of H-hat = (1/2) A^T H A."""

    n_modes: int
    H: np.ndarray

    def __post_init__(self):
        H = np.asarray(self.H, dtype=complex)
        d = 2 * self.n_modes
        if H.shape != (d, d):
            raise ValueError(f"expected shape {(d, d)}, got {H.shape}")
        if np.abs(H.imag).max() > 1e-12 or np.abs(H - H.T).max() > 1e-12:
            raise ValueError("H must be real symmetric")
        if np.linalg.eigvalsh(H.real).min() <= 0:
            warnings.warn("H is not positive definite; evolution is still "
                          "defined, but the state class is unusual")
        self.H = H.real


@dataclass(frozen=True)
class Propagator:
    """Closed-form evolution pair (left, right): X(t) = left @ X0 @ right."""

    variant: str
    t: float
    left: np.ndarray
    right: np.ndarray


@dataclass
class Trajectory:
    kind: str                       # "covariance" or "normal"
    H: np.ndarray
    times: List[float] = field(default_factory=list)
    kernels: List[np.ndarray] = field(default_factory=list)
    invariants_log: List[dict] = field(default_factory=list)


# ---------------------------------------------------------------------------
# right-hand sides and closed forms

def covariance_rhs(sigma, H) -> np.ndarray:
    """(JH) sigma + sigma (JH)^T."""
    sigma = np.asarray(sigma, dtype=complex)
    H = np.asarray(H, dtype=complex)
    JH = structured("J", H.shape[0] // 2) @ H
    return JH @ sigma + sigma @ JH.T


def normal_rhs(R, H) -> np.ndarray:
    """i (R J H - H J R)."""
    R = np.asarray(R, dtype=complex)
    H = np.asarray(H, dtype=complex)
    J = structured("J", H.shape[0] // 2)
    return 1j * (R @ J @ H - H @ J @ R)


def covariance_propagator(H, t: float) -> Propagator:
    """S(t) = exp(J H t); sigma evolves by S sigma S^T."""
    H = np.asarray(H, dtype=complex)
    S = matcore.mat_exp(structured("J", H.shape[0] // 2) @ H * t)
    return Propagator(variant="covariance", t=t, left=S, right=S.T)


def covariance_propagate(sigma0, H, t: float) -> np.ndarray:
    p = covariance_propagator(H, t)
    return p.left @ np.asarray(sigma0, dtype=complex) @ p.right


def normal_propagator(H, t: float, variant: str) -> Propagator:
    """Closed-form propagator pair for the normal-product flow.

    variant "a": left = exp(-i J H t), right = left^T, exactly as printed.
    variant "b": left = exp(-i H J t), right = exp(+i J H t), the ordering
    that solves the flow equation for symmetric H (since (HJ)^T = -JH).
    """
    H = np.asarray(H, dtype=complex)
    J = structured("J", H.shape[0] // 2)
    if variant == "a":
        U = matcore.mat_exp(-1j * J @ H * t)
        return Propagator(variant="a", t=t, left=U, right=U.T)
    if variant == "b":
        return Propagator(
            variant="b",
            t=t,
            left=matcore.mat_exp(-1j * H @ J * t),
            right=matcore.mat_exp(1j * J @ H * t),
        )
    raise ValueError(f"unknown variant {variant!r}, expected 'a' or 'b'")


def normal_propagate(R0, H, t: float, variant: str = "b") -> np.ndarray:
    p = normal_propagator(H, t, variant)
    return p.left @ np.asarray(R0, dtype=complex) @ p.right


# ---------------------------------------------------------------------------
# reference integrator

_RHS = {"covariance": covariance_rhs, "normal": normal_rhs}


def integrate_rk4(kind: str, X0, H, t_end: float, steps: int) -> Trajectory:
    """Classical fixed-step RK4 for either flow, logging invariants per step."""
    if kind not in _RHS:
        raise ValueError(f"unknown flow kind {kind!r}")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    rhs = _RHS[kind]
    H = np.asarray(H, dtype=complex)
    X = np.asarray(X0, dtype=complex).copy()
    h = float(t_end) / steps
    traj = Trajectory(kind=kind, H=H)
    det0 = matcore.determinant(X)
    _log_point(traj, 0.0, X, det0)
    for k in range(steps):
        k1 = rhs(X, H)
        k2 = rhs(X + 0.5 * h * k1, H)
        k3 = rhs(X + 0.5 * h * k2, H)
        k4 = rhs(X + h * k3, H)
        X = X + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(X)):
            raise NumericalError(f"non-finite kernel at step {k + 1}")
        _log_point(traj, (k + 1) * h, X, det0)
    return traj


def _log_point(traj: Trajectory, t: float, X: np.ndarray, det0: complex):
    det = matcore.determinant(X)
    entry = {"det_kernel": det,
             "det_drift": abs(det - det0) / max(abs(det0), 1e-300)}
    if traj.kind == "covariance":
        entry["symplectic_residual"] = matcore.symplectic_residual(
            matcore.mat_exp(structured("J", X.shape[0] // 2) @ traj.H * t))
    traj.times.append(float(t))
    traj.kernels.append(X.copy())
    traj.invariants_log.append(entry)


# ---------------------------------------------------------------------------
# reports

@dataclass
class InvariantsReport:
    kind: str
    max_det_drift: float
    max_symplectic_residual: float
    logdet_trace_residual: float
    notes: str = ""


def invariants_report(traj: Trajectory) -> InvariantsReport:
    """Conservation report: det drift along the flow, symplecticity of the
    accumulated covariance propagator, and ln det R = tr ln R at t = 0."""
    if not traj.times:
        raise ValueError("empty trajectory")
    det_drift = max(e["det_drift"] for e in traj.invariants_log)
    sympl = max((e.get("symplectic_residual", 0.0) for e in traj.invariants_log),
                default=0.0)
    R0 = traj.kernels[0]
    notes = ""
    logdet_res = float("nan")
    vals = np.linalg.eigvals(R0)
    on_cut = np.any((vals.real <= 0) & (np.abs(vals.imag) < 1e-12))
    if on_cut:
        notes = "ln det = tr ln skipped: eigenvalue on the log branch cut"
    else:
        try:
            logR = matcore.mat_analytic(R0, np.log)
            lhs = np.log(matcore.determinant(R0))
            rhs = np.trace(logR)
            logdet_res = abs(lhs - rhs) / max(abs(lhs), 1.0)
        except (NumericalError, Exception) as exc:  # noqa: BLE001
            notes = f"ln det = tr ln skipped: {exc}"
    return InvariantsReport(
        kind=traj.kind,
        max_det_drift=float(det_drift),
        max_symplectic_residual=float(sympl),
        logdet_trace_residual=float(logdet_res),
        notes=notes,
    )


@dataclass
class OrderingAuditReport:
    residuals: dict            # variant -> max flow-equation residual
    consistent_variants: list  # variants with residual <= tol
    vacuous: bool
    note: str = ""


def ordering_audit(R0, H, t_end: float, samples: int = 5,
                   tol: float = 1e-6) -> OrderingAuditReport:
    """Check which closed-form variant actually solves the flow equation.

    For each variant the residual || dR/dt - i(R J H - H J R) || is sampled
    at `samples` interior times via centered differences.  The audit is
    flagged vacuous when it cannot discriminate (commuting J H = H J, or a
    stationary kernel).
    """
    R0 = np.asarray(R0, dtype=complex)
    H = np.asarray(H, dtype=complex)
    J = structured("J", H.shape[0] // 2)
    h = 1e-5 * max(1.0, abs(t_end))
    ts = np.linspace(t_end / samples, t_end, samples)
    residuals = {}
    for variant in VARIANTS:
        worst = 0.0
        for t in ts:
            Rp = normal_propagate(R0, H, t + h, variant)
            Rm = normal_propagate(R0, H, t - h, variant)
            dR = (Rp - Rm) / (2 * h)
            R = normal_propagate(R0, H, t, variant)
            worst = max(worst, float(np.abs(dR - normal_rhs(R, H)).max()))
        residuals[variant] = worst
    consistent = [v for v in VARIANTS if residuals[v] <= tol]
    commuting = np.abs(J @ H - H @ J).max() <= 1e-12
    stationary = np.abs(normal_rhs(R0, H)).max() <= 1e-12
    vacuous = len(consistent) == len(VARIANTS)
    note = ""
    if commuting:
        note = "J H = H J commute: variants coincide, audit vacuous"
    elif stationary:
        note = "kernel is stationary under this H: audit vacuous"
    elif vacuous:
        note = "both variants satisfy the flow equation here"
    return OrderingAuditReport(
        residuals=residuals,
        consistent_variants=consistent,
        vacuous=vacuous,
        note=note,
    )


@dataclass
class ConventionAuditReport:
    residuals: dict   # variant -> max || R_variant(t) - sigma_to_r(sigma(t)) ||
    note: str = ""


def convention_audit(state: kernels.GaussianState, H, t_end: float,
                     samples: int = 9) -> ConventionAuditReport:
    """Descriptive cross-check of the covariance flow against the normal flow.

    Evolves sigma(t) by the symplectic closed form and R(t) by each variant,
    and reports the max deviation || R_variant(t) - sigma_to_r(sigma(t)) ||
    over sampled times.  Purely descriptive: the two flows are stated by the
    source formalism in possibly different bases, and this audit records the
    discrepancy without resolving it.
    """
    H = np.asarray(H, dtype=complex)
    sigma0 = kernels.ensure_form(state, "sigma")
    R0 = kernels.ensure_form(state, "R")
    ts = np.linspace(0.0, t_end, samples)
    residuals = {v: 0.0 for v in VARIANTS}
    for t in ts:
        sigma_t = covariance_propagate(sigma0, H, t)
        R_from_sigma = kernels.sigma_to_r(sigma_t)
        for v in VARIANTS:
            R_v = normal_propagate(R0, H, t, v)
            residuals[v] = max(residuals[v], float(np.abs(R_v - R_from_sigma).max()))
    return ConventionAuditReport(
        residuals=residuals,
        note="descriptive only: covariance and normal flows are defined with "
             "different propagator conventions",
    )
