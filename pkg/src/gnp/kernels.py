"""Gaussian-state kernel algebra.

Conversions among the four 2n x 2n kernels of a zero-mean Gaussian state:

  G      quadratic-form kernel of the density exponent,
  sigma  covariance kernel,
  R      normal-product kernel,
  C      characteristic-function kernel,

together with symplectic spectra, state constructors and normalization
prefactors.  Every formula is available exactly "as-published"; a separate
calibrated layer applies the empirically determined convention bridge
(see gnp.bridge for the calibration itself).

Operator-vector ordering throughout: A = (a_1..a_n, a_1^+..a_n^+)^T.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from . import matcore
from .errors import DomainError, NumericalError
from .matcore import structured

AS_PUBLISHED = "as-published"
CALIBRATED = "calibrated"
OPERATOR_ORDERING = "A = (a_1..a_n, a_1^+..a_n^+)^T"

TOL_CONV = 1e-9      # cross-form consistency tolerance
FORMS = ("G", "sigma", "R", "C")


# ---------------------------------------------------------------------------
# state container

@dataclass
class GaussianState:
    """An n-mode Gaussian state carrying one or more kernel forms."""

    n_modes: int
    forms: Dict[str, np.ndarray]
    convention: str = AS_PUBLISHED
    provenance: str = ""

    def __post_init__(self):
        d = 2 * self.n_modes
        for name, M in self.forms.items():
            if name not in FORMS:
                raise ValueError(f"unknown kernel form {name!r}")
            M = np.asarray(M, dtype=complex)
            if M.shape != (d, d):
                raise ValueError(f"form {name}: expected shape {(d, d)}, got {M.shape}")
            self.forms[name] = M

    def has(self, form: str) -> bool:
        return form in self.forms


@dataclass(frozen=True)
class SymplecticSpectrum:
    """Williamson frequencies omega_i and thermal weights nu_i."""

    omegas: np.ndarray
    nus: np.ndarray


@dataclass(frozen=True)
class ConventionBridge:
    """Empirically calibrated map from as-published kernels to physical ones."""

    r_map: str
    prefactor_rule: str
    residual: float


@dataclass(frozen=True)
class Prefactor:
    value: complex
    rule: str
    is_real: bool


# ---------------------------------------------------------------------------
# scalar helpers

def _coth(x):
    return 1.0 / np.tanh(x)


def _eq9_ratio(x):
    # (1 + e^-x) / (1 - e^-x), i.e. coth(x/2) in exponential form
    return (1.0 + np.exp(-x)) / (1.0 - np.exp(-x))


# ---------------------------------------------------------------------------
# validation

@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tol: float
    passed: bool
    note: str = ""


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name, residual, tol, note=""):
        self.checks.append(
            CheckResult(name, float(residual), tol, bool(residual <= tol), note)
        )

    def lines(self):
        out = []
        for c in self.checks:
            status = "ok" if c.passed else "FAIL"
            line = f"{status:4s} {c.name}: residual {c.residual:.3e} (tol {c.tol:.0e})"
            if c.note:
                line += f"  [{c.note}]"
            out.append(line)
        return out


def validate_state(state: GaussianState) -> ValidationReport:
    """Per-form symmetry/positivity checks plus cross-form consistency."""
    if not state.forms:
        raise ValueError("state carries no kernel form")
    report = ValidationReport()
    d = 2 * state.n_modes

    if state.has("G"):
        G = state.forms["G"]
        report.add("G.real", np.abs(G.imag).max(), 1e-12)
        report.add("G.symmetric", np.abs(G - G.T).max(), 1e-12)
        w = np.linalg.eigvalsh(G.real)
        report.add("G.positive_definite", max(0.0, -w.min()), 1e-12,
                   note=f"min eigenvalue {w.min():.6g}")
    if state.has("sigma"):
        sigma = state.forms["sigma"]
        report.add("sigma.symmetric", np.abs(sigma - sigma.T).max(), 1e-12)
        w = np.linalg.eigvals(sigma - np.eye(d))
        report.add("sigma.thermal_floor", max(0.0, -w.real.min()), 1e-9,
                   note="eigenvalues of sigma - I must have nonnegative real part")
    if state.has("R"):
        R = state.forms["R"]
        det = abs(matcore.determinant(R))
        report.add("R.nonsingular", 0.0 if det > 1e-12 else 1.0, 0.5,
                   note=f"|det R| = {det:.3e}")

    # cross-form consistency (only meaningful pairs)
    def cross(name, computed, stored):
        scale = max(np.abs(stored).max(), 1.0)
        report.add(name, np.abs(computed - stored).max() / scale, TOL_CONV)

    try:
        if state.has("G") and state.has("sigma"):
            cross("cross.G_vs_sigma", g_to_sigma(state.forms["G"]), state.forms["sigma"])
        if state.has("sigma") and state.has("R"):
            cross("cross.sigma_vs_R", sigma_to_r(state.forms["sigma"]), state.forms["R"])
        if state.has("G") and state.has("R") and not state.has("sigma"):
            cross("cross.G_vs_R", g_to_r(state.forms["G"]), state.forms["R"])
        if state.has("sigma") and state.has("C"):
            cross("cross.sigma_vs_C", sigma_to_c(state.forms["sigma"]), state.forms["C"])
        if state.has("C") and not state.has("sigma") and state.has("G"):
            cross("cross.G_vs_C", c_from_g(state.forms["G"]), state.forms["C"])
    except (DomainError, NumericalError) as exc:
        report.add("cross.evaluable", 1.0, 0.5, note=str(exc))
    return report


# ---------------------------------------------------------------------------
# kernel conversions

def g_to_sigma(G) -> np.ndarray:
    """sigma = coth(Omega G / 2) Omega."""
    G = np.asarray(G, dtype=complex)
    n = G.shape[0] // 2
    Om = structured("Omega", n)
    return matcore.mat_analytic(Om @ G, lambda x: _coth(x / 2.0)) @ Om


def sigma_to_g(sigma) -> np.ndarray:
    """Inverse of g_to_sigma: G = 2 Omega arccoth(sigma Omega).

    Raises DomainError when sigma Omega has an eigenvalue in [-1, 1]
    (the state would sit on or beyond the vacuum boundary).
    """
    sigma = np.asarray(sigma, dtype=complex)
    n = sigma.shape[0] // 2
    Om = structured("Omega", n)
    M = sigma @ Om
    vals = np.linalg.eigvals(M)
    bad = (np.abs(vals.imag) < 1e-10) & (np.abs(vals.real) <= 1.0 + 1e-10)
    if np.any(bad):
        raise DomainError(
            f"sigma*Omega has eigenvalue(s) {vals[bad]} in [-1, 1]; "
            "arccoth is undefined there (unphysical sigma)"
        )
    arccoth = lambda x: 0.5 * np.log((x + 1.0) / (x - 1.0))
    return 2.0 * Om @ matcore.mat_analytic(M, arccoth)


def sigma_to_r(sigma) -> np.ndarray:
    """R = -2 E (sigma + I)^-1, as-published sign."""
    sigma = np.asarray(sigma, dtype=complex)
    n = sigma.shape[0] // 2
    E = structured("E", n)
    return -2.0 * E @ matcore.inverse(sigma + np.eye(2 * n))


def r_to_sigma(R) -> np.ndarray:
    """Inverse of sigma_to_r: sigma = -2 R^-1 E - I."""
    R = np.asarray(R, dtype=complex)
    n = R.shape[0] // 2
    E = structured("E", n)
    return -2.0 * matcore.inverse(R) @ E - np.eye(2 * n)


def g_to_r(G) -> np.ndarray:
    """Direct G -> R map, evaluated literally:

    R = -2 (E + J (I + e^{-EGJ})(I - e^{-EGJ})^{-1})^{-1}.
    """
    G = np.asarray(G, dtype=complex)
    n = G.shape[0] // 2
    E = structured("E", n)
    J = structured("J", n)
    F = matcore.mat_analytic(E @ G @ J, _eq9_ratio)
    return -2.0 * matcore.inverse(E + J @ F)


def sigma_to_c(sigma) -> np.ndarray:
    """C = (1/2) Omega sigma Omega."""
    sigma = np.asarray(sigma, dtype=complex)
    n = sigma.shape[0] // 2
    Om = structured("Omega", n)
    return 0.5 * Om @ sigma @ Om


def c_to_sigma(C) -> np.ndarray:
    C = np.asarray(C, dtype=complex)
    n = C.shape[0] // 2
    Om = structured("Omega", n)
    return 2.0 * Om @ C @ Om


def c_from_g(G) -> np.ndarray:
    """C computed from G without passing through sigma:

    C = (Omega/2) (I + e^{-Omega G})(I - e^{-Omega G})^{-1}.
    """
    G = np.asarray(G, dtype=complex)
    n = G.shape[0] // 2
    Om = structured("Omega", n)
    return 0.5 * Om @ matcore.mat_analytic(Om @ G, _eq9_ratio)


def char_kernel(state: GaussianState) -> np.ndarray:
    """Characteristic kernel C from whichever form the state carries."""
    if state.has("C"):
        return state.forms["C"]
    if state.has("sigma"):
        return sigma_to_c(state.forms["sigma"])
    if state.has("G"):
        return c_from_g(state.forms["G"])
    if state.has("R"):
        return sigma_to_c(r_to_sigma(state.forms["R"]))
    raise ValueError("state carries no kernel form")


_CONVERTERS = {
    ("G", "sigma"): g_to_sigma,
    ("G", "R"): g_to_r,
    ("G", "C"): c_from_g,
    ("sigma", "G"): sigma_to_g,
    ("sigma", "R"): sigma_to_r,
    ("sigma", "C"): sigma_to_c,
    ("R", "sigma"): r_to_sigma,
    ("C", "sigma"): c_to_sigma,
}


def ensure_form(state: GaussianState, form: str) -> np.ndarray:
    """Return the requested kernel, converting from a stored form if needed."""
    if form not in FORMS:
        raise ValueError(f"unknown form {form!r}")
    if state.has(form):
        return state.forms[form]
    for src in ("sigma", "G", "R", "C"):
        if not state.has(src):
            continue
        if (src, form) in _CONVERTERS:
            return _CONVERTERS[(src, form)](state.forms[src])
        # two-step path through sigma
        if (src, "sigma") in _CONVERTERS and ("sigma", form) in _CONVERTERS:
            sigma = _CONVERTERS[(src, "sigma")](state.forms[src])
            return _CONVERTERS[("sigma", form)](sigma)
    raise ValueError(f"no conversion path to form {form!r} from {list(state.forms)}")


# ---------------------------------------------------------------------------
# spectra and constructors

def symplectic_spectrum(G) -> SymplecticSpectrum:
    """Williamson frequencies of a real symmetric positive definite G.

    The eigenvalues of J G come in pairs +-i omega_i; returns omega sorted
    ascending together with nu_i = (1 + e^-omega_i)/(1 - e^-omega_i).
    """
    G = np.asarray(G, dtype=complex)
    if np.abs(G.imag).max() > 1e-12 or np.abs(G - G.T).max() > 1e-12:
        raise DomainError("G must be real symmetric")
    if np.linalg.eigvalsh(G.real).min() <= 0:
        raise DomainError("G must be positive definite")
    n = G.shape[0] // 2
    J = structured("J", n)
    vals = np.linalg.eigvals(J @ G)
    scale = max(np.abs(vals).max(), 1.0)
    if np.abs(vals.real).max() > 1e-9 * scale:
        raise DomainError("eigenvalues of J G are not purely imaginary; "
                          "G is outside the Williamson class for this convention")
    pos = np.sort(vals.imag[vals.imag > 0])
    neg = np.sort(-vals.imag[vals.imag < 0])
    if len(pos) != n or len(neg) != n or np.abs(pos - neg).max() > 1e-9 * scale:
        raise DomainError("eigenvalues of J G do not pair as +-i omega")
    omegas = 0.5 * (pos + neg)
    nus = (1.0 + np.exp(-omegas)) / (1.0 - np.exp(-omegas))
    return SymplecticSpectrum(omegas=omegas, nus=nus)


def _check_omegas(omegas) -> np.ndarray:
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    if np.any(omegas <= 0):
        raise DomainError("all Williamson frequencies must be positive")
    return omegas


def squeeze_symplectic(rs) -> np.ndarray:
    """Mode-wise single-mode squeeze blocks assembled into a 2n x 2n symplectic:

    S = [[diag(cosh r), diag(sinh r)], [diag(sinh r), diag(cosh r)]].
    """
    rs = np.atleast_1d(np.asarray(rs, dtype=float))
    c = np.diag(np.cosh(rs))
    s = np.diag(np.sinh(rs))
    return np.block([[c, s], [s, c]])


def make_thermal(omegas) -> GaussianState:
    """Thermal normal form: G = diag(omega, omega) (the K-tilde block form)."""
    omegas = _check_omegas(omegas)
    G = np.diag(np.concatenate([omegas, omegas])).astype(complex)
    nus = (1.0 + np.exp(-omegas)) / (1.0 - np.exp(-omegas))
    sigma = np.diag(np.concatenate([nus, nus])).astype(complex)
    return GaussianState(
        n_modes=len(omegas),
        forms={"G": G, "sigma": sigma},
        provenance=f"thermal(omegas={list(omegas)})",
    )


def make_squeezed_thermal(omegas, rs) -> GaussianState:
    """Squeezed thermal state: G = S^T K-tilde S, sigma = S^-1 nu-tilde S^-T."""
    omegas = _check_omegas(omegas)
    rs = np.atleast_1d(np.asarray(rs, dtype=float))
    if len(rs) != len(omegas):
        raise ValueError("need one squeeze parameter per mode")
    S = squeeze_symplectic(rs)
    Ktilde = np.diag(np.concatenate([omegas, omegas]))
    nus = (1.0 + np.exp(-omegas)) / (1.0 - np.exp(-omegas))
    nutilde = np.diag(np.concatenate([nus, nus]))
    Sinv = np.linalg.inv(S)
    G = (S.T @ Ktilde @ S).astype(complex)
    sigma = (Sinv @ nutilde @ Sinv.T).astype(complex)
    return GaussianState(
        n_modes=len(omegas),
        forms={"G": G, "sigma": sigma},
        provenance=f"squeezed_thermal(omegas={list(omegas)}, rs={list(rs)})",
    )


# ---------------------------------------------------------------------------
# convention bridge and prefactors

def apply_r_map(R, r_map: str) -> np.ndarray:
    """Apply one of the fixed bridge hypotheses to a normal-product kernel."""
    R = np.asarray(R, dtype=complex)
    n = R.shape[0] // 2
    E = structured("E", n)
    Om = structured("Omega", n)
    if r_map == "identity":
        return R.copy()
    if r_map == "negate":
        return -R
    if r_map == "conjugate-by-E":
        return E @ R @ E
    if r_map == "conjugate-by-Omega":
        return Om @ R @ Om
    if r_map == "negate-conjugate-by-E":
        return -(E @ R @ E)
    raise ValueError(f"unknown bridge map {r_map!r}")


R_MAP_HYPOTHESES = (
    "identity",
    "negate",
    "conjugate-by-E",
    "conjugate-by-Omega",
    "negate-conjugate-by-E",
)

PREFACTOR_RULES = ("sqrt-det-R", "sqrt-det-ER", "trace-normalized")

# Calibrated against the Fock oracle (gnp.bridge.calibrate); the residual is
# the max kernel deviation over the calibration suite at cutoff 40.
DEFAULT_BRIDGE = ConventionBridge(
    r_map="negate", prefactor_rule="trace-normalized", residual=2.755e-10
)


def _husimi_real_form(R) -> np.ndarray:
    """Real 2n x 2n quadratic form of Re[(1/2) Z^T R Z] in (x, y) coordinates."""
    R = np.asarray(R, dtype=complex)
    n = R.shape[0] // 2
    eye = np.eye(n)
    T = np.block([[eye, 1j * eye], [eye, -1j * eye]])  # Z = T (x, y)
    H = 0.5 * (T.T @ R @ T)
    H = 0.5 * (H + H.T)
    return H.real


def trace_of_normal_exponential(R) -> float:
    """Tr(:exp(-1/2 A^T R A):) under the d^2z/pi per-mode measure.

    Closed form det(E R)^{-1/2}; DomainError when the coherent-state
    integrand does not decay.
    """
    R = np.asarray(R, dtype=complex)
    n = R.shape[0] // 2
    form = _husimi_real_form(R)
    if np.linalg.eigvalsh(form).min() <= 0:
        raise DomainError("trace integrand does not decay (quadratic form not "
                          "positive definite); divergent Gaussian integral")
    E = structured("E", n)
    det = matcore.determinant(E @ R)
    val = complex(np.sqrt(det)) ** -1
    return float(val.real)


def prefactor(R, mode: str = AS_PUBLISHED) -> Prefactor:
    """Normalization prefactor of the normal-product density form.

    as-published: principal sqrt(det R); non-real values are flagged.
    calibrated: trace-normalizing constant N with N Tr(:exp(-A^T R A / 2):) = 1.
    """
    R = np.asarray(R, dtype=complex)
    det = matcore.determinant(R)
    if abs(det) < 1e-300:
        raise NumericalError("singular R: det R = 0")
    if mode == AS_PUBLISHED:
        value = complex(np.sqrt(det))
        is_real = abs(value.imag) <= 1e-12 * max(abs(value), 1.0)
        return Prefactor(value=value, rule="sqrt-det-R", is_real=is_real)
    if mode == CALIBRATED:
        N = 1.0 / trace_of_normal_exponential(R)
        return Prefactor(value=complex(N), rule="trace-normalized", is_real=True)
    raise ValueError(f"unknown prefactor mode {mode!r}")


def prefactor_by_rule(R, rule: str) -> complex:
    """Evaluate one of the fixed prefactor hypotheses on a kernel."""
    R = np.asarray(R, dtype=complex)
    n = R.shape[0] // 2
    if rule == "sqrt-det-R":
        return complex(np.sqrt(matcore.determinant(R)))
    if rule == "sqrt-det-ER":
        return complex(np.sqrt(matcore.determinant(structured("E", n) @ R)))
    if rule == "trace-normalized":
        return complex(1.0 / trace_of_normal_exponential(R))
    raise ValueError(f"unknown prefactor rule {rule!r}")
