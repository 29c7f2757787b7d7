"""File formats: state/Hamiltonian JSON and trajectory CSV.

Complex entries are serialized as [re, im] pairs; floats are printed via
repr (shortest round-trip), so every file round-trips through its own
reader bit-exactly.
"""

from __future__ import annotations

import io
import json

import numpy as np

from .dynamics import QuadraticHamiltonian, Trajectory
from .errors import GnpError
from .kernels import AS_PUBLISHED, FORMS, GaussianState


class ParseError(GnpError):
    """Malformed or unreadable input file."""


def _matrix_to_pairs(M) -> list:
    M = np.asarray(M, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in M]


def _pairs_to_matrix(data, context: str) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{context}: matrix entries must be [re, im] pairs") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ParseError(f"{context}: matrix entries must be [re, im] pairs")
    M = arr[..., 0] + 1j * arr[..., 1]
    if not np.all(np.isfinite(arr)):
        raise ParseError(f"{context}: non-finite matrix entry")
    return M


def write_state(path, state: GaussianState, form: str) -> None:
    doc = {
        "n_modes": state.n_modes,
        "form": form,
        "matrix": _matrix_to_pairs(state.forms[form]),
        "convention": state.convention,
    }
    if state.provenance:
        doc["provenance"] = state.provenance
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def read_state(path):
    """Load a state file; returns (GaussianState, stored form name)."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc
    try:
        n = int(doc["n_modes"])
        form = doc["form"]
        matrix = doc["matrix"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: missing or malformed field ({exc})") from exc
    if form not in FORMS:
        raise ParseError(f"{path}: unknown form {form!r}")
    M = _pairs_to_matrix(matrix, path)
    if M.shape != (2 * n, 2 * n):
        raise ParseError(f"{path}: matrix shape {M.shape} does not match "
                         f"n_modes={n}")
    state = GaussianState(
        n_modes=n,
        forms={form: M},
        convention=doc.get("convention", AS_PUBLISHED),
        provenance=doc.get("provenance", ""),
    )
    return state, form


def write_hamiltonian(path, ham: QuadraticHamiltonian) -> None:
    doc = {"n_modes": ham.n_modes, "matrix": _matrix_to_pairs(ham.H)}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def read_hamiltonian(path) -> QuadraticHamiltonian:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc
    try:
        n = int(doc["n_modes"])
        M = _pairs_to_matrix(doc["matrix"], path)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: missing or malformed field ({exc})") from exc
    if M.shape != (2 * n, 2 * n):
        raise ParseError(f"{path}: matrix shape {M.shape} does not match "
                         f"n_modes={n}")
    if np.abs(M.imag).max() > 0:
        raise ParseError(f"{path}: Hamiltonian kernel must be real")
    try:
        return QuadraticHamiltonian(n_modes=n, H=M.real)
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def trajectory_to_csv(traj: Trajectory) -> str:
    """Trajectory CSV: t, kernel entries re/im interleaved row-major, det,
    and the logged invariant residuals."""
    dim = traj.kernels[0].shape[0]
    cols = ["t"]
    for i in range(dim):
        for j in range(dim):
            cols += [f"k{i}{j}_re", f"k{i}{j}_im"]
    cols += ["det_re", "det_im"]
    extra = sorted(k for k in traj.invariants_log[0] if k != "det_kernel") \
        if traj.invariants_log else []
    cols += extra
    buf = io.StringIO()
    buf.write(f"# kind={traj.kind}\n")
    buf.write(",".join(cols) + "\n")
    for idx, (t, K) in enumerate(zip(traj.times, traj.kernels)):
        row = [repr(float(t))]
        for v in np.asarray(K, dtype=complex).ravel():
            row += [repr(float(v.real)), repr(float(v.imag))]
        det = complex(np.linalg.det(K))
        row += [repr(det.real), repr(det.imag)]
        if traj.invariants_log:
            log = traj.invariants_log[idx]
            row += [repr(float(log[k])) for k in extra]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def trajectory_from_csv(text: str):
    """Inverse of trajectory_to_csv; returns (kind, times, kernels)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("# kind="):
        raise ParseError("trajectory CSV missing '# kind=' header")
    kind = lines[0].split("=", 1)[1]
    header = lines[1].split(",")
    n_entries = sum(1 for c in header if c.startswith("k") and c.endswith("_re"))
    dim = int(round(np.sqrt(n_entries)))
    times, kernels = [], []
    for ln in lines[2:]:
        vals = [float(v) for v in ln.split(",")]
        times.append(vals[0])
        flat = np.array(vals[1:1 + 2 * dim * dim])
        kernels.append((flat[0::2] + 1j * flat[1::2]).reshape(dim, dim))
    return kind, np.array(times), kernels
