"""Command-line front end.

Commands: validate, convert, spectrum, evolve, phase, audit.

Exit codes: 0 success, 1 validation failure, 2 numerical failure,
3 I/O or parse failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

import numpy as np

from . import __version__, bridge, dynamics, kernels, phasespace, stateio
from .errors import DomainError, GnpError, NumericalError, TruncationError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3

_FN_NAMES = {"q": "husimi", "wigner": "wigner", "char": "charfn"}


def _digest(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()[:16]


def _echo_header(args, paths):
    print(f"gnp {__version__}")
    print("command: " + " ".join(sys.argv[1:]))
    for p in paths:
        print(f"input {p} sha256[:16]={_digest(p)}")


def _parse_grid(text: str):
    """'min:max:count' -> (lo, hi, count)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError("grid must be 'min:max:count'")
    lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    return (lo, hi, count)


# ---------------------------------------------------------------------------
# commands

def cmd_validate(args) -> int:
    state, form = stateio.read_state(args.state)
    _echo_header(args, [args.state])
    report = kernels.validate_state(state)
    for line in report.lines():
        print(line)
    return EXIT_OK if report.passed else EXIT_VALIDATION


def cmd_convert(args) -> int:
    state, form = stateio.read_state(args.state)
    _echo_header(args, [args.state])
    if args.to == form:
        target = state.forms[form]
    else:
        target = kernels.ensure_form(state, args.to)
    out_state = kernels.GaussianState(
        n_modes=state.n_modes,
        forms={args.to: np.asarray(target, dtype=complex)},
        convention=args.convention,
        provenance=(state.provenance + f" | converted {form}->{args.to}").strip(" |"),
    )
    stateio.write_state(args.output, out_state, args.to)
    print(f"wrote {args.to}-form state to {args.output}")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    state, _ = stateio.read_state(args.state)
    _echo_header(args, [args.state])
    G = kernels.ensure_form(state, "G")
    spec = kernels.symplectic_spectrum(G)
    for i, (om, nu) in enumerate(zip(spec.omegas, spec.nus), start=1):
        print(f"mode {i}: omega={float(om)!r} nu={float(nu)!r}")
    return EXIT_OK


def cmd_evolve(args) -> int:
    state, form = stateio.read_state(args.state)
    ham = stateio.read_hamiltonian(args.ham)
    _echo_header(args, [args.state, args.ham])
    if args.t < 0:
        raise DomainError("evolution time must be nonnegative")
    kind = "covariance" if form == "sigma" else "normal"
    if form not in ("sigma", "R"):
        raise DomainError(f"evolution needs a sigma- or R-form state, got {form}")
    X0 = state.forms[form]
    if args.method == "rk4":
        traj = dynamics.integrate_rk4(kind, X0, ham.H, args.t, args.steps)
    else:
        times = np.linspace(0.0, args.t, max(2, args.steps + 1)) \
            if args.t > 0 else np.array([0.0])
        traj = dynamics.Trajectory(kind=kind, H=ham.H)
        det0 = None
        for t in times:
            if kind == "covariance":
                X = dynamics.covariance_propagate(X0, ham.H, float(t))
            else:
                X = dynamics.normal_propagate(X0, ham.H, float(t),
                                              variant=args.variant)
            if det0 is None:
                det0 = np.linalg.det(X)
            dynamics._log_point(traj, float(t), X, det0)
    csv = stateio.trajectory_to_csv(traj)
    with open(args.output, "w") as fh:
        fh.write(csv)
    final_state = kernels.GaussianState(
        n_modes=state.n_modes,
        forms={form: traj.kernels[-1]},
        convention=state.convention,
        provenance=(state.provenance
                    + f" | evolved {args.method} t={args.t}").strip(" |"),
    )
    final_path = args.output + ".final.json"
    stateio.write_state(final_path, final_state, form)
    rep = dynamics.invariants_report(traj)
    print(f"wrote {len(traj.times)}-row trajectory to {args.output}")
    print(f"final state: {final_path}")
    print(f"max det drift {rep.max_det_drift:.3e}; "
          f"max symplectic residual {rep.max_symplectic_residual:.3e}")
    return EXIT_OK


def cmd_phase(args) -> int:
    state, _ = stateio.read_state(args.state)
    _echo_header(args, [args.state])
    if state.n_modes != 1:
        raise DomainError("phase grids are single-mode only")
    lo, hi, count = _parse_grid(args.grid)
    grid = phasespace.PhaseGrid(re_range=(lo, hi, count),
                                im_range=(lo, hi, count))
    fn = _FN_NAMES[args.fn]
    if args.check_norm and fn == "husimi":
        total = phasespace.q_norm_check(state, convention=args.convention)
        print(f"husimi normalization integral: {total!r}")
    table = phasespace.grid_eval(state, fn, grid, convention=args.convention)
    with open(args.output, "w") as fh:
        fh.write(table.to_csv())
    print(f"wrote {len(table.points)}-point {fn} table to {args.output}")
    return EXIT_OK


def cmd_audit(args) -> int:
    state, _ = stateio.read_state(args.state)
    ham = stateio.read_hamiltonian(args.ham)
    _echo_header(args, [args.state, args.ham])
    R0 = kernels.ensure_form(state, "R")
    ordering = dynamics.ordering_audit(R0, ham.H, args.t)
    convention = dynamics.convention_audit(state, ham.H, args.t)
    report = {
        "tool": f"gnp {__version__}",
        "ordering": {
            "residuals": {k: float(v) for k, v in ordering.residuals.items()},
            "consistent_variants": ordering.consistent_variants,
            "vacuous": ordering.vacuous,
        },
        "convention": {
            "residuals": {k: float(v) for k, v in convention.residuals.items()},
            "note": convention.note,
        },
    }
    if ordering.vacuous:
        print("ordering audit: vacuous (flow variants indistinguishable here)")
    else:
        names = ", ".join(ordering.consistent_variants) or "none"
        print(f"ordering audit: flow-consistent variant(s): {names}")
    for k, v in sorted(ordering.residuals.items()):
        print(f"  variant {k} flow residual {v:.3e}")
    if args.with_oracle:
        cal = bridge.calibrate(cutoff=args.cutoff)
        for line in cal.lines():
            print(line)
        report["bridge"] = {
            "r_map": cal.selected.r_map,
            "prefactor_rule": cal.selected.prefactor_rule,
            "residual": cal.selected.residual,
            "kernel_residuals": cal.kernel_residuals,
            "prefactor_residuals": {k: float(abs(v))
                                    for k, v in cal.prefactor_residuals.items()},
        }
    with open(args.output, "w") as fh:
        json.dump(report, fh, indent=1, sort_keys=True)
        fh.write("\n")
    print(f"wrote audit report to {args.output}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gnp",
                                 description="Gaussian-state kernel toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a state file's invariants")
    p.add_argument("state")
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("convert", help="convert a state between kernel forms")
    p.add_argument("state")
    p.add_argument("--to", required=True, choices=kernels.FORMS)
    p.add_argument("--convention", default=kernels.AS_PUBLISHED,
                   choices=(kernels.AS_PUBLISHED, kernels.CALIBRATED))
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(handler=cmd_convert)

    p = sub.add_parser("spectrum", help="symplectic spectrum of a G-form state")
    p.add_argument("state")
    p.set_defaults(handler=cmd_spectrum)

    p = sub.add_parser("evolve", help="evolve a state under a quadratic "
                                      "Hamiltonian kernel")
    p.add_argument("state")
    p.add_argument("--ham", required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--method", default="closed", choices=("closed", "rk4"))
    p.add_argument("--variant", default="b", choices=("a", "b"))
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(handler=cmd_evolve)

    p = sub.add_parser("phase", help="evaluate a phase-space function on a grid")
    p.add_argument("state")
    p.add_argument("--fn", default="q", choices=tuple(_FN_NAMES))
    p.add_argument("--grid", default="-2:2:41")
    p.add_argument("--convention", default=kernels.CALIBRATED,
                   choices=(kernels.AS_PUBLISHED, kernels.CALIBRATED))
    p.add_argument("--check-norm", action="store_true")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(handler=cmd_phase)

    p = sub.add_parser("audit", help="ordering/convention audits and oracle "
                                     "calibration")
    p.add_argument("state")
    p.add_argument("--ham", required=True)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--with-oracle", action="store_true")
    p.add_argument("--cutoff", type=int, default=40)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(handler=cmd_audit)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except stateio.ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (DomainError, NumericalError, TruncationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except GnpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
