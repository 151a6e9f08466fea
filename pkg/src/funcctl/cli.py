"""Command line front end: ``funcctl {analyze,design,simulate,reproduce}``.

Exit codes: 0 success, 2 malformed input, 3 infeasible design.
Pole lists are comma separated; complex poles are written ``a+bi``
(``--controller-poles -1+2i,-1-2i``).
"""
from __future__ import annotations

import argparse
import sys as _sys
from pathlib import Path

import numpy as np

from . import io
from .criteria import property_report
from .errors import (
    ConditionsViolated,
    FuncCtlError,
    NoAugmentationFound,
    NotFunctionalObservable,
    ParseError,
    StepBudgetExceeded,
    Uncontrollable,
)
from .numlin import TolerancePolicy
from .reproduce import EXAMPLES, reproduce
from .sim import SimConfig, simulate_observer_closed_loop, trace_columns
from .synthesis import design_observer_based_controller, verify_observer

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE = 0, 2, 3
INFEASIBLE = (NoAugmentationFound, ConditionsViolated, NotFunctionalObservable, Uncontrollable)


def parse_poles(text: str | None) -> list[complex] | None:
    if text is None:
        return None
    out = []
    for item in text.replace(" ", "").split(","):
        if not item:
            continue
        try:
            out.append(complex(item.replace("i", "j")))
        except ValueError as exc:
            raise ParseError(f"cannot parse pole {item!r}") from exc
    return out


def parse_vector(text: str | None) -> np.ndarray | None:
    if text is None:
        return None
    try:
        return np.array([float(v) for v in text.split(",") if v.strip()])
    except ValueError as exc:
        raise ParseError(f"cannot parse vector {text!r}") from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        _sys.stdout.write(text)


def _design(args, spec: io.SystemFile):
    return design_observer_based_controller(
        spec.system,
        spec.F,
        controller_poles=parse_poles(args.controller_poles),
        observer_poles=parse_poles(args.observer_poles),
        augment=args.augment,
        r1=spec.R1,
        r=spec.R,
        tol=spec.tol,
        expert=args.expert,
    )


def design_report(spec: io.SystemFile, d) -> dict:
    ctrl, obs, loop = d.controller, d.observer, d.loop
    check = verify_observer(spec.system, spec.F, obs.R, obs, spec.tol)
    return {
        "status": "ok",
        "augmentation": {"controller": d.controller_strategy, "observer": d.observer_strategy},
        "controller": {
            "R1": io.matrix_json(ctrl.R1),
            "Fbar": io.matrix_json(ctrl.Fbar),
            "Z": io.matrix_json(ctrl.Z),
            "reduced_A": io.matrix_json(ctrl.reduced_A),
            "reduced_B": io.matrix_json(ctrl.reduced_B),
            "reduced_closed_loop": io.matrix_json(ctrl.reduced_closed_loop),
            "assigned_poles": io.spectrum_json(ctrl.assigned_poles),
        },
        "observer": {
            "R": io.matrix_json(obs.R),
            "order_q": obs.order_q,
            "N": io.matrix_json(obs.N),
            "J": io.matrix_json(obs.J),
            "H": io.matrix_json(obs.H),
            "E": io.matrix_json(obs.E),
            "K": io.matrix_json(obs.K),
            "assigned_poles": io.spectrum_json(obs.assigned_poles),
        },
        "separation": {
            "Psi": io.matrix_json(loop.Psi),
            "A_full": io.matrix_json(loop.A_full),
            "spectra": {
                "controller": io.spectrum_json(loop.controller_spectrum),
                "observer": io.spectrum_json(loop.observer_spectrum),
                "Psi": io.spectrum_json(loop.psi_spectrum),
                "A_full": io.spectrum_json(loop.full_spectrum),
            },
        },
        "residuals": {
            "constraint": check.constraint_residual,
            "input": check.input_residual,
            "injection": check.injection_residual,
            "passed": bool(check.passed),
        },
    }


def cmd_analyze(args) -> int:
    spec = io.load_system(args.path)
    report = property_report(spec.system, spec.F, spec.tol)
    _emit(io.dumps({"status": "ok", **report.to_dict()}), args.out)
    return EXIT_OK


def cmd_design(args) -> int:
    spec = io.load_system(args.path)
    d = _design(args, spec)
    _emit(io.dumps(design_report(spec, d)), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    spec = io.load_system(args.path)
    try:
        cfg = SimConfig(dt=args.dt, t_final=args.t_final)
    except (ValueError, StepBudgetExceeded) as exc:
        raise ParseError(str(exc)) from exc
    d = _design(args, spec)
    n = spec.system.n
    x0 = parse_vector(args.x0)
    x0 = np.ones(n) if x0 is None else x0
    w0 = parse_vector(args.w0)
    trace = simulate_observer_closed_loop(spec.system, d.controller, d.observer, x0, w0, cfg)
    header, data = trace_columns(trace, n)
    target = args.out or _sys.stdout
    np.savetxt(target, data, delimiter=",", header=",".join(header), comments="", fmt="%.17g")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    tol = TolerancePolicy.from_env()
    checks = reproduce(args.example, tol)
    width = max(len(c.name) for c in checks)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name:<{width}}  {c.detail}")
    passed = sum(c.passed for c in checks)
    print(f"{args.example}: {passed}/{len(checks)} checks pass")
    status = "pass" if passed == len(checks) else "fail"
    if args.out:
        Path(args.out).write_text(
            io.dumps({"status": status, "example": args.example, "checks": [c.to_dict() for c in checks]})
        )
    return EXIT_OK if status == "pass" else 1


def _design_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--controller-poles", help="comma-separated, e.g. -3,-5 (default -3,-5,-7,...)")
    p.add_argument("--observer-poles", help="comma-separated, e.g. -6,-7 (default -6,-7,-8,...)")
    p.add_argument("--augment", choices=("none", "auto", "file"), default="auto")
    p.add_argument("--expert", action="store_true", help="allow poles outside the open left half plane")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="funcctl", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="functional controllability/observability report")
    p.add_argument("path")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("design", help="functional controller + observer design")
    p.add_argument("path")
    _design_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("simulate", help="simulate the observer-based closed loop to CSV")
    p.add_argument("path")
    _design_flags(p)
    p.add_argument("--x0", help="initial plant state, comma-separated (default all ones)")
    p.add_argument("--w0", help="initial observer state (default zeros)")
    p.add_argument("--t-final", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reproduce", help="regenerate a bundled example and compare")
    p.add_argument("example", choices=sorted(EXAMPLES))
    p.add_argument("--out")
    p.set_defaults(func=cmd_reproduce)
    return parser


VALUE_FLAGS = ("--controller-poles", "--observer-poles", "--x0", "--w0")


def _join_negative_values(argv: list[str]) -> list[str]:
    """Rewrite ``--flag -1,-2`` as ``--flag=-1,-2`` so argparse accepts it."""
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in VALUE_FLAGS:
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-") and not nxt.startswith("--"):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = _sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_join_negative_values(argv))
    try:
        return args.func(args)
    except INFEASIBLE as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=_sys.stderr)
        for diag in getattr(exc, "diagnostics", []):
            print(f"  candidate {diag}", file=_sys.stderr)
        return EXIT_INFEASIBLE
    except (FuncCtlError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=_sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
