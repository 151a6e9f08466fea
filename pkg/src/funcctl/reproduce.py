"""Regenerate the published example quantities and compare them."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import reference as ref
from .criteria import (
    classical_properties,
    dual,
    is_functional_controllable,
    is_functional_detectable,
    is_functional_observable,
    is_functional_stabilizable,
    property_report,
)
from .numlin import DEFAULT_TOL, eigenvalues, spectra_match, TolerancePolicy
from .synthesis import (
    ObserverDesign,
    controller_conditions,
    design_observer_based_controller,
    find_controller_augmentation,
    observer_conditions,
    verify_observer,
)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed), "detail": self.detail}


def _close(got, want, atol: float) -> tuple[bool, str]:
    got, want = np.asarray(got, dtype=float), np.asarray(want, dtype=float)
    if got.shape != want.shape:
        return False, f"shape {got.shape} != {want.shape}"
    err = float(np.max(np.abs(got - want))) if got.size else 0.0
    return err <= atol, f"max abs error {err:.3g} (tol {atol:g})"


def _spec(got, want, atol: float) -> tuple[bool, str]:
    ok = spectra_match(got, want, TolerancePolicy(eigen_match_tol=atol))
    return ok, f"got {np.round(np.real_if_close(got), 9).tolist()}"


def example1(tol: TolerancePolicy = DEFAULT_TOL) -> list[Check]:
    sys = ref.example1_system()
    checks = []
    columns = ("target_output_controllable", "functional_stabilizable", "functional_controllable")
    for name, F in ref.EXAMPLE1_F.items():
        rep = property_report(sys, F, tol)
        for col, want in zip(columns, ref.EXAMPLE1_VERDICTS[name]):
            got = getattr(rep, col)
            checks.append(Check(f"verdicts.{name}.{col}", got == want, f"got {int(got)}, published {int(want)}"))
    # duality illustrations; dual(sys) = (A^T, C^T, B^T) with C = B^T
    dsys = dual(sys)
    f_c = np.array([[1.0, 1.0, 0.0, 0.0]])
    f_s = np.array([[1.0, 0.0, 1.0, 0.0]])
    pairs = [
        ("duality.functional_controllable(A,B)", is_functional_controllable(sys, f_c, tol)),
        ("duality.functional_observable(A^T,B^T)", is_functional_observable(dsys, f_c, tol)),
        ("duality.functional_observable(A,C)", is_functional_observable(sys, f_c, tol)),
        ("duality.functional_controllable(A^T,C^T)", is_functional_controllable(dsys, f_c, tol)),
        ("duality.functional_stabilizable(A,B)", is_functional_stabilizable(sys, f_s, tol)),
        ("duality.functional_detectable(A^T,B^T)", is_functional_detectable(dsys, f_s, tol)),
        ("duality.functional_detectable(A,C)", is_functional_detectable(sys, f_s, tol)),
        ("duality.functional_stabilizable(A^T,C^T)", is_functional_stabilizable(dsys, f_s, tol)),
    ]
    checks += [Check(n, bool(v), "expected 1") for n, v in pairs]
    return checks


def example2(tol: TolerancePolicy = DEFAULT_TOL) -> list[Check]:
    sys = ref.example2_system()
    F = ref.EXAMPLE2_F
    checks = []
    cp = classical_properties(sys, tol)
    checks.append(Check("uncontrollable_and_unobservable", not cp.controllable and not cp.observable))
    checks.append(Check("open_loop_spectrum", *_spec(eigenvalues(sys.A), ref.EXAMPLE2_OPEN_LOOP, 1e-6)))
    checks.append(Check("functional_controllable", is_functional_controllable(sys, F, tol)))
    checks.append(Check("functional_observable", is_functional_observable(sys, F, tol)))
    checks.append(Check("controller_conditions", controller_conditions(sys, F, None, tol).ok))
    checks.append(Check("observer_conditions", observer_conditions(sys, F, None, tol).ok))
    d = design_observer_based_controller(sys, F, [-3.0], [-6.0], augment="none", tol=tol)
    checks.append(Check("Z", *_close(d.controller.Z, ref.EXAMPLE2_Z, 1e-9)))
    checks.append(
        Check("closed_loop_spectrum", *_spec(eigenvalues(d.controller.closed_loop(sys.A, sys.B)), ref.EXAMPLE2_CLOSED_LOOP, 1e-6))
    )
    paper = ObserverDesign.from_parameters(sys, F, None, **ref.EXAMPLE2_OBSERVER)
    pv = verify_observer(sys, F, None, paper, tol)
    checks.append(
        Check("published_observer_residuals", pv.passed and max(pv.constraint_residual, pv.input_residual) <= 1e-9,
              f"constraint {pv.constraint_residual:.3g}, input {pv.input_residual:.3g}")
    )
    own = verify_observer(sys, F, None, d.observer, tol)
    checks.append(Check("designed_N", *_close(d.observer.N, [[-6.0]], 1e-9)))
    checks.append(
        Check("designed_observer_residuals", own.passed and max(own.constraint_residual, own.input_residual) <= 1e-9,
              f"constraint {own.constraint_residual:.3g}, input {own.input_residual:.3g}")
    )
    checks.append(Check("Psi", *_close(d.loop.Psi, ref.EXAMPLE2_PSI, 1e-9)))
    return checks


def example3(tol: TolerancePolicy = DEFAULT_TOL) -> list[Check]:
    sys = ref.example2_system()
    F = ref.EXAMPLE3_F
    checks = [
        Check("functional_controllable", is_functional_controllable(sys, F, tol)),
        Check("closure_fails_without_augmentation", not controller_conditions(sys, F, None, tol).a),
    ]
    aug = find_controller_augmentation(sys, F, tol)
    checks.append(Check("R1", *_close(aug.R, ref.EXAMPLE3_R1, 1e-12)))
    checks.append(Check("R1_strategy", aug.strategy == "theorem16", aug.strategy))
    d = design_observer_based_controller(sys, F, [-3.0, -5.0], [-6.0, -7.0], augment="auto", tol=tol)
    checks.append(Check("Z", *_close(d.controller.Z, ref.EXAMPLE3_Z, 1e-6)))
    checks.append(Check("reduced_closed_loop", *_close(d.controller.reduced_closed_loop, ref.EXAMPLE3_REDUCED_CLOSED_LOOP, 1e-6)))
    checks.append(
        Check("closed_loop_spectrum", *_spec(eigenvalues(d.controller.closed_loop(sys.A, sys.B)), ref.EXAMPLE3_CLOSED_LOOP, 1e-6))
    )
    checks.append(Check("Psi", *_close(d.loop.Psi, ref.EXAMPLE3_PSI, 1e-6)))
    checks.append(Check("N_spectrum", *_spec(eigenvalues(d.observer.N), [-6.0, -7.0], 1e-6)))
    paper = ObserverDesign.from_parameters(sys, F, ref.EXAMPLE3_R1, **ref.EXAMPLE3_OBSERVER)
    pv = verify_observer(sys, F, ref.EXAMPLE3_R1, paper, tol)
    checks.append(Check("published_observer_residuals", pv.passed, f"constraint {pv.constraint_residual:.3g}"))
    own = verify_observer(sys, F, ref.EXAMPLE3_R1, d.observer, tol)
    checks.append(Check("designed_observer_residuals", own.passed, f"constraint {own.constraint_residual:.3g}"))
    return checks


EXAMPLES = {"example1": example1, "example2": example2, "example3": example3}


def reproduce(name: str, tol: TolerancePolicy = DEFAULT_TOL) -> list[Check]:
    return EXAMPLES[name](tol)
