"""Functional controller and functional observer synthesis.

The controller drives ``Fbar x -> 0`` with ``u = -Z Fbar x`` where
``Fbar = [F; R1]`` obeys ``Fbar A (I - Fbar^+ Fbar) = 0``; its gain comes
from pole placement on the reduced pair ``(Fbar A Fbar^+, Fbar B)``.

The functional observer has the form::

    w' = N w + J y + H u,     zhat = w + E y,

and is valid when ``Fbar A = N Fbar + E C A + K C``, ``J = K + N E`` and
``H = (Fbar - E C) B``; then the error ``Fbar x - zhat`` obeys ``e' = N e``.
The linear constraint is solved over ``Theta = (N | E | K)`` as
``Theta = Fbar A Sigma^+ + Y (I - Sigma Sigma^+)`` with
``Sigma = [Fbar; C A; C]``, and the free term ``Y`` is chosen so that
``N`` gets the requested spectrum. When ``Y`` reaches every entry of ``N``
the poles are written straight into a real block-diagonal ``N`` (which also
fixes ``E`` and ``K`` uniquely); otherwise ``Y`` comes from pole placement.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .criteria import SystemTriple, as_functional, is_functional_observable
from .errors import (
    ConditionsViolated,
    DimensionMismatch,
    IncompatibleDesigns,
    NoAugmentationFound,
    NotFunctionalObservable,
    RankDeficient,
)
from .numlin import (
    DEFAULT_TOL,
    TolerancePolicy,
    as_matrix,
    check_poles,
    controllability_subspace,
    eigenvalues,
    null_space_rows,
    numerical_rank,
    observability_indices,
    observability_subspace,
    place_poles,
    right_pseudoinverse,
)


def _empty_rows(n: int) -> np.ndarray:
    return np.zeros((0, n))


def _as_rows(R, n: int) -> np.ndarray:
    if R is None:
        return _empty_rows(n)
    R = np.asarray(R, dtype=float)
    if R.size == 0:
        return _empty_rows(n)
    R = as_matrix(R, "R")
    if R.shape[1] != n:
        raise DimensionMismatch(f"augmentation has {R.shape[1]} columns, expected {n}")
    return R


def stack_functional(F, R=None, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Return ``[F; R]`` after checking that it has full row rank."""
    F = as_matrix(F, "F")
    Fbar = np.vstack([F, _as_rows(R, F.shape[1])])
    if Fbar.shape[0] > Fbar.shape[1] or numerical_rank(Fbar, tol) < Fbar.shape[0]:
        raise RankDeficient(f"augmented functional ({Fbar.shape[0]}x{Fbar.shape[1]}) is not full row rank")
    return Fbar


def _small(M: np.ndarray, scale: float, tol: TolerancePolicy) -> bool:
    return float(np.linalg.norm(M)) <= tol.absolute_zero_tol * max(1.0, scale)


def design_poles(poles, count: int, tol: TolerancePolicy = DEFAULT_TOL, expert: bool = False) -> np.ndarray:
    """Validate a requested pole set for a design of order ``count``."""
    p = check_poles(poles, tol)
    if p.size != count:
        raise DimensionMismatch(f"{p.size} poles given, the design has order {count}")
    if np.any(p.real >= 0):
        msg = f"requested poles {p} are not all in the open left half plane"
        if not expert:
            raise ValueError(msg)
        warnings.warn(msg, stacklevel=3)
    return p


class ConditionCheck(NamedTuple):
    """Outcome of a pair of existence conditions; ``b`` is None when ``a`` fails."""

    a: bool
    b: bool | None

    @property
    def ok(self) -> bool:
        return bool(self.a and self.b)


# -- controller ----------------------------------------------------------------

@dataclass(frozen=True)
class ControllerDesign:
    R1: np.ndarray
    Fbar: np.ndarray
    Z: np.ndarray
    reduced_A: np.ndarray
    reduced_B: np.ndarray
    assigned_poles: np.ndarray

    @property
    def q1(self) -> int:
        return self.Fbar.shape[0]

    @property
    def reduced_closed_loop(self) -> np.ndarray:
        return self.reduced_A - self.reduced_B @ self.Z

    def closed_loop(self, A, B) -> np.ndarray:
        """State feedback closed loop ``A - B Z Fbar``."""
        return A - B @ self.Z @ self.Fbar


def _reduced_pair(sys: SystemTriple, Fbar: np.ndarray, tol):
    Fp = right_pseudoinverse(Fbar, tol)
    FA = Fbar @ sys.A
    closure = FA - FA @ Fp @ Fbar
    return FA @ Fp, Fbar @ sys.B, closure, np.linalg.norm(FA)


def controller_conditions(sys: SystemTriple, f, r1=None, tol: TolerancePolicy = DEFAULT_TOL) -> ConditionCheck:
    """Existence conditions for a functional controller on ``[F; R1]``.

    ``a``: rank([Fbar A; Fbar]) == rank(Fbar), checked as Fbar A (I - Fbar^+ Fbar) = 0.
    ``b``: the reduced pair (Fbar A Fbar^+, Fbar B) is controllable.
    """
    Fbar = stack_functional(as_functional(f, sys.n), r1, tol)
    Ar, Br, closure, scale = _reduced_pair(sys, Fbar, tol)
    if not _small(closure, scale, tol):
        return ConditionCheck(False, None)
    return ConditionCheck(True, controllability_subspace(Ar, Br, tol).dimension == Fbar.shape[0])


def design_functional_controller(
    sys: SystemTriple, f, r1, poles, tol: TolerancePolicy = DEFAULT_TOL, expert: bool = False
) -> ControllerDesign:
    F = as_functional(f, sys.n)
    R1 = _as_rows(r1, sys.n)
    Fbar = stack_functional(F, R1, tol)
    p = design_poles(poles, Fbar.shape[0], tol, expert)
    cond = controller_conditions(sys, F, R1, tol)
    if not cond.ok:
        raise ConditionsViolated(f"controller conditions not met: closure={cond.a}, reduced pair controllable={cond.b}")
    Ar, Br, _, _ = _reduced_pair(sys, Fbar, tol)
    Z = place_poles(Ar, Br, p, tol)
    return ControllerDesign(R1, Fbar, Z, Ar, Br, p)


# -- observer ------------------------------------------------------------------

@dataclass(frozen=True)
class SynthesisWorkspace:
    """Solution space of ``Theta Sigma = Fbar A`` with ``Theta = (N | E | K)``."""

    Sigma: np.ndarray
    Theta_particular: np.ndarray
    projector: np.ndarray
    consistent: bool

    @property
    def q(self) -> int:
        return self.Theta_particular.shape[0]

    @property
    def N1(self) -> np.ndarray:
        return self.Theta_particular[:, : self.q]

    @property
    def Mfree(self) -> np.ndarray:
        return self.projector[:, : self.q]


def observer_workspace(sys: SystemTriple, Fbar: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL) -> SynthesisWorkspace:
    A, C = sys.A, sys.C
    Sigma = np.vstack([Fbar, C @ A, C])
    U, s, Vt = np.linalg.svd(Sigma)
    k = int(np.sum(s > tol.decision_rtol * s[0]))
    Sigma_pinv = Vt[:k].T @ np.diag(1.0 / s[:k]) @ U[:, :k].T
    Uperp = U[:, k:]
    FA = Fbar @ A
    Theta = FA @ Sigma_pinv
    consistent = _small(Theta @ Sigma - FA, np.linalg.norm(FA), tol)
    return SynthesisWorkspace(Sigma, Theta, Uperp @ Uperp.T, consistent)


def _free_input(ws: SynthesisWorkspace, tol: TolerancePolicy):
    """Compressed input matrix of the pair (N1^T, Mfree^T) and its column map."""
    U, s, Vt = np.linalg.svd(ws.Mfree.T, full_matrices=False)
    # the projector has unit norm, so an absolute cut-off is meaningful
    k = int(np.sum(s > tol.decision_rtol))
    return U[:, :k] * s[:k], Vt[:k].T


def observer_conditions(sys: SystemTriple, f, r=None, tol: TolerancePolicy = DEFAULT_TOL) -> ConditionCheck:
    """Existence conditions for a functional observer of ``[F; R]``.

    ``a``: rank([Fbar A; CA; C; Fbar]) == rank([CA; C; Fbar]).
    ``b``: the spectrum of ``N = N1 + Y Mfree`` is freely assignable.
    """
    Fbar = stack_functional(as_functional(f, sys.n), r, tol)
    ws = observer_workspace(sys, Fbar, tol)
    if not ws.consistent:
        return ConditionCheck(False, None)
    Bf, _ = _free_input(ws, tol)
    if Bf.shape[1] == 0:
        return ConditionCheck(True, ws.q == 0)
    return ConditionCheck(True, controllability_subspace(ws.N1.T, Bf, tol).dimension == ws.q)


@dataclass(frozen=True)
class ObserverDesign:
    R: np.ndarray
    Fbar: np.ndarray
    N: np.ndarray
    J: np.ndarray
    H: np.ndarray
    E: np.ndarray
    K: np.ndarray
    assigned_poles: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    @property
    def order_q(self) -> int:
        return self.N.shape[0]

    @classmethod
    def from_parameters(cls, sys: SystemTriple, f, r, N, E, K, J, H, tol: TolerancePolicy = DEFAULT_TOL):
        """Wrap externally supplied parameters (e.g. published values)."""
        F = as_functional(f, sys.n)
        R = _as_rows(r, sys.n)
        Fbar = stack_functional(F, R, tol)
        q = Fbar.shape[0]
        mats = {}
        for name, val, cols in (("N", N, q), ("E", E, sys.p), ("K", K, sys.p), ("J", J, sys.p), ("H", H, sys.m)):
            M = as_matrix(val, name).reshape(q, cols)
            mats[name] = M
        return cls(R, Fbar, assigned_poles=eigenvalues(mats["N"]), **mats)


def design_functional_observer(
    sys: SystemTriple, f, r, poles, tol: TolerancePolicy = DEFAULT_TOL, expert: bool = False
) -> ObserverDesign:
    F = as_functional(f, sys.n)
    R = _as_rows(r, sys.n)
    Fbar = stack_functional(F, R, tol)
    q, p = Fbar.shape[0], sys.p
    want = design_poles(poles, q, tol, expert)
    ws = observer_workspace(sys, Fbar, tol)
    if not ws.consistent:
        raise ConditionsViolated("observer condition fails: Fbar A is not in the row space of [Fbar; CA; C]")
    Bf, V = _free_input(ws, tol)
    if Bf.shape[1] == 0 or controllability_subspace(ws.N1.T, Bf, tol).dimension < q:
        raise ConditionsViolated("observer condition fails: the spectrum of N is not freely assignable")
    if Bf.shape[1] == q:
        # N is unconstrained: take the real block-diagonal form of the poles
        Y = (real_block_diagonal(poles, tol) - ws.N1) @ np.linalg.pinv(ws.Mfree)
    else:
        G = place_poles(ws.N1.T, Bf, want, tol)
        Y = -(V @ G).T
    Theta = ws.Theta_particular + Y @ ws.projector
    N = Theta[:, :q]
    E = Theta[:, q : q + p]
    K = Theta[:, q + p :]
    J = K + N @ E
    H = (Fbar - E @ sys.C) @ sys.B
    return ObserverDesign(R, Fbar, N, J, H, E, K, want)


def real_block_diagonal(poles, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Real matrix with the given spectrum, poles kept in the order given.

    A complex pair a +/- bi becomes the block [[a, b], [-b, a]] at the
    position of its first member.
    """
    check_poles(poles, tol)
    remaining = [complex(p) for p in np.ravel(poles)]
    blocks = []
    while remaining:
        lam = remaining.pop(0)
        radius = tol.eigen_match_tol * max(1.0, abs(lam))
        if abs(lam.imag) <= radius:
            blocks.append(np.array([[lam.real]]))
            continue
        partner = min(range(len(remaining)), key=lambda i: abs(remaining[i] - lam.conjugate()))
        remaining.pop(partner)
        a, b = lam.real, abs(lam.imag)
        blocks.append(np.array([[a, b], [-b, a]]))
    q = sum(b.shape[0] for b in blocks)
    out = np.zeros((q, q))
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i : i + k, i : i + k] = b
        i += k
    return out


@dataclass(frozen=True)
class ObserverCheck:
    constraint_residual: float
    input_residual: float
    injection_residual: float
    spectrum: np.ndarray
    passed: bool


def verify_observer(sys: SystemTriple, f, r, design: ObserverDesign, tol: TolerancePolicy = DEFAULT_TOL) -> ObserverCheck:
    """Re-check the defining equations of a functional observer."""
    Fbar = stack_functional(as_functional(f, sys.n), r, tol)
    A, B, C = sys.A, sys.B, sys.C
    N, E, K, J, H = design.N, design.E, design.K, design.J, design.H
    FA = Fbar @ A
    constraint = float(np.linalg.norm(FA - N @ Fbar - E @ C @ A - K @ C))
    inp = float(np.linalg.norm(H - (Fbar - E @ C) @ B))
    inj = float(np.linalg.norm(J - K - N @ E))
    scale = max(np.linalg.norm(FA), np.linalg.norm(N) * np.linalg.norm(Fbar))
    passed = (
        constraint <= tol.absolute_zero_tol * max(1.0, scale)
        and inp <= tol.absolute_zero_tol * max(1.0, np.linalg.norm(Fbar @ B))
        and inj <= tol.absolute_zero_tol * max(1.0, np.linalg.norm(J))
    )
    return ObserverCheck(constraint, inp, inj, eigenvalues(N), passed)


# -- augmentation --------------------------------------------------------------

def build_augmentation_thm16(A, f, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Rows F_i A, ..., F_i A^(nu_i - 1) for each row of F (nu_i: observability indices)."""
    A = as_matrix(A, "A")
    F = as_functional(f, A.shape[0])
    nu = observability_indices(A, F, tol)
    rows = []
    for i, nu_i in enumerate(nu):
        v = F[i]
        for _ in range(nu_i - 1):
            v = v @ A
            rows.append(v)
    return np.array(rows) if rows else _empty_rows(A.shape[0])


@dataclass(frozen=True)
class AugmentationResult:
    R: np.ndarray
    strategy: str
    conditions_verified: dict
    diagnostics: list = field(default_factory=list)


def _candidate_list(named):
    """Drop candidates whose row space repeats an earlier one."""
    seen = []
    for name, R in named:
        key = (R.shape, R.round(12).tobytes())
        if key in seen:
            continue
        seen.append(key)
        yield name, R


def find_controller_augmentation(sys: SystemTriple, f, tol: TolerancePolicy = DEFAULT_TOL) -> AugmentationResult:
    """First of (empty, observability-index rows, full complement) passing both controller conditions."""
    F = as_functional(f, sys.n)
    candidates = [
        ("empty", _empty_rows(sys.n)),
        ("theorem16", build_augmentation_thm16(sys.A, F, tol)),
        ("full_complement", null_space_rows(F, tol.decision_rtol)),
    ]
    diagnostics = []
    for strategy, R1 in _candidate_list(candidates):
        try:
            cond = controller_conditions(sys, F, R1, tol)
        except RankDeficient as exc:
            diagnostics.append({"strategy": strategy, "rows": R1.shape[0], "error": str(exc)})
            continue
        verified = {"closure": cond.a, "reduced_pair_controllable": cond.b}
        if cond.ok:
            return AugmentationResult(R1, strategy, verified, diagnostics)
        diagnostics.append({"strategy": strategy, "rows": R1.shape[0], **verified})
    raise NoAugmentationFound("no controller augmentation satisfies both conditions", diagnostics)


def kalman_complement(sys: SystemTriple, f, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Rows completing F to a basis of the observable row space of (A, C)."""
    F = as_functional(f, sys.n)
    Qo = observability_subspace(sys.A, sys.C, tol).basis
    Fo = F @ Qo
    return null_space_rows(Fo, tol.decision_rtol) @ Qo.T


def find_observer_augmentation(sys: SystemTriple, f, tol: TolerancePolicy = DEFAULT_TOL) -> AugmentationResult:
    """First of (empty, observability-index rows, Kalman complement) passing both observer conditions."""
    F = as_functional(f, sys.n)
    if not is_functional_observable(sys, F, tol):
        raise NotFunctionalObservable("F is not in the observable row space of (A, C)")
    candidates = [
        ("empty", _empty_rows(sys.n)),
        ("theorem16", build_augmentation_thm16(sys.A, F, tol)),
        ("kalman_complement", kalman_complement(sys, F, tol)),
    ]
    diagnostics = []
    for strategy, R in _candidate_list(candidates):
        try:
            cond = observer_conditions(sys, F, R, tol)
        except RankDeficient as exc:
            diagnostics.append({"strategy": strategy, "rows": R.shape[0], "error": str(exc)})
            continue
        verified = {"consistent": cond.a, "assignable": cond.b}
        if cond.ok:
            return AugmentationResult(R, strategy, verified, diagnostics)
        diagnostics.append({"strategy": strategy, "rows": R.shape[0], **verified})
    raise NoAugmentationFound("no observer augmentation satisfies both conditions", diagnostics)


# -- closed loop ---------------------------------------------------------------

@dataclass(frozen=True)
class SeparationClosedLoop:
    """Block-triangular (z, error) dynamics and the full (x, w) closed loop."""

    Psi: np.ndarray
    A_full: np.ndarray
    controller_spectrum: np.ndarray
    observer_spectrum: np.ndarray
    psi_spectrum: np.ndarray
    full_spectrum: np.ndarray


def check_compatible(ctrl: ControllerDesign, obs: ObserverDesign, tol: TolerancePolicy = DEFAULT_TOL) -> None:
    q1, q = ctrl.q1, obs.order_q
    if q < q1:
        raise IncompatibleDesigns(f"observer order {q} is below controller order {q1}")
    if ctrl.Fbar.shape[1] != obs.Fbar.shape[1]:
        raise IncompatibleDesigns("designs act on different state dimensions")
    if not _small(obs.Fbar[:q1] - ctrl.Fbar, np.linalg.norm(ctrl.Fbar), tol):
        raise IncompatibleDesigns("the observer does not estimate the controller's functional rows first")


def output_feedback_gain(ctrl: ControllerDesign, obs: ObserverDesign) -> np.ndarray:
    """``Z [I_q1 0]``: maps the observer estimate to the control input via ``u = -gain zhat``."""
    S = np.eye(ctrl.q1, obs.order_q)
    return ctrl.Z @ S


def assemble_separation(
    sys: SystemTriple, ctrl: ControllerDesign, obs: ObserverDesign, tol: TolerancePolicy = DEFAULT_TOL
) -> SeparationClosedLoop:
    check_compatible(ctrl, obs, tol)
    A, B, C = sys.A, sys.B, sys.C
    q1, q = ctrl.q1, obs.order_q
    Zs = output_feedback_gain(ctrl, obs)
    Psi = np.block(
        [
            [ctrl.reduced_closed_loop, ctrl.reduced_B @ Zs],
            [np.zeros((q, q1)), obs.N],
        ]
    )
    # u = -Zs (w + E C x)
    A_full = np.block(
        [
            [A - B @ Zs @ obs.E @ C, -B @ Zs],
            [obs.J @ C - obs.H @ Zs @ obs.E @ C, obs.N - obs.H @ Zs],
        ]
    )
    return SeparationClosedLoop(
        Psi=Psi,
        A_full=A_full,
        controller_spectrum=eigenvalues(ctrl.reduced_closed_loop),
        observer_spectrum=eigenvalues(obs.N),
        psi_spectrum=eigenvalues(Psi),
        full_spectrum=eigenvalues(A_full),
    )


# -- end-to-end ----------------------------------------------------------------

def default_controller_poles(q1: int) -> list[complex]:
    return [complex(-3.0 - 2.0 * k) for k in range(q1)]


def default_observer_poles(q: int) -> list[complex]:
    return [complex(-6.0 - k) for k in range(q)]


@dataclass(frozen=True)
class FullDesign:
    controller: ControllerDesign
    observer: ObserverDesign
    loop: SeparationClosedLoop
    controller_strategy: str
    observer_strategy: str


def resolve_augmentation(sys: SystemTriple, f, augment="auto", r1=None, r=None, tol: TolerancePolicy = DEFAULT_TOL):
    """Pick (R1, R, strategies) for an observer-based functional controller.

    ``augment`` is ``"none"`` (both empty), ``"file"`` (use ``r1``/``r`` as
    given; ``r`` defaults to ``r1``) or ``"auto"``. In auto mode the
    controller search runs first and the observer reuses its rows; only when
    the controller needs no rows may the observer pick its own.
    """
    F = as_functional(f, sys.n)
    if augment == "none":
        return _empty_rows(sys.n), _empty_rows(sys.n), "empty", "empty"
    if augment == "file":
        R1 = _as_rows(r1, sys.n)
        R = R1 if r is None else _as_rows(r, sys.n)
        return R1, R, "file", "file"
    if augment != "auto":
        raise ValueError(f"unknown augmentation mode {augment!r}")
    ctrl_aug = find_controller_augmentation(sys, F, tol)
    R1 = ctrl_aug.R
    cond = observer_conditions(sys, F, R1, tol)
    if cond.ok:
        return R1, R1, ctrl_aug.strategy, ctrl_aug.strategy
    if R1.shape[0] == 0:
        obs_aug = find_observer_augmentation(sys, F, tol)
        return R1, obs_aug.R, ctrl_aug.strategy, obs_aug.strategy
    raise NoAugmentationFound(
        "observer conditions fail on the controller's augmented functional",
        [{"strategy": ctrl_aug.strategy, "consistent": cond.a, "assignable": cond.b}],
    )


def design_observer_based_controller(
    sys: SystemTriple,
    f,
    controller_poles=None,
    observer_poles=None,
    augment="auto",
    r1=None,
    r=None,
    tol: TolerancePolicy = DEFAULT_TOL,
    expert: bool = False,
) -> FullDesign:
    F = as_functional(f, sys.n)
    R1, R, cs, os_ = resolve_augmentation(sys, F, augment, r1, r, tol)
    q1 = F.shape[0] + R1.shape[0]
    q = F.shape[0] + R.shape[0]
    cp = default_controller_poles(q1) if controller_poles is None else controller_poles
    op = default_observer_poles(q) if observer_poles is None else observer_poles
    ctrl = design_functional_controller(sys, F, R1, cp, tol, expert)
    obs = design_functional_observer(sys, F, R, op, tol, expert)
    return FullDesign(ctrl, obs, assemble_separation(sys, ctrl, obs, tol), cs, os_)
