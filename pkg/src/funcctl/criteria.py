"""Yes/no structural tests on LTI systems.

Classical pair properties (PBH), target output controllability, functional
controllability / stabilizability and their observer-side duals, plus a
combined report. Rank equalities over stacked Krylov matrices are evaluated
as projection residuals against orthonormal subspace bases, and the
"for all lambda with Re(lambda) >= 0" quantifiers are checked only at the
eigenvalues of A, since (lambda I - A)^n has full rank everywhere else.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InconsistentVerdicts, RankDeficient
from .numlin import (
    DEFAULT_TOL,
    SubspaceBasis,
    TolerancePolicy,
    as_matrix,
    controllability_subspace,
    eigenvalues,
    numerical_rank,
    observability_subspace,
    orth,
    power_image_basis,
)

# a decisive quantity within this factor of its threshold is "marginal"
MARGINAL_FACTOR = 100.0


@dataclass(frozen=True, eq=False)
class SystemTriple:
    """The plant x' = A x + B u, y = C x."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        A = as_matrix(self.A, "A")
        B = as_matrix(self.B, "B")
        C = as_matrix(self.C, "C")
        n = A.shape[0]
        if A.shape != (n, n):
            raise DimensionMismatch(f"A must be square, got {A.shape}")
        if B.shape[0] != n:
            raise DimensionMismatch(f"B has {B.shape[0]} rows, expected {n}")
        if C.shape[1] != n:
            raise DimensionMismatch(f"C has {C.shape[1]} columns, expected {n}")
        if numerical_rank(C) < C.shape[0]:
            raise RankDeficient("C must have full row rank")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def p(self) -> int:
        return self.C.shape[0]

    def __eq__(self, other):
        if not isinstance(other, SystemTriple):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, k), getattr(other, k)) for k in ("A", "B", "C")
        )


@dataclass(frozen=True, eq=False)
class FunctionalTarget:
    """Full-row-rank F defining the functional z = F x."""

    F: np.ndarray

    def __post_init__(self):
        F = as_matrix(self.F, "F")
        if F.shape[0] > F.shape[1]:
            raise DimensionMismatch(f"F has more rows than columns: {F.shape}")
        if numerical_rank(F) < F.shape[0]:
            raise RankDeficient("F must have full row rank")
        object.__setattr__(self, "F", F)

    @property
    def r(self) -> int:
        return self.F.shape[0]


def as_functional(f, n: int | None = None) -> np.ndarray:
    F = f.F if isinstance(f, FunctionalTarget) else FunctionalTarget(f).F
    if n is not None and F.shape[1] != n:
        raise DimensionMismatch(f"F has {F.shape[1]} columns, expected {n}")
    return F


def dual(sys: SystemTriple) -> SystemTriple:
    """(A, B, C) -> (A^T, C^T, B^T)."""
    return SystemTriple(sys.A.T.copy(), sys.C.T.copy(), sys.B.T.copy())


@dataclass(frozen=True)
class Evidence:
    """Ranks behind one verdict.

    ``rank_with`` is the rank after appending the functional (or the
    reachable/observable block for target output controllability);
    ``rank_without`` the reference rank. ``margin`` is the decisive quantity
    divided by its threshold (inf when nothing was close).
    """

    holds: bool
    rank_with: int
    rank_without: int
    margin: float = float("inf")

    @property
    def marginal(self) -> bool:
        return 1.0 / MARGINAL_FACTOR <= self.margin <= MARGINAL_FACTOR

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "rank_with": self.rank_with,
            "rank_without": self.rank_without,
            "marginal": self.marginal,
        }


def _closest_margin(values: np.ndarray, threshold: float) -> float:
    vals = values[values > 0]
    if vals.size == 0 or threshold <= 0:
        return float("inf")
    ratios = vals / threshold
    return float(ratios[np.argmin(np.abs(np.log(ratios)))])


def _membership(space: np.ndarray, Ft: np.ndarray, rtol: float) -> Evidence:
    """Do the columns of ``Ft`` lie in the column span of ``space``?"""
    k = space.shape[1]
    R = Ft - space @ (space.conj().T @ Ft)
    R = R - space @ (space.conj().T @ R)
    R = R / np.linalg.norm(Ft, axis=0)
    s = np.linalg.svd(R, compute_uv=False)
    extra = int(np.sum(s > rtol))
    return Evidence(extra == 0, k + extra, k, _closest_margin(s, rtol))


def _rhp_eigenvalues(A: np.ndarray, tol: TolerancePolicy) -> list[complex]:
    """Distinct eigenvalues with Re >= 0 (one per conjugate pair)."""
    out: list[complex] = []
    for lam in eigenvalues(A):
        radius = tol.eigen_match_tol * max(1.0, abs(lam))
        if lam.real < -radius or lam.imag < -radius:
            continue
        if any(abs(lam - mu) <= radius for mu in out):
            continue
        out.append(complex(lam))
    return out


def _check(sys: SystemTriple, f) -> np.ndarray:
    return as_functional(f, sys.n)


# -- classical ---------------------------------------------------------------

def _pbh_holds(A: np.ndarray, B: np.ndarray, lam: complex, rtol: float) -> bool:
    n = A.shape[0]
    M = np.hstack([lam * np.eye(n) - A, B.astype(complex)])
    s = np.linalg.svd(M, compute_uv=False)
    scale = max(s[0], np.linalg.norm(A, 2), 1.0)
    return int(np.sum(s > rtol * scale)) == n


def is_controllable(A, B, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    A = as_matrix(A, "A")
    return controllability_subspace(A, B, tol).dimension == A.shape[0]


def is_stabilizable(A, B, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """PBH test at every eigenvalue of A in the closed right half plane."""
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    return all(_pbh_holds(A, B, lam, tol.decision_rtol) for lam in _rhp_eigenvalues(A, tol))


@dataclass(frozen=True)
class ClassicalProperties:
    controllable: bool
    stabilizable: bool
    observable: bool
    detectable: bool


def classical_properties(sys: SystemTriple, tol: TolerancePolicy = DEFAULT_TOL) -> ClassicalProperties:
    return ClassicalProperties(
        controllable=is_controllable(sys.A, sys.B, tol),
        stabilizable=is_stabilizable(sys.A, sys.B, tol),
        observable=is_controllable(sys.A.T, sys.C.T, tol),
        detectable=is_stabilizable(sys.A.T, sys.C.T, tol),
    )


# -- functional, controller side ---------------------------------------------

def check_target_output_controllability(sys, f, tol: TolerancePolicy = DEFAULT_TOL) -> Evidence:
    """rank(F [B AB ... A^{n-1}B]) == rank(F), evaluated as rank(F Q)."""
    F = _check(sys, f)
    Q = controllability_subspace(sys.A, sys.B, tol).basis
    rtol = tol.decision_rtol
    sF = np.linalg.svd(F, compute_uv=False)
    thr = rtol * sF[0]
    if Q.shape[1] == 0:
        return Evidence(False, 0, F.shape[0])
    s = np.linalg.svd(F @ Q, compute_uv=False)
    rank_fq = int(np.sum(s > thr))
    rank_f = int(np.sum(sF > thr))
    return Evidence(rank_fq == rank_f, rank_fq, rank_f, _closest_margin(s, thr))


def is_target_output_controllable(sys, f, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    return check_target_output_controllability(sys, f, tol).holds


def _functional_in_span(A, B, F, tol) -> Evidence:
    Q = controllability_subspace(A, B, tol).basis
    return _membership(Q, F.T, tol.decision_rtol)


def check_functional_controllability(sys, f, tol: TolerancePolicy = DEFAULT_TOL) -> Evidence:
    """Every column of F^T lies in the controllable subspace of (A, B)."""
    return _functional_in_span(sys.A, sys.B, _check(sys, f), tol)


def is_functional_controllable(sys, f, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    return check_functional_controllability(sys, f, tol).holds


def _stabilizable_span(A, B, F, tol) -> Evidence:
    n = A.shape[0]
    Qc = controllability_subspace(A, B, tol).basis
    rtol = tol.decision_rtol
    worst = Evidence(True, n, n)
    for lam in _rhp_eigenvalues(A, tol):
        P = power_image_basis(A, lam, tol).basis
        space = orth(np.hstack([P, Qc.astype(P.dtype)]), rtol)
        ev = _membership(space, F.T.astype(space.dtype), rtol)
        if not ev.holds:
            return ev
        if abs(np.log(ev.margin)) < abs(np.log(worst.margin)):
            worst = ev
    return worst


def check_functional_stabilizability(sys, f, tol: TolerancePolicy = DEFAULT_TOL) -> Evidence:
    """F^T lies in Im((lambda I - A)^n) + Im(ctrb) for each eigenvalue with Re >= 0."""
    return _stabilizable_span(sys.A, sys.B, _check(sys, f), tol)


def is_functional_stabilizable(sys, f, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    return check_functional_stabilizability(sys, f, tol).holds


# -- functional, observer side -------------------------------------------------
# Row spaces of stacked matrices are handled as column spaces of transposes.

def check_functional_observability(sys, f, tol: TolerancePolicy = DEFAULT_TOL) -> Evidence:
    """Each row of F lies in the row space of the observability matrix."""
    F = _check(sys, f)
    Q = observability_subspace(sys.A, sys.C, tol).basis
    return _membership(Q, F.T, tol.decision_rtol)


def is_functional_observable(sys, f, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    return check_functional_observability(sys, f, tol).holds


def check_functional_detectability(sys, f, tol: TolerancePolicy = DEFAULT_TOL) -> Evidence:
    """Row-space version of the stabilizability test on (A^T, C^T)."""
    return _stabilizable_span(sys.A.T, sys.C.T, _check(sys, f), tol)


def is_functional_detectable(sys, f, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    return check_functional_detectability(sys, f, tol).holds


# -- combined report -----------------------------------------------------------

VERDICTS = (
    "controllable",
    "stabilizable",
    "observable",
    "detectable",
    "target_output_controllable",
    "functional_controllable",
    "functional_stabilizable",
    "functional_observable",
    "functional_detectable",
)

# (premise, conclusion) pairs that must hold in every report
IMPLICATIONS = (
    ("controllable", "functional_controllable"),
    ("functional_controllable", "target_output_controllable"),
    ("functional_controllable", "functional_stabilizable"),
    ("stabilizable", "functional_stabilizable"),
    ("observable", "functional_observable"),
    ("functional_observable", "functional_detectable"),
    ("detectable", "functional_detectable"),
)


@dataclass(frozen=True)
class PropertyReport:
    controllable: bool
    stabilizable: bool
    observable: bool
    detectable: bool
    target_output_controllable: bool
    functional_controllable: bool
    functional_stabilizable: bool
    functional_observable: bool
    functional_detectable: bool
    ranks_evidence: dict = field(default_factory=dict)

    def verdicts(self) -> dict[str, bool]:
        return {k: getattr(self, k) for k in VERDICTS}

    def violations(self) -> list[tuple[str, str]]:
        return [(a, b) for a, b in IMPLICATIONS if getattr(self, a) and not getattr(self, b)]

    def to_dict(self) -> dict:
        return {
            "verdicts": self.verdicts(),
            "ranks_evidence": {k: v.to_dict() for k, v in self.ranks_evidence.items()},
        }


def property_report(sys: SystemTriple, f, tol: TolerancePolicy = DEFAULT_TOL) -> PropertyReport:
    F = _check(sys, f)
    classical = classical_properties(sys, tol)
    evidence = {
        "target_output_controllable": check_target_output_controllability(sys, F, tol),
        "functional_controllable": check_functional_controllability(sys, F, tol),
        "functional_stabilizable": check_functional_stabilizability(sys, F, tol),
        "functional_observable": check_functional_observability(sys, F, tol),
        "functional_detectable": check_functional_detectability(sys, F, tol),
    }
    report = PropertyReport(
        controllable=classical.controllable,
        stabilizable=classical.stabilizable,
        observable=classical.observable,
        detectable=classical.detectable,
        ranks_evidence=evidence,
        **{k: v.holds for k, v in evidence.items()},
    )
    bad = report.violations()
    if bad:
        edges = ", ".join(f"{a} => {b}" for a, b in bad)
        raise InconsistentVerdicts(f"implication violated ({edges}); adjust tolerances")
    return report


__all__ = [
    "SystemTriple",
    "FunctionalTarget",
    "Evidence",
    "ClassicalProperties",
    "PropertyReport",
    "SubspaceBasis",
    "dual",
    "classical_properties",
    "is_controllable",
    "is_stabilizable",
    "is_target_output_controllable",
    "is_functional_controllable",
    "is_functional_stabilizable",
    "is_functional_observable",
    "is_functional_detectable",
    "check_target_output_controllability",
    "check_functional_controllability",
    "check_functional_stabilizability",
    "check_functional_observability",
    "check_functional_detectability",
    "property_report",
]
