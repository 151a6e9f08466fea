"""Tolerance-aware dense linear algebra kernel.

Everything downstream (property criteria, controller/observer synthesis) is
expressed through the handful of primitives here: numerical rank, the right
pseudoinverse, Krylov subspace bases, ordered-Schur invariant subspaces,
observability indices and pole placement.

Matrices are plain ``numpy.ndarray`` objects. Spectra are 1-D complex arrays
sorted by (real, imag) so results are deterministic.
"""
from __future__ import annotations

import os
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.signal
from scipy.optimize import linear_sum_assignment

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    RankDeficient,
    Uncontrollable,
    UnpairedComplexPole,
)

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class TolerancePolicy:
    """Numerical tolerances used for every rank and spectrum decision.

    Parameters
    ----------
    relative_rank_tol : float or None
        Singular values below ``relative_rank_tol * sigma_max`` count as zero
        in :func:`numerical_rank`. ``None`` selects the LAPACK-style default
        ``max(rows, cols) * eps``.
    absolute_zero_tol : float
        Threshold for residual norms (membership of a vector in a subspace,
        constraint residuals of designs). Residuals are compared against
        ``absolute_zero_tol * max(1, scale)`` where ``scale`` is the norm of
        the quantity being tested.
    eigen_match_tol : float
        Maximum distance, relative to ``max(1, |lambda|)``, between two
        eigenvalues considered equal.
    """

    relative_rank_tol: float | None = None
    absolute_zero_tol: float = 1e-9
    eigen_match_tol: float = 1e-6

    def __post_init__(self):
        for name in ("relative_rank_tol", "absolute_zero_tol", "eigen_match_tol"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ValueError(f"{name} must be strictly positive, got {value!r}")

    def rank_threshold(self, sigma_max: float, shape: tuple[int, ...]) -> float:
        rtol = self.relative_rank_tol
        if rtol is None:
            rtol = max(shape) * EPS
        return rtol * sigma_max

    @property
    def decision_rtol(self) -> float:
        """Relative threshold for rank decisions on computed (noisy) data."""
        return max(self.relative_rank_tol or 0.0, self.absolute_zero_tol)

    @classmethod
    def from_env(cls, **overrides) -> "TolerancePolicy":
        """Build a policy, honouring ``FUNCCTL_TOL`` for ``relative_rank_tol``."""
        env = os.environ.get("FUNCCTL_TOL")
        if env and "relative_rank_tol" not in overrides:
            overrides["relative_rank_tol"] = float(env)
        return cls(**overrides)


DEFAULT_TOL = TolerancePolicy()


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis (as columns) of a subspace of R^n or C^n."""

    basis: np.ndarray
    tol_used: float

    @property
    def dimension(self) -> int:
        return self.basis.shape[1]

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    def residual(self, vectors: np.ndarray) -> np.ndarray:
        """Column norms of the components of ``vectors`` orthogonal to the subspace."""
        V = np.asarray(vectors)
        if V.ndim == 1:
            V = V[:, None]
        Q = self.basis
        R = V - Q @ (Q.conj().T @ V)
        R = R - Q @ (Q.conj().T @ R)
        return np.linalg.norm(R, axis=0)


def as_matrix(M, name: str = "matrix", allow_empty: bool = False) -> np.ndarray:
    """Coerce ``M`` to a finite 2-D float array."""
    arr = np.array(M, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {arr.shape}")
    if not allow_empty and min(arr.shape) < 1:
        raise DimensionMismatch(f"{name} must be non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf")
    return arr


def _check_square(A: np.ndarray, name: str = "A") -> int:
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {A.shape}")
    return A.shape[0]


def numerical_rank(M, tol: TolerancePolicy = DEFAULT_TOL) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol.rank_threshold(s[0], M.shape)))


def right_pseudoinverse(F, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Return ``F^T (F F^T)^{-1}`` for a full-row-rank ``F``."""
    F = as_matrix(F, "F")
    if numerical_rank(F, tol) < F.shape[0]:
        raise RankDeficient(f"F ({F.shape[0]}x{F.shape[1]}) does not have full row rank")
    return np.linalg.solve(F @ F.T, F).T


def orth(M, rtol: float) -> np.ndarray:
    """Orthonormal basis of the column space of ``M``; drops sigma <= rtol * sigma_max."""
    M = np.asarray(M)
    if M.size == 0:
        return np.zeros((M.shape[0], 0), dtype=M.dtype)
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    if s[0] == 0:
        return np.zeros((M.shape[0], 0), dtype=U.dtype)
    return U[:, s > rtol * s[0]]


def null_space_rows(F, rtol: float) -> np.ndarray:
    """Rows spanning the orthogonal complement of the row space of ``F``."""
    F = np.asarray(F, dtype=float)
    n = F.shape[1]
    if F.shape[0] == 0:
        return np.eye(n)
    _, s, Vt = np.linalg.svd(F)
    rank = int(np.sum(s > rtol * s[0])) if s.size and s[0] > 0 else 0
    return Vt[rank:]


def span_union(*bases: np.ndarray, rtol: float) -> np.ndarray:
    """Orthonormal basis of the sum of several column spaces."""
    blocks = [b for b in bases if b.shape[1]]
    if not blocks:
        return np.zeros((bases[0].shape[0], 0))
    return orth(np.hstack(blocks), rtol)


def controllability_subspace(A, B, tol: TolerancePolicy = DEFAULT_TOL) -> SubspaceBasis:
    """Orthonormal basis of Im[B, AB, ..., A^{n-1}B] by block Krylov iteration.

    New directions ``A q`` are orthogonalised (twice) against the basis found
    so far and accepted only if the remainder exceeds
    ``decision_rtol * ||A||``, so powers of ``A`` are never formed.
    """
    A = as_matrix(A, "A")
    B = as_matrix(B, "B", allow_empty=True)
    n = _check_square(A)
    if B.shape[0] != n:
        raise DimensionMismatch(f"B has {B.shape[0]} rows, expected {n}")
    rtol = tol.decision_rtol
    Q = orth(B, rtol) if B.size else np.zeros((n, 0))
    normA = np.linalg.norm(A, 2)
    fresh = Q
    while fresh.shape[1] and Q.shape[1] < n and normA > 0:
        W = A @ fresh
        for _ in range(2):
            W = W - Q @ (Q.T @ W)
        U, s, _ = np.linalg.svd(W, full_matrices=False)
        fresh = U[:, s > rtol * normA]
        if fresh.shape[1]:
            # re-orthogonalise the accepted block against Q once more
            fresh = fresh - Q @ (Q.T @ fresh)
            fresh, _ = np.linalg.qr(fresh)
        Q = np.hstack([Q, fresh])
    return SubspaceBasis(Q, rtol)


def observability_subspace(A, C, tol: TolerancePolicy = DEFAULT_TOL) -> SubspaceBasis:
    """Basis of the row space of the observability matrix (as columns)."""
    A = as_matrix(A, "A")
    C = as_matrix(C, "C", allow_empty=True)
    if C.shape[1] != A.shape[0]:
        raise DimensionMismatch(f"C has {C.shape[1]} columns, expected {A.shape[0]}")
    return controllability_subspace(A.T, C.T, tol)


def sort_spectrum(values) -> np.ndarray:
    v = np.asarray(values, dtype=complex).ravel()
    return v[np.lexsort((v.imag, v.real))]


def eigenvalues(A) -> np.ndarray:
    A = as_matrix(A, "A")
    _check_square(A)
    try:
        return sort_spectrum(np.linalg.eigvals(A))
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc


def _match_cost(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.abs(a[:, None] - b[None, :]) / np.maximum(1.0, np.abs(b))[None, :]


def spectra_match(got, want, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """True if two multisets of eigenvalues agree within ``eigen_match_tol``."""
    got = np.asarray(got, dtype=complex).ravel()
    want = np.asarray(want, dtype=complex).ravel()
    if got.size != want.size:
        return False
    if got.size == 0:
        return True
    cost = _match_cost(got, want)
    rows, cols = linear_sum_assignment(cost)
    return bool(cost[rows, cols].max() <= tol.eigen_match_tol)


def spectrum_contains(sup, sub, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """True if the multiset ``sub`` is contained in ``sup`` within tolerance."""
    sup = np.asarray(sup, dtype=complex).ravel()
    sub = np.asarray(sub, dtype=complex).ravel()
    if sub.size > sup.size:
        return False
    if sub.size == 0:
        return True
    cost = _match_cost(sub, sup)
    rows, cols = linear_sum_assignment(cost)
    return bool(cost[rows, cols].max() <= tol.eigen_match_tol)


def check_poles(poles, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Validate that ``poles`` is closed under conjugation; return it sorted."""
    p = sort_spectrum(poles)
    if not spectra_match(p, p.conj(), tol):
        raise UnpairedComplexPole(f"pole set {p} is not closed under conjugation")
    return p


def power_image_basis(A, lam: complex, tol: TolerancePolicy = DEFAULT_TOL) -> SubspaceBasis:
    """Orthonormal basis of Im((lam I - A)^n).

    This is the A-invariant subspace belonging to every eigenvalue other than
    ``lam``; it is read off an ordered Schur form with those eigenvalues moved
    to the leading block. A complex ``lam`` yields a complex basis.
    """
    A = as_matrix(A, "A")
    _check_square(A)
    lam = complex(lam)
    radius = tol.eigen_match_tol * max(1.0, abs(lam))
    try:
        if abs(lam.imag) <= radius:
            target = lam.real

            def keep(re, im):
                return abs(complex(re, im) - target) > radius

            _, Z, sdim = sla.schur(A, output="real", sort=keep)
        else:

            def keep(mu):
                return abs(mu - lam) > radius

            _, Z, sdim = sla.schur(A.astype(complex), output="complex", sort=keep)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceFailure(f"ordered Schur form failed: {exc}") from exc
    return SubspaceBasis(Z[:, :sdim], radius)


def observability_indices(A, F, tol: TolerancePolicy = DEFAULT_TOL) -> list[int]:
    """Observability indices of the pair (A, F) under power-major selection.

    For k = 0, 1, ... and, within each k, rows i = 1..r, the row F_i A^k is
    admitted when independent of all rows admitted before it. Once a row is
    rejected its higher powers are never examined.
    """
    A = as_matrix(A, "A")
    F = as_matrix(F, "F")
    n = _check_square(A)
    if F.shape[1] != n:
        raise DimensionMismatch(f"F has {F.shape[1]} columns, expected {n}")
    if numerical_rank(F, tol) < F.shape[0]:
        raise RankDeficient("F does not have full row rank")
    r = F.shape[0]
    rtol = tol.decision_rtol
    Q = np.zeros((n, 0))
    nu = [0] * r
    alive = [True] * r
    current = F.copy()
    for _ in range(n):
        for i in range(r):
            if not alive[i]:
                continue
            v = current[i]
            res = v - Q @ (Q.T @ v)
            res = res - Q @ (Q.T @ res)
            norm = np.linalg.norm(res)
            if norm > rtol * np.linalg.norm(v):
                Q = np.hstack([Q, (res / norm)[:, None]])
                nu[i] += 1
            else:
                alive[i] = False
        if not any(alive):
            break
        current = current @ A
    return nu


def _ackermann(A: np.ndarray, b: np.ndarray, poles: np.ndarray) -> np.ndarray:
    q = A.shape[0]
    ctrb = np.empty((q, q))
    col = b.copy()
    for k in range(q):
        ctrb[:, k] = col
        col = A @ col
    coeffs = np.real(np.poly(poles))
    phi = np.zeros_like(A)
    for c in coeffs:
        phi = phi @ A + c * np.eye(q)
    e_last = np.zeros(q)
    e_last[-1] = 1.0
    y = np.linalg.solve(ctrb.T, e_last)
    return (y @ phi)[None, :]


def _placed(M: np.ndarray, poles: np.ndarray, tol: TolerancePolicy) -> bool:
    if spectra_match(eigenvalues(M), poles, tol):
        return True
    gaps = np.abs(poles[:, None] - poles[None, :]) / np.maximum(1.0, np.abs(poles))[None, :]
    if not np.any(gaps[~np.eye(poles.size, dtype=bool)] <= tol.eigen_match_tol):
        return False
    # repeated poles: eigenvalues of a near-Jordan block are ill conditioned,
    # the characteristic polynomial is not
    got, want = np.poly(M), np.real(np.poly(poles))
    return bool(np.linalg.norm(got - want) <= tol.eigen_match_tol * np.linalg.norm(want))


def _tits_yang(A: np.ndarray, B: np.ndarray, poles: np.ndarray) -> np.ndarray:
    # non-convergence only means a less robust gain; the spectrum is checked by the caller
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        return scipy.signal.place_poles(A, B, poles, method="YT").gain_matrix


def place_poles(Ar, Br, poles, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Gain ``Z`` such that ``eig(Ar - Br Z)`` equals ``poles``.

    Single-input pairs (after removing dependent input columns) use
    Ackermann's formula, which gives the unique gain. Multi-input pairs use
    the Tits-Yang method from SciPy, falling back to a random single-input
    reduction when that method cannot handle the pole multiplicities.
    """
    Ar = as_matrix(Ar, "Ar")
    Br = as_matrix(Br, "Br")
    q = _check_square(Ar, "Ar")
    if Br.shape[0] != q:
        raise DimensionMismatch(f"Br has {Br.shape[0]} rows, expected {q}")
    p = check_poles(poles, tol)
    if p.size != q:
        raise DimensionMismatch(f"{p.size} poles requested for a system of order {q}")
    if controllability_subspace(Ar, Br, tol).dimension < q:
        raise Uncontrollable("the pair (Ar, Br) is not controllable")
    m = Br.shape[1]

    _, s, Vt = np.linalg.svd(Br, full_matrices=False)
    k = int(np.sum(s > tol.decision_rtol * s[0]))
    V = Vt[:k].T
    Bc = Br @ V

    candidates = []
    if k == 1:
        candidates.append(lambda: _ackermann(Ar, Bc[:, 0], p))
    else:
        candidates.append(lambda: _tits_yang(Ar, Bc, p))
        rng = np.random.default_rng(0)
        for _ in range(20):
            K0 = rng.standard_normal((k, q))
            v = rng.standard_normal(k)
            candidates.append(lambda K0=K0, v=v: K0 + np.outer(v, _ackermann(Ar - Bc @ K0, Bc @ v, p)))

    for make in candidates:
        try:
            Gc = np.real_if_close(make())
        except (ValueError, np.linalg.LinAlgError):
            continue
        Z = (V @ Gc).reshape(m, q)
        if np.all(np.isfinite(Z)) and _placed(Ar - Br @ Z, p, tol):
            return Z
    raise ConvergenceFailure("pole placement did not reach the requested spectrum")
