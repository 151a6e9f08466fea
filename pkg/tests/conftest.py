"""Shared fixtures and random-system generators with planted ground truth.

``planted_system`` builds (A, B, C) in Kalman form and hides it behind a
random similarity ``T`` (condition number capped). Because the uncontrollable
block is diagonal with eigenvalues chosen away from the controllable block,
its eigenvectors are known in closed form and the truth of functional
controllability/stabilizability for a functional built from those vectors is
known without calling the library.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pytest

from funcctl import reference as ref
from funcctl.criteria import SystemTriple

MAX_COND = 100.0
STABLE_MODES = (-2.5, -1.2, -0.4)
UNSTABLE_MODES = (0.0, 0.7, 1.6)


def random_similarity(rng: np.random.Generator, n: int) -> np.ndarray:
    while True:
        T = rng.standard_normal((n, n))
        if np.linalg.cond(T) <= MAX_COND:
            return T


def _robustly_controllable(A: np.ndarray, B: np.ndarray) -> bool:
    n = A.shape[0]
    for lam in np.linalg.eigvals(A):
        M = np.hstack([lam * np.eye(n) - A, B])
        s = np.linalg.svd(M, compute_uv=False)
        if s[n - 1] < 1e-2 * max(1.0, np.linalg.norm(A, 2)):
            return False
    return True


@dataclass
class Planted:
    """A system together with the quantities its verdicts are decided by."""

    sys: SystemTriple
    F: np.ndarray
    functional_controllable: bool
    functional_stabilizable: bool
    controllable: bool
    stabilizable: bool


def planted_system(rng: np.random.Generator, n: int | None = None) -> Planted:
    """Random system in disguised Kalman form and a functional with known verdicts.

    The functional is ``F^T = W c`` where ``W`` holds a basis of the
    controllable subspace followed by eigenvectors of the uncontrollable modes;
    a verdict is true exactly when ``c`` vanishes on the relevant modes.
    """
    n = int(rng.integers(2, 7)) if n is None else n
    nc = int(rng.integers(1, n + 1))
    nu = n - nc
    m = min(int(rng.integers(1, 3)), nc)  # B keeps full column rank so the dual is valid
    p = int(rng.integers(1, n + 1))
    pool = list(STABLE_MODES) + list(UNSTABLE_MODES)
    while True:
        mus = rng.choice(pool, size=nu, replace=False) if nu <= len(pool) else None
        Ac = rng.standard_normal((nc, nc))
        Bc = rng.standard_normal((nc, m))
        if nc and not _robustly_controllable(Ac, Bc):
            continue
        eig_c = np.linalg.eigvals(Ac) if nc else np.array([])
        if nu and nc and np.min(np.abs(eig_c[:, None] - mus[None, :])) < 0.3:
            continue
        break
    A12 = rng.standard_normal((nc, nu))
    Ak = np.zeros((n, n))
    Ak[:nc, :nc] = Ac
    Ak[:nc, nc:] = A12
    Ak[nc:, nc:] = np.diag(mus) if nu else np.zeros((0, 0))
    Bk = np.zeros((n, m))
    Bk[:nc] = Bc
    T = random_similarity(rng, n)
    A = T @ Ak @ np.linalg.inv(T)
    B = T @ Bk
    while True:
        C = rng.standard_normal((p, n))
        if np.linalg.matrix_rank(C) == p:
            break

    # W = T [e_1..e_nc, v_1..v_nu] with v_j the eigenvectors of Ak for mu_j
    Wk = np.zeros((n, n))
    Wk[:nc, :nc] = np.eye(nc)
    for j, mu in enumerate(mus if nu else []):
        Wk[nc + j, nc + j] = 1.0
        if nc:
            Wk[:nc, nc + j] = np.linalg.solve(mu * np.eye(nc) - Ac, A12[:, j])
    W = T @ Wk
    unstable = [nc + j for j, mu in enumerate(mus if nu else []) if mu >= 0]

    r = int(rng.integers(1, n + 1))
    coeffs = rng.standard_normal((n, r))
    mode = rng.integers(0, 3)
    if mode == 0 and nu:
        coeffs[nc:] = 0.0  # inside the controllable subspace
    elif mode == 1 and unstable:
        coeffs[unstable] = 0.0  # touches stable uncontrollable modes only
    F = (W @ coeffs).T
    if np.linalg.matrix_rank(F) < r:
        return planted_system(rng, n)

    f_ctrb = bool(nu == 0 or np.allclose(coeffs[nc:], 0.0))
    f_stbl = bool(not unstable or np.allclose(coeffs[unstable], 0.0))
    return Planted(SystemTriple(A, B, C), F, f_ctrb, f_stbl, nu == 0, not unstable)


def invariant_functional_system(rng: np.random.Generator, n: int | None = None, k: int | None = None):
    """Controllable (A, B, C) and a functional whose rows span part of a left-invariant subspace.

    This keeps the augmented functional strictly shorter than n, so reduced
    order designs are genuinely reduced.
    """
    n = int(rng.integers(3, 7)) if n is None else n
    k = int(rng.integers(1, n)) if k is None else k  # dimension of the invariant row space
    while True:
        Ak = rng.standard_normal((n, n))
        Ak[n - k :, : n - k] = 0.0  # rows e_j^T, j >= n-k, span a left-invariant subspace
        T = random_similarity(rng, n)
        Tinv = np.linalg.inv(T)
        A = T @ Ak @ Tinv
        m = int(rng.integers(1, 3))
        B = rng.standard_normal((n, m))
        p = int(rng.integers(1, n))
        C = rng.standard_normal((p, n))
        if not _robustly_controllable(A, B):
            continue
        r = int(rng.integers(1, k + 1))
        G = rng.standard_normal((r, k))
        F = G @ Tinv[n - k :]
        return SystemTriple(A, B, C), F


def stable_poles(rng: np.random.Generator, count: int, complex_ok: bool = True) -> list[complex]:
    """Distinct left-half-plane poles, closed under conjugation, spread out."""
    poles: list[complex] = []
    while len(poles) < count:
        if complex_ok and count - len(poles) >= 2 and rng.random() < 0.3:
            a, b = -rng.uniform(1.0, 4.0), rng.uniform(0.5, 2.0)
            cand = [complex(a, b), complex(a, -b)]
        else:
            cand = [complex(-rng.uniform(1.0, 6.0), 0.0)]
        if all(abs(c - p) > 0.3 for c in cand for p in poles):
            poles += cand
    return poles


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def example1():
    return ref.example1_system()


@pytest.fixture
def example2():
    return ref.example2_system()


@pytest.fixture
def hidden_mode():
    return ref.hidden_mode_system()


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    lines = test_acceptance.summary_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
