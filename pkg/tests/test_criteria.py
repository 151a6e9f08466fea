import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import planted_system, random_similarity
from funcctl import reference as ref
from funcctl.criteria import (
    IMPLICATIONS,
    SystemTriple,
    check_functional_controllability,
    classical_properties,
    dual,
    is_controllable,
    is_functional_controllable,
    is_functional_detectable,
    is_functional_observable,
    is_functional_stabilizable,
    is_stabilizable,
    is_target_output_controllable,
    property_report,
)
from funcctl.errors import DimensionMismatch, RankDeficient

seeds = st.integers(0, 2**32 - 1)


# -- validation --------------------------------------------------------------------

def test_system_requires_full_row_rank_output():
    with pytest.raises(RankDeficient):
        SystemTriple(np.eye(2), np.ones((2, 1)), np.array([[1.0, 1.0], [2.0, 2.0]]))


def test_system_shape_checks():
    with pytest.raises(DimensionMismatch):
        SystemTriple(np.ones((2, 3)), np.ones((2, 1)), np.ones((1, 3)))
    with pytest.raises(DimensionMismatch):
        SystemTriple(np.eye(2), np.ones((3, 1)), np.ones((1, 2)))


def test_functional_width_checked(example1):
    with pytest.raises(DimensionMismatch):
        is_functional_controllable(example1, np.ones((1, 3)))


def test_dual_is_involution(example2):
    assert dual(dual(example2)) == example2


# -- published verdicts ------------------------------------------------------------

@pytest.mark.parametrize("name", sorted(ref.EXAMPLE1_VERDICTS))
def test_example1_verdicts(example1, name):
    F = ref.EXAMPLE1_F[name]
    want = ref.EXAMPLE1_VERDICTS[name]
    got = (
        is_target_output_controllable(example1, F),
        is_functional_stabilizable(example1, F),
        is_functional_controllable(example1, F),
    )
    assert got == want


def test_example1_detectability(example1):
    # only x1, x2 are measured; x3 is a stable mode, x4 an unstable one
    e3 = np.array([[0.0, 0.0, 1.0, 0.0]])
    e4 = np.array([[0.0, 0.0, 0.0, 1.0]])
    assert is_functional_detectable(example1, e3) and not is_functional_observable(example1, e3)
    assert not is_functional_detectable(example1, e4)
    assert is_functional_observable(example1, ref.EXAMPLE1_F["z3"])


def test_example2_properties(example2):
    cp = classical_properties(example2)
    assert not cp.controllable and not cp.observable
    assert is_functional_controllable(example2, ref.EXAMPLE2_F)
    assert is_functional_observable(example2, ref.EXAMPLE2_F)
    assert is_functional_controllable(example2, ref.EXAMPLE3_F)


def test_hidden_mode_functional_controllable(hidden_mode):
    # x3 is uncontrollable, but F only weighs x1 and x2
    assert not is_controllable(hidden_mode.A, hidden_mode.B)
    assert is_functional_controllable(hidden_mode, ref.HIDDEN_MODE_F)


def test_evidence_ranks(example1):
    ev = check_functional_controllability(example1, ref.EXAMPLE1_F["z1"])
    assert not ev.holds
    assert (ev.rank_without, ev.rank_with) == (2, 3)
    assert set(ev.to_dict()) == {"holds", "rank_with", "rank_without", "marginal"}


def test_marginal_flag_near_threshold():
    sys = SystemTriple(np.diag([1.0, 2.0]), np.array([[1.0], [0.0]]), np.eye(2))
    ev = check_functional_controllability(sys, np.array([[1.0, 1e-8]]))
    assert ev.marginal
    ev = check_functional_controllability(sys, np.array([[1.0, 0.5]]))
    assert not ev.holds and not ev.marginal


# -- planted ground truth ----------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(seeds)
def test_planted_verdicts(seed):
    P = planted_system(np.random.default_rng(seed))
    assert is_functional_controllable(P.sys, P.F) == P.functional_controllable
    assert is_functional_stabilizable(P.sys, P.F) == P.functional_stabilizable
    assert is_controllable(P.sys.A, P.sys.B) == P.controllable
    assert is_stabilizable(P.sys.A, P.sys.B) == P.stabilizable


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_duality(seed):
    P = planted_system(np.random.default_rng(seed))
    d = dual(P.sys)
    assert is_functional_observable(d, P.F) == is_functional_controllable(P.sys, P.F)
    assert is_functional_detectable(d, P.F) == is_functional_stabilizable(P.sys, P.F)
    assert is_functional_controllable(d, P.F) == is_functional_observable(P.sys, P.F)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_implications_hold(seed):
    P = planted_system(np.random.default_rng(seed))
    rep = property_report(P.sys, P.F)
    for a, b in IMPLICATIONS:
        assert not rep.verdicts()[a] or rep.verdicts()[b]


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_identity_functional_reduces_to_classical(seed):
    P = planted_system(np.random.default_rng(seed))
    I = np.eye(P.sys.n)
    cp = classical_properties(P.sys)
    assert is_functional_controllable(P.sys, I) == cp.controllable
    assert is_functional_stabilizable(P.sys, I) == cp.stabilizable
    assert is_functional_observable(P.sys, I) == cp.observable
    assert is_functional_detectable(P.sys, I) == cp.detectable


# -- invariances -------------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(seeds, st.floats(1e-3, 1e3))
def test_verdicts_invariant_under_scaling(seed, scale):
    P = planted_system(np.random.default_rng(seed))
    base = property_report(P.sys, P.F).verdicts()
    scaled = SystemTriple(P.sys.A, scale * P.sys.B, scale * P.sys.C)
    assert property_report(scaled, scale * P.F).verdicts() == base


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_verdicts_invariant_under_orthogonal_change_of_basis(seed):
    # membership of F^T in a subspace is preserved only when T^-1 = T^T
    rng = np.random.default_rng(seed)
    P = planted_system(rng)
    T, _ = np.linalg.qr(random_similarity(rng, P.sys.n))
    Ti = T.T
    moved = SystemTriple(Ti @ P.sys.A @ T, Ti @ P.sys.B, P.sys.C @ T)
    assert property_report(moved, P.F @ T).verdicts() == property_report(P.sys, P.F).verdicts()
