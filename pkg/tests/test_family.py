import numpy as np
import pytest
from hypothesis import given, strategies as st

from triadic import (
    Decision,
    DecisionVector,
    DegenerateFamily,
    DomainError,
    FREE_COMBINATION,
    HypothesisFamily,
    PartitionSets,
    PValuePair,
    PreconditionError,
    SizeLimitExceeded,
    TruthAssignment,
    is_free_combination,
    ordered_threshold_oracle,
    partition_from_decisions,
)
from triadic.family import FeasibilityOracle

D1, D2, D3 = Decision.D1, Decision.D2, Decision.D3


def test_pvalue_pair_range():
    with pytest.raises(DomainError):
        PValuePair(1.2, 0.0)
    with pytest.raises(DomainError):
        PValuePair(0.5, -0.1)


def test_complementary_flag():
    assert PValuePair(0.3, 0.7).complementary
    assert PValuePair.from_p_h(0.123456789).complementary
    assert not PValuePair(0.3, 0.6).complementary


def test_family_needs_members():
    with pytest.raises(DegenerateFamily):
        HypothesisFamily(())


def test_family_is_immutable():
    f = HypothesisFamily.from_p_h([0.1, 0.2])
    with pytest.raises(AttributeError):
        f.pairs = ()


def test_free_combination_m3():
    assert is_free_combination(HypothesisFamily.from_p_h([0.5] * 3))


def test_nested_family_is_not_free():
    # h_i: theta >= theta_i with theta1 < theta2; h2 and k1 cannot hold together
    oracle = ordered_threshold_oracle((0.0, 1.0))
    f = HypothesisFamily.from_p_h([0.5, 0.5], oracle)
    assert not f.feasible({2}, {1})
    assert f.feasible({1}, {2})
    assert not is_free_combination(f)


def test_single_couple_with_non_empty_cells_is_free():
    f = HypothesisFamily.from_p_h([0.5], ordered_threshold_oracle((0.0,)))
    assert is_free_combination(f)


def test_free_combination_oracle_is_checked_exhaustively():
    calls = []

    def always(j1, j2):
        calls.append((j1, j2))
        return True

    f = HypothesisFamily.from_p_h([0.5] * 4, FeasibilityOracle(always))
    assert is_free_combination(f)
    assert len(calls) == 2 ** 4
    assert all(not (a & b) for a, b in calls)


def test_free_combination_size_limit():
    f = HypothesisFamily.from_p_h([0.5] * 25)
    with pytest.raises(SizeLimitExceeded):
        is_free_combination(f)


def test_feasible_requires_disjoint():
    f = HypothesisFamily.from_p_h([0.5, 0.5])
    with pytest.raises(PreconditionError):
        f.feasible({1}, {1})


@pytest.mark.parametrize("decisions, l, u_bar, g, u", [
    ((D1, D2, D3), {1}, {2}, {3}, {1, 3}),
    ((D3,) * 4, set(), set(), {1, 2, 3, 4}, {1, 2, 3, 4}),
    ((D2,) * 3, set(), {1, 2, 3}, set(), set()),
])
def test_partition_from_decisions(decisions, l, u_bar, g, u):
    p = partition_from_decisions(DecisionVector(decisions))
    assert p.l == l and p.u_bar == u_bar and p.g == g and p.u == u


@given(st.lists(st.sampled_from([1, 2, 3]), min_size=1, max_size=30))
def test_partition_invariants(codes):
    p = partition_from_decisions(DecisionVector(codes))
    full = set(range(1, len(codes) + 1))
    assert p.u | p.u_bar == full and not (p.u & p.u_bar)
    assert p.l | p.l_bar == full and not (p.l & p.l_bar)
    assert p.g == p.u - p.l
    assert p.inclusion_holds
    assert not (p.u_bar & p.l) and not (p.u_bar & p.g) and not (p.l & p.g)
    assert p.u_bar | p.l | p.g == full
    assert p.to_decisions().decisions == tuple(Decision(c) for c in codes)


def test_partition_rejects_overlap():
    with pytest.raises(PreconditionError):
        PartitionSets(2, {1}, {1, 2}, set(), {1, 2})


def test_inclusion_can_fail():
    p = PartitionSets.from_rejections(2, rejected_h={1}, rejected_k={1})
    assert not p.inclusion_holds
    with pytest.raises(PreconditionError):
        p.to_decisions()


@given(st.lists(st.floats(0, 1), min_size=1, max_size=20), st.floats(0, 0.5))
def test_symmetric_threshold_gives_inclusion(p_h, tau):
    f = HypothesisFamily.from_p_h(p_h)
    rej_h = {i for i, p in enumerate(f.pairs, 1) if p.p_h < tau}
    rej_k = {i for i, p in enumerate(f.pairs, 1) if p.p_k < tau}
    assert PartitionSets.from_rejections(f.m, rej_h, rej_k).inclusion_holds


def test_truth_assignment():
    t = TruthAssignment.from_mask([True, False, True])
    assert t.true_hypotheses == {1, 3} and t.true_alternatives == {2}
    assert np.array_equal(t.h_mask, [True, False, True])
    with pytest.raises(PreconditionError):
        TruthAssignment({1, 2}, {2})
    with pytest.raises(PreconditionError):
        TruthAssignment({1}, {3})
