import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from triadic import (
    DegenerateColumn,
    GaussianMeansModel,
    InsufficientSamples,
    InvalidOrdering,
    LengthMismatch,
    NestedNormalModel,
    correlation_edge_pvalues,
    correlation_edge_test,
    gaussian_means_pvalues,
    is_free_combination,
    nested_family,
    nested_pvalues,
    simulate_sample_means,
)
from triadic.models import edge_pairs, fisher_z, simulate_sample_means_batch

from conftest import erfc_cdf


def test_gaussian_boundary_symmetry():
    f = gaussian_means_pvalues(GaussianMeansModel([0.0, 2.0], 4, [1.0, 3.0]), [1.0, 3.0])
    assert np.allclose(f.p_h, 0.5) and np.allclose(f.p_k, 0.5)


def test_gaussian_pvalue_at_critical_value():
    f = gaussian_means_pvalues(GaussianMeansModel([0.0]), [1.6449])
    assert f.p_h[0] == pytest.approx(0.05, abs=1e-4)
    assert f.p_h[0] == pytest.approx(1 - erfc_cdf(1.6449), abs=1e-12)


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=8), st.integers(1, 500))
def test_gaussian_complementary(xbar, n):
    f = gaussian_means_pvalues(GaussianMeansModel([0.0] * len(xbar), n), xbar)
    assert f.complementary and f.is_declared_free
    assert np.all(np.abs(f.p_h + f.p_k - 1) <= 1e-12)


def test_gaussian_length_mismatch():
    with pytest.raises(LengthMismatch):
        gaussian_means_pvalues(GaussianMeansModel([0.0, 0.0]), [1.0])
    with pytest.raises(LengthMismatch):
        GaussianMeansModel([0.0, 0.0], 1, [0.0])


def test_truth_closed_null():
    m = GaussianMeansModel([-1.0, 0.0, 0.5])
    assert m.h_true.tolist() == [True, True, False]


def test_simulation_deterministic():
    m = GaussianMeansModel([0.0, 1.0, 2.0], 9)
    a = simulate_sample_means(m, 42, replicate=17)
    assert np.array_equal(a, simulate_sample_means(m, 42, replicate=17))
    assert np.array_equal(a, simulate_sample_means_batch(m, 42, 10, 20)[7])
    assert not np.array_equal(a, simulate_sample_means(m, 43, replicate=17))


def test_simulation_mean_and_spread():
    n, reps = 400, 20_000
    m = GaussianMeansModel([0.0], n)
    x = simulate_sample_means_batch(m, 1, 0, reps)[:, 0]
    assert abs(x.mean()) <= 3 / np.sqrt(n * reps)
    assert x.std() == pytest.approx(1 / np.sqrt(n), rel=0.03)


def test_nested_pvalues():
    m = NestedNormalModel(0.0, 1, 0.0, 10.0)
    p1, p2 = nested_pvalues(m, 0.0)
    assert p1.p_h == 0.5 and p1.complementary and p2.complementary
    p1, _ = nested_pvalues(NestedNormalModel(0.0, 4, 0.0, 1.0), -1.96 / 2)
    assert p1.p_h == pytest.approx(0.025, abs=1e-4)
    assert not is_free_combination(nested_family(m, 0.0))


@given(st.floats(-50, 50), st.integers(1, 100), st.floats(0.001, 5))
def test_nested_ordering(xbar, n, gap):
    p1, p2 = nested_pvalues(NestedNormalModel(0.0, n, 0.0, gap), xbar)
    assert p2.p_h <= p1.p_h


def test_nested_invalid_ordering():
    with pytest.raises(InvalidOrdering):
        NestedNormalModel(0.0, 1, 1.0, 0.0)


def test_nested_truth():
    assert NestedNormalModel(0.5, 1, 0.0, 1.0).h_true.tolist() == [True, False]
    assert NestedNormalModel(1.0, 1, 0.0, 1.0).h_true.tolist() == [True, True]
    assert NestedNormalModel(-1.0, 1, 0.0, 1.0).h_true.tolist() == [False, False]


def test_edge_order():
    assert edge_pairs(4) == [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]


def test_fisher_clamp():
    assert fisher_z(1.0) == 18.0 and fisher_z(-1.0) == -18.0
    assert np.isfinite(fisher_z(np.array([1.0 + 1e-16])))


def test_edge_at_threshold_is_half():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((60, 2))
    x[:, 1] += x[:, 0]
    r = np.corrcoef(x, rowvar=False)[0, 1]
    f = correlation_edge_pvalues(x, rho0=r)
    assert f.p_h[0] == pytest.approx(0.5, abs=1e-12)


def test_edge_duplicate_columns():
    rng = np.random.default_rng(1)
    x = rng.standard_normal((30, 3))
    x[:, 2] = x[:, 0]
    res = correlation_edge_test(x, 0.3)
    p = dict(zip(res.edges, res.family.p_h))
    assert p[(1, 3)] < 1e-100
    assert res.family.complementary


def test_edge_false_positive_rate():
    rng = np.random.default_rng(2)
    hits = total = 0
    for _ in range(200):
        f = correlation_edge_pvalues(rng.standard_normal((200, 10)), 0.0)
        hits += int((f.p_h < 0.05).sum())
        total += f.m
    rate = hits / total
    assert abs(rate - 0.05) <= 3 * np.sqrt(0.05 * 0.95 / total)


def test_edge_errors():
    with pytest.raises(InsufficientSamples):
        correlation_edge_pvalues(np.ones((3, 2)))
    x = np.random.default_rng(0).standard_normal((10, 3))
    x[:, 1] = 2.0
    with pytest.raises(DegenerateColumn):
        correlation_edge_pvalues(x)
    assert correlation_edge_pvalues(np.random.default_rng(0).standard_normal((10, 1))) is None


def test_boundary_pvalues_uniform_quick():
    m = GaussianMeansModel([0.0, 0.0], 5)
    x = simulate_sample_means_batch(m, 7, 0, 20_000)
    p_h = gaussian_means_pvalues(m, x[0]).p_h  # single replicate smoke
    assert p_h.shape == (2,)
    from triadic.models import gaussian_means_pvalue_arrays
    p, _ = gaussian_means_pvalue_arrays(m, x)
    assert stats.kstest(p.ravel(), "uniform").pvalue > 0.001
