"""Statistical models that produce complementary p-value pairs.

* :class:`GaussianMeansModel` -- ``M`` independent normal means, each with the
  couple ``h_i: theta_i <= b_i`` vs ``k_i: theta_i > b_i``.
* :class:`NestedNormalModel` -- a single normal mean tested against two
  ordered thresholds, ``h_i: theta >= theta_i`` vs ``k_i: theta < theta_i``.
  These couples do not combine freely (``h_2`` and ``k_1`` never hold together).
* :func:`correlation_edge_pvalues` -- one couple per pair of variables of a
  data matrix, via the Fisher z-transform.

Sample means are drawn directly from ``Normal(theta, 1/n)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import rng
from .exceptions import (
    DegenerateColumn,
    InsufficientSamples,
    InvalidOrdering,
    LengthMismatch,
    PreconditionError,
)
from .family import (
    FREE_COMBINATION,
    HypothesisFamily,
    PValuePair,
    TruthAssignment,
    ordered_threshold_oracle,
)
from .normal import std_normal_cdf, std_normal_sf

FISHER_Z_CLAMP = 18.0

# Distinct Philox key streams per model type.
_GAUSSIAN_STREAM = 0
_NESTED_STREAM = 1


def _vector(x):
    return tuple(float(v) for v in np.atleast_1d(np.asarray(x, dtype=float)))


@dataclass(frozen=True)
class GaussianMeansModel:
    """Independent means ``theta`` observed through ``n`` unit-variance draws each.

    ``null_boundary`` defaults to zeros.
    """

    theta: tuple
    n: int = 1
    null_boundary: tuple = None

    def __post_init__(self):
        theta = _vector(self.theta)
        if not theta:
            raise PreconditionError("theta must be non-empty")
        b = (0.0,) * len(theta) if self.null_boundary is None else _vector(self.null_boundary)
        if len(b) != len(theta):
            raise LengthMismatch("theta and null_boundary differ in length")
        if int(self.n) < 1:
            raise PreconditionError("n must be >= 1")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "null_boundary", b)
        object.__setattr__(self, "n", int(self.n))

    @property
    def m(self) -> int:
        return len(self.theta)

    @property
    def h_true(self) -> np.ndarray:
        # closed null: theta on the boundary counts as h true
        return np.asarray(self.theta) <= np.asarray(self.null_boundary)

    def truth(self) -> TruthAssignment:
        return TruthAssignment.from_mask(self.h_true)


@dataclass(frozen=True)
class NestedNormalModel:
    theta: float
    n: int = 1
    theta1: float = 0.0
    theta2: float = 1.0

    def __post_init__(self):
        if not self.theta1 < self.theta2:
            raise InvalidOrdering(
                f"need theta1 < theta2, got {self.theta1} >= {self.theta2}")
        if int(self.n) < 1:
            raise PreconditionError("n must be >= 1")
        object.__setattr__(self, "n", int(self.n))

    @property
    def m(self) -> int:
        return 2

    @property
    def thresholds(self) -> tuple:
        return (float(self.theta1), float(self.theta2))

    @property
    def h_true(self) -> np.ndarray:
        return np.array([self.theta >= self.theta1, self.theta >= self.theta2])

    def truth(self) -> TruthAssignment:
        return TruthAssignment.from_mask(self.h_true)

    def oracle(self):
        return ordered_threshold_oracle(self.thresholds)


def simulate_sample_means_batch(model, seed: int, start: int, stop: int) -> np.ndarray:
    """Sample means for replicates ``start..stop-1``, shape ``(stop - start, m)``.

    For :class:`NestedNormalModel` the result has a single column.
    """
    if isinstance(model, NestedNormalModel):
        z = rng.normals(seed, 1, start, stop, stream=_NESTED_STREAM)
        return model.theta + z / np.sqrt(model.n)
    z = rng.normals(seed, model.m, start, stop, stream=_GAUSSIAN_STREAM)
    return np.asarray(model.theta) + z / np.sqrt(model.n)


def simulate_sample_means(model, seed: int, replicate: int = 0) -> np.ndarray:
    return simulate_sample_means_batch(model, seed, replicate, replicate + 1)[0]


def gaussian_means_pvalue_arrays(model: GaussianMeansModel, sample_means):
    """``(p_h, p_k)`` arrays for sample means of shape ``(..., m)``."""
    xbar = np.asarray(sample_means, dtype=float)
    if xbar.shape[-1] != model.m:
        raise LengthMismatch(f"expected {model.m} sample means, got {xbar.shape[-1]}")
    z = np.sqrt(model.n) * (xbar - np.asarray(model.null_boundary))
    return std_normal_sf(z), std_normal_cdf(z)


def gaussian_means_pvalues(model: GaussianMeansModel, sample_means) -> HypothesisFamily:
    p_h, p_k = gaussian_means_pvalue_arrays(model, np.atleast_1d(sample_means))
    return HypothesisFamily.from_arrays(p_h, p_k, FREE_COMBINATION)


def nested_pvalue_arrays(model: NestedNormalModel, xbar):
    """``(p_h, p_k)`` of shape ``(..., 2)`` for sample means ``xbar``."""
    xbar = np.asarray(xbar, dtype=float)[..., None]
    z = np.sqrt(model.n) * (xbar - np.asarray(model.thresholds))
    return std_normal_cdf(z), std_normal_sf(z)


def nested_pvalues(model: NestedNormalModel, xbar: float) -> tuple:
    """The two p-value pairs for ``h_i: theta >= theta_i``.

    A small sample mean is evidence against ``h_i``, so
    ``p_h,i = Phi(sqrt(n) (xbar - theta_i))``.
    """
    p_h, p_k = nested_pvalue_arrays(model, float(xbar))
    return tuple(PValuePair(float(a), float(b)) for a, b in zip(p_h, p_k))


def nested_family(model: NestedNormalModel, xbar: float) -> HypothesisFamily:
    return HypothesisFamily(nested_pvalues(model, xbar), model.oracle())


def edge_pairs(p: int) -> list:
    """Variable pairs ``(i, j)``, ``i < j``, 1-based, in the edge order used
    by :func:`correlation_edge_pvalues`."""
    return [(i + 1, j + 1) for i, j in combinations(range(p), 2)]


def fisher_z(r):
    """Fisher transform ``atanh(r)``, clamped to +-18 so ``|r| = 1`` stays finite."""
    r = np.clip(np.asarray(r, dtype=float), -1.0, 1.0)
    with np.errstate(divide="ignore"):
        z = np.arctanh(r)
    return np.clip(z, -FISHER_Z_CLAMP, FISHER_Z_CLAMP)


@dataclass(frozen=True)
class CorrelationEdges:
    family: HypothesisFamily
    edges: list = field(default_factory=list)
    correlations: np.ndarray = None
    n_obs: int = 0
    rho0: float = 0.0


def correlation_edge_test(data, rho0: float = 0.0) -> CorrelationEdges:
    """Test ``h: rho_ij <= rho0`` against ``k: rho_ij > rho0`` for every pair
    of columns of ``data`` (observations in rows).

    Returns the family together with the edge order and sample correlations.
    """
    x = np.asarray(data, dtype=float)
    if x.ndim != 2:
        raise PreconditionError("data must be a 2-D matrix")
    n_obs, p = x.shape
    if n_obs < 4:
        raise InsufficientSamples(f"need at least 4 observations, got {n_obs}")
    if not (0.0 <= rho0 < 1.0):
        raise PreconditionError(f"rho0={rho0!r} is not in [0, 1)")
    sd = x.std(axis=0)
    bad = np.flatnonzero(~(sd > 0))
    if bad.size:
        raise DegenerateColumn(f"constant columns: {(bad + 1).tolist()}")
    edges = edge_pairs(p)
    if not edges:
        return CorrelationEdges(None, [], np.empty(0), n_obs, rho0)
    r_mat = np.corrcoef(x, rowvar=False)
    iu = np.triu_indices(p, k=1)
    r = r_mat[iu]
    stat = np.sqrt(n_obs - 3) * (fisher_z(r) - np.arctanh(rho0))
    family = HypothesisFamily.from_arrays(std_normal_sf(stat), std_normal_cdf(stat),
                                          FREE_COMBINATION)
    return CorrelationEdges(family, edges, r, n_obs, rho0)


def correlation_edge_pvalues(data, rho0: float = 0.0) -> HypothesisFamily:
    """Family over the ``P(P-1)/2`` edges; see :func:`correlation_edge_test`.

    Returns ``None`` when ``P < 2`` (no edges).
    """
    return correlation_edge_test(data, rho0).family
