"""Hypothesis/alternative couples, decision labels and index-set partitions.

All index sets exposed by this module are ``frozenset`` objects of 1-based
integers, matching the usual ``{1, ..., M}`` notation.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .exceptions import (
    DegenerateFamily,
    DomainError,
    LengthMismatch,
    PreconditionError,
    SizeLimitExceeded,
)

COMPLEMENT_TOL = 1e-12
MAX_FREE_COMBINATION_CHECK = 24


class Decision(enum.IntEnum):
    """Three-way decision for one hypothesis/alternative couple.

    D1: the hypothesis is significantly true (the alternative is rejected).
    D2: the hypothesis is significantly false (the hypothesis is rejected).
    D3: both are accepted; the conclusion is insignificant.
    """

    D1 = 1
    D2 = 2
    D3 = 3


@dataclass(frozen=True)
class PValuePair:
    """p-values of one hypothesis ``p_h`` and of its alternative ``p_k``."""

    p_h: float
    p_k: float

    def __post_init__(self):
        for name in ("p_h", "p_k"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise DomainError(f"{name}={v!r} is not a probability")

    @classmethod
    def from_p_h(cls, p_h: float) -> "PValuePair":
        return cls(float(p_h), 1.0 - float(p_h))

    @property
    def complementary(self) -> bool:
        return abs(self.p_h + self.p_k - 1.0) <= COMPLEMENT_TOL


Oracle = Callable[[frozenset, frozenset], bool]


class FreeCombination:
    """Structure in which every disjoint intersection is non-empty."""

    def __call__(self, j1: frozenset, j2: frozenset) -> bool:
        return True

    def __repr__(self):
        return "FreeCombination()"

    def __eq__(self, other):
        return isinstance(other, FreeCombination)

    def __hash__(self):
        return hash(FreeCombination)


FREE_COMBINATION = FreeCombination()


@dataclass(frozen=True)
class FeasibilityOracle:
    """Wraps a pure function ``(J1, J2) -> bool`` telling whether the
    intersection of hypotheses ``J1`` with alternatives ``J2`` is non-empty.
    """

    func: Oracle
    name: str = "oracle"

    def __call__(self, j1: frozenset, j2: frozenset) -> bool:
        return bool(self.func(frozenset(j1), frozenset(j2)))


def ordered_threshold_oracle(thetas: Sequence[float]) -> FeasibilityOracle:
    """Feasibility for ``h_i: theta >= thetas[i]`` vs ``k_i: theta < thetas[i]``
    about a single real parameter.

    The intersection is non-empty iff ``max(thetas[J1]) < min(thetas[J2])``.
    """
    th = tuple(float(t) for t in thetas)

    def feasible(j1, j2):
        lo = max((th[i - 1] for i in j1), default=-np.inf)
        hi = min((th[j - 1] for j in j2), default=np.inf)
        return lo < hi

    return FeasibilityOracle(feasible, name=f"ordered_thresholds{th}")


@dataclass(frozen=True)
class HypothesisFamily:
    """``M`` couples of p-value pairs plus the family structure."""

    pairs: tuple
    structure: object = FREE_COMBINATION

    def __post_init__(self):
        pairs = tuple(self.pairs)
        if not pairs:
            raise DegenerateFamily("a family needs at least one couple")
        for p in pairs:
            if not isinstance(p, PValuePair):
                raise TypeError(f"expected PValuePair, got {type(p).__name__}")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def from_p_h(cls, p_h: Iterable[float], structure=FREE_COMBINATION):
        """Build a family of complementary pairs ``(p_h, 1 - p_h)``."""
        return cls(tuple(PValuePair.from_p_h(p) for p in p_h), structure)

    @classmethod
    def from_arrays(cls, p_h, p_k, structure=FREE_COMBINATION):
        p_h = np.asarray(p_h, dtype=float)
        p_k = np.asarray(p_k, dtype=float)
        if p_h.shape != p_k.shape:
            raise LengthMismatch("p_h and p_k differ in length")
        return cls(tuple(PValuePair(float(a), float(b)) for a, b in zip(p_h, p_k)),
                   structure)

    @property
    def m(self) -> int:
        return len(self.pairs)

    @property
    def p_h(self) -> np.ndarray:
        return np.array([p.p_h for p in self.pairs])

    @property
    def p_k(self) -> np.ndarray:
        return np.array([p.p_k for p in self.pairs])

    @property
    def complementary(self) -> bool:
        return all(p.complementary for p in self.pairs)

    def noncomplementary_indices(self) -> list:
        return [i for i, p in enumerate(self.pairs, 1) if not p.complementary]

    def feasible(self, j1, j2) -> bool:
        j1, j2 = frozenset(j1), frozenset(j2)
        if j1 & j2:
            raise PreconditionError("feasibility is only defined for disjoint J1, J2")
        return self.structure(j1, j2)

    @property
    def is_declared_free(self) -> bool:
        return isinstance(self.structure, FreeCombination)


def is_free_combination(family: HypothesisFamily) -> bool:
    """Exhaustively check that every truth pattern of the couples is feasible.

    For each subset ``P`` the intersection of ``h_i, i in P`` with
    ``k_j, j not in P`` must be non-empty. Costs ``2**M`` oracle calls.
    """
    m = family.m
    if m > MAX_FREE_COMBINATION_CHECK:
        raise SizeLimitExceeded(
            f"m={m} exceeds the exhaustive-check limit {MAX_FREE_COMBINATION_CHECK}")
    if family.is_declared_free:
        return True
    full = frozenset(range(1, m + 1))
    for r in range(m + 1):
        for p in itertools.combinations(range(1, m + 1), r):
            p = frozenset(p)
            if not family.feasible(p, full - p):
                return False
    return True


@dataclass(frozen=True)
class DecisionVector:
    decisions: tuple

    def __post_init__(self):
        object.__setattr__(self, "decisions", tuple(Decision(d) for d in self.decisions))

    def __len__(self):
        return len(self.decisions)

    def __iter__(self):
        return iter(self.decisions)

    def __getitem__(self, i):
        return self.decisions[i]

    @property
    def codes(self) -> np.ndarray:
        return np.array([int(d) for d in self.decisions], dtype=np.int8)

    def labels(self) -> list:
        return [d.name for d in self.decisions]


@dataclass(frozen=True)
class PartitionSets:
    """Index sets produced by a simultaneous test.

    ``u`` accepted hypotheses, ``u_bar`` rejected hypotheses, ``l`` rejected
    alternatives, ``l_bar`` accepted alternatives and ``g = u - l`` the
    uncertainty zone.
    """

    m: int
    u: frozenset
    u_bar: frozenset
    l: frozenset
    l_bar: frozenset
    g: frozenset = field(init=False)

    def __post_init__(self):
        full = frozenset(range(1, self.m + 1))
        for name in ("u", "u_bar", "l", "l_bar"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        if self.u | self.u_bar != full or self.u & self.u_bar:
            raise PreconditionError("u and u_bar must partition {1..m}")
        if self.l | self.l_bar != full or self.l & self.l_bar:
            raise PreconditionError("l and l_bar must partition {1..m}")
        object.__setattr__(self, "g", self.u - self.l)

    @classmethod
    def from_rejections(cls, m: int, rejected_h, rejected_k) -> "PartitionSets":
        full = frozenset(range(1, m + 1))
        u_bar, l = frozenset(rejected_h), frozenset(rejected_k)
        return cls(m, full - u_bar, u_bar, l, full - l)

    @property
    def inclusion_holds(self) -> bool:
        """Whether ``L`` is contained in ``U``."""
        return self.l <= self.u

    def to_decisions(self) -> DecisionVector:
        if not self.inclusion_holds:
            raise PreconditionError("L is not a subset of U; decisions are undefined")
        out = []
        for i in range(1, self.m + 1):
            if i in self.l:
                out.append(Decision.D1)
            elif i in self.u_bar:
                out.append(Decision.D2)
            else:
                out.append(Decision.D3)
        return DecisionVector(tuple(out))


def partition_from_decisions(d: DecisionVector) -> PartitionSets:
    l = {i for i, x in enumerate(d, 1) if x == Decision.D1}
    u_bar = {i for i, x in enumerate(d, 1) if x == Decision.D2}
    return PartitionSets.from_rejections(len(d), u_bar, l)


@dataclass(frozen=True)
class TruthAssignment:
    """Which member of each couple is true at the parameter point."""

    true_hypotheses: frozenset
    true_alternatives: frozenset

    def __post_init__(self):
        th = frozenset(self.true_hypotheses)
        ta = frozenset(self.true_alternatives)
        object.__setattr__(self, "true_hypotheses", th)
        object.__setattr__(self, "true_alternatives", ta)
        if th & ta:
            raise PreconditionError("an index cannot have both members true")
        full = th | ta
        if full != frozenset(range(1, len(full) + 1)):
            raise PreconditionError("truth assignment must partition {1..m}")

    @classmethod
    def from_mask(cls, h_true) -> "TruthAssignment":
        h_true = [bool(x) for x in h_true]
        return cls({i for i, t in enumerate(h_true, 1) if t},
                   {i for i, t in enumerate(h_true, 1) if not t})

    @property
    def m(self) -> int:
        return len(self.true_hypotheses) + len(self.true_alternatives)

    @property
    def h_mask(self) -> np.ndarray:
        return np.array([i in self.true_hypotheses for i in range(1, self.m + 1)])
