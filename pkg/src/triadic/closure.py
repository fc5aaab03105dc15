"""Closed testing over intersections of hypotheses and alternatives.

An intersection ``H(J1, J2)`` joins the hypotheses indexed by ``J1`` with the
alternatives indexed by ``J2``; ``J1`` and ``J2`` must be disjoint because
``h_i`` and ``k_i`` never hold together. Each intersection is tested locally
by a union-intersection test: reject when the smallest constituent p-value
is below ``alpha(|J1 | J2|)``. A single claim is rejected by the closure
when every non-empty intersection containing it is rejected.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    InternalInconsistency,
    InvalidThresholds,
    NotFreeCombination,
    PreconditionError,
    SizeLimitExceeded,
)
from .family import Decision, DecisionVector, HypothesisFamily, is_free_combination
from .normal import upper_critical_value
from .procedures import (
    DEFAULT_ALPHA,
    CalibrationKind,
    ThreeWayThresholds,
    classify,
    per_test_level,
)

MAX_ENUMERATION_M = 12
TIE_GUARD = 1e-9


@dataclass(frozen=True)
class IntersectionHypothesis:
    j1: frozenset
    j2: frozenset

    def __post_init__(self):
        j1, j2 = frozenset(self.j1), frozenset(self.j2)
        if j1 & j2:
            raise PreconditionError(f"J1 and J2 overlap on {sorted(j1 & j2)}")
        object.__setattr__(self, "j1", j1)
        object.__setattr__(self, "j2", j2)

    @property
    def size(self) -> int:
        return len(self.j1) + len(self.j2)

    def label(self) -> str:
        parts = [(i, f"h{i}") for i in self.j1] + [(j, f"k{j}") for j in self.j2]
        return "".join(s for _, s in sorted(parts))

    def contains(self, index: int, side: str) -> bool:
        return index in (self.j1 if side == "h" else self.j2)


class ScheduleKind(str, enum.Enum):
    BONFERRONI = "bonferroni"
    INDEPENDENT = "independent"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class LocalTestRule:
    """Level schedule ``k -> alpha(k)`` for intersections of size ``k``.

    ``table`` is required for ``ScheduleKind.EXPLICIT`` and lists
    ``alpha(1), alpha(2), ...``. The schedule must be non-increasing in ``k``;
    the reduction of the closure to a single-step rule relies on the
    smallest level being attained at the largest intersection.
    """

    kind: ScheduleKind = ScheduleKind.BONFERRONI
    alpha: float = DEFAULT_ALPHA
    table: tuple = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "kind", ScheduleKind(self.kind))
        if self.kind is ScheduleKind.EXPLICIT:
            if not self.table:
                raise InvalidThresholds("an explicit schedule needs a table")
            table = tuple(float(v) for v in self.table)
            if any(not (0.0 <= v <= 1.0) for v in table):
                raise InvalidThresholds("schedule values must lie in [0, 1]")
            if any(b > a for a, b in zip(table, table[1:])):
                raise InvalidThresholds("schedule must be non-increasing in size")
            object.__setattr__(self, "table", table)
        else:
            per_test_level(self.kind.value, self.alpha, 1)

    @classmethod
    def bonferroni(cls, alpha=DEFAULT_ALPHA):
        return cls(ScheduleKind.BONFERRONI, alpha)

    @classmethod
    def independent(cls, alpha=DEFAULT_ALPHA):
        return cls(ScheduleKind.INDEPENDENT, alpha)

    @classmethod
    def explicit(cls, table):
        return cls(ScheduleKind.EXPLICIT, table=tuple(table))

    def level(self, size: int) -> float:
        if size < 1:
            raise PreconditionError("intersection size must be >= 1")
        if self.kind is ScheduleKind.EXPLICIT:
            if size > len(self.table):
                raise SizeLimitExceeded(f"schedule table has no entry for size {size}")
            return self.table[size - 1]
        return per_test_level(self.kind.value, self.alpha, size)

    def thresholds(self, m: int) -> ThreeWayThresholds:
        """Single-step thresholds ``(alpha(m), 1 - alpha(m))``."""
        return ThreeWayThresholds.from_level(self.level(m))


def _check_enumeration_size(m):
    if m > MAX_ENUMERATION_M:
        raise SizeLimitExceeded(
            f"m={m} exceeds the enumeration limit {MAX_ENUMERATION_M} (3**m intersections)")


def enumerate_intersections(family: HypothesisFamily, containing=None) -> list:
    """All non-empty intersection hypotheses of ``family``.

    ``containing`` optionally restricts the result to intersections that
    include a given claim, written ``(index, "h")`` or ``(index, "k")``.
    """
    m = family.m
    _check_enumeration_size(m)
    out = []
    # each index is out (0), in J1 (1) or in J2 (2)
    for roles in itertools.product((0, 1, 2), repeat=m):
        j1 = frozenset(i for i, r in enumerate(roles, 1) if r == 1)
        j2 = frozenset(i for i, r in enumerate(roles, 1) if r == 2)
        if not j1 and not j2:
            continue
        h = IntersectionHypothesis(j1, j2)
        if containing is not None and not h.contains(*containing):
            continue
        if family.feasible(j1, j2):
            out.append(h)
    return out


def local_test(h: IntersectionHypothesis, family: HypothesisFamily,
               rule: LocalTestRule) -> bool:
    """Union-intersection test of one intersection; True means reject."""
    vals = [family.pairs[i - 1].p_h for i in h.j1] + [family.pairs[j - 1].p_k for j in h.j2]
    return min(vals) < rule.level(h.size)


@dataclass(frozen=True)
class _Layout:
    """Dense representation of a list of intersections over ``m`` couples."""

    m: int
    member: np.ndarray   # (K, 2m) bool: columns 0..m-1 hypotheses, m..2m-1 alternatives
    levels: np.ndarray   # (K,) local level of each intersection

    @classmethod
    def build(cls, intersections, m, rule):
        member = np.zeros((len(intersections), 2 * m), dtype=bool)
        for row, h in enumerate(intersections):
            member[row, [i - 1 for i in h.j1]] = True
            member[row, [m + j - 1 for j in h.j2]] = True
        levels = np.array([rule.level(h.size) for h in intersections])
        return cls(m, member, levels)


def _closure_codes(p_h, p_k, layout: _Layout, chunk: int = 512) -> np.ndarray:
    """Closed-test decision codes for a batch ``p_h, p_k`` of shape ``(T, m)``."""
    p_h = np.atleast_2d(np.asarray(p_h, dtype=float))
    p_k = np.atleast_2d(np.asarray(p_k, dtype=float))
    m = layout.m
    pv = np.concatenate([p_h, p_k], axis=1)
    member_i = layout.member.astype(np.int32)
    codes = np.empty(p_h.shape, dtype=np.int8)
    for s in range(0, pv.shape[0], chunk):
        block = pv[s:s + chunk]
        minp = np.where(layout.member[None, :, :], block[:, None, :], np.inf).min(axis=2)
        accepted = (~(minp < layout.levels[None, :])).astype(np.int32)
        # a claim is rejected when no intersection containing it was accepted
        n_acc = accepted @ member_i
        rej = n_acc == 0
        rej_h, rej_k = rej[:, :m], rej[:, m:]
        if np.any(rej_h & rej_k):
            t, i = np.argwhere(rej_h & rej_k)[0]
            raise InternalInconsistency(
                f"closure rejects both h{i + 1} and k{i + 1} (trial {s + t})")
        c = np.full(rej_h.shape, int(Decision.D3), dtype=np.int8)
        c[rej_k] = int(Decision.D1)
        c[rej_h] = int(Decision.D2)
        codes[s:s + chunk] = c
    return codes


def closed_test(family: HypothesisFamily, rule: LocalTestRule) -> DecisionVector:
    """Closure method: D2 when ``h_i`` is rejected, D1 when ``k_i`` is, else D3."""
    _check_enumeration_size(family.m)
    layout = _Layout.build(enumerate_intersections(family), family.m, rule)
    codes = _closure_codes(family.p_h[None, :], family.p_k[None, :], layout)[0]
    return DecisionVector(tuple(codes))


class ClosedTester:
    """Reusable batch closure for a fixed family structure and rule.

    Enumerates the intersections once; :meth:`decide` then runs the closed
    test on many p-value vectors at once.
    """

    def __init__(self, family: HypothesisFamily, rule: LocalTestRule):
        _check_enumeration_size(family.m)
        self.m = family.m
        self.rule = rule
        self.intersections = enumerate_intersections(family)
        self._layout = _Layout.build(self.intersections, self.m, rule)

    def decide(self, p_h, p_k=None) -> np.ndarray:
        p_h = np.atleast_2d(p_h)
        if p_k is None:
            p_k = 1.0 - p_h
        return _closure_codes(p_h, p_k, self._layout)


@dataclass
class EquivalenceReport:
    m: int
    trials: int
    schedule: str
    thresholds: ThreeWayThresholds
    mismatches: int
    first_counterexample: dict = None

    @property
    def ok(self) -> bool:
        return self.mismatches == 0

    def to_dict(self):
        return {
            "m": self.m,
            "trials": self.trials,
            "schedule": self.schedule,
            "thresholds": {"lower": self.thresholds.lower, "upper": self.thresholds.upper},
            "mismatches": self.mismatches,
            "first_counterexample": self.first_counterexample,
            "ok": self.ok,
        }


def _draw_away_from(rng, shape, cuts):
    """Uniform draws, resampling any value within TIE_GUARD of a cut point."""
    u = rng.random(shape)
    cuts = np.asarray(cuts)
    while True:
        bad = (np.abs(u[..., None] - cuts) < TIE_GUARD).any(axis=-1)
        if not bad.any():
            return u
        u[bad] = rng.random(int(bad.sum()))


def verify_theorem_equivalence(family: HypothesisFamily, rule: LocalTestRule,
                               trials: int = 10_000, seed: int = 0) -> EquivalenceReport:
    """Check that the closure agrees with the single-step rule at ``alpha(M)``.

    Only the structure and size of ``family`` are used; p-values are drawn
    as random complementary vectors.
    """
    if not is_free_combination(family):
        raise NotFreeCombination("equivalence holds only for freely combining couples")
    m = family.m
    level = rule.level(m)
    if not level < 0.5:
        raise InvalidThresholds(f"alpha(M)={level} must be below 1/2")
    thresholds = ThreeWayThresholds.from_level(level)
    tester = ClosedTester(family, rule)
    cuts = sorted({c for k in range(1, m + 1) for c in (rule.level(k), 1.0 - rule.level(k))})
    gen = np.random.default_rng(seed)
    p_h = _draw_away_from(gen, (int(trials), m), cuts)
    closure = tester.decide(p_h, 1.0 - p_h)
    single = classify(p_h, thresholds.lower, thresholds.upper)
    diff = np.flatnonzero((closure != single).any(axis=1))
    first = None
    if diff.size:
        t = int(diff[0])
        first = {
            "p_h": p_h[t].tolist(),
            "closure": [Decision(int(c)).name for c in closure[t]],
            "single_step": [Decision(int(c)).name for c in single[t]],
        }
    return EquivalenceReport(m, int(trials), rule.kind.value, thresholds, int(diff.size), first)


# --- ordered-threshold normal counterexample ---------------------------------

TEST_NAMES = ("h1", "k1", "h2", "k2")


def nested_closure_critical_values(alpha: float = DEFAULT_ALPHA) -> dict:
    """Standardised critical values of the closure procedure for the two
    nested one-sided couples ``h_i: theta >= theta_i``.

    ``h1`` and ``k2`` are tested at ``alpha/2``, ``k1`` and ``h2`` at ``alpha``:
    ``h1`` is rejected when ``sqrt(n)(xbar - theta1) < -c``, ``k1`` when
    ``sqrt(n)(xbar - theta1) > c`` and likewise for index 2.
    """
    per_test_level(CalibrationKind.BONFERRONI, alpha, 1)
    c_a, c_half = upper_critical_value(alpha), upper_critical_value(alpha / 2)
    return {"h1": c_half, "k1": c_a, "h2": c_a, "k2": c_half}


def nested_bonferroni_critical_values(alpha: float = DEFAULT_ALPHA) -> dict:
    per_test_level(CalibrationKind.BONFERRONI, alpha, 1)
    c_half = upper_critical_value(alpha / 2)
    return dict.fromkeys(TEST_NAMES, c_half)


def _check_nested(n, theta1, theta2):
    from .exceptions import InvalidOrdering

    if not theta1 < theta2:
        raise InvalidOrdering(f"need theta1 < theta2, got {theta1} >= {theta2}")
    if n < 1:
        raise PreconditionError("n must be >= 1")


def counterexample_codes(xbar, n: int, theta1: float, theta2: float,
                         alpha: float = DEFAULT_ALPHA) -> np.ndarray:
    """Vectorised :func:`counterexample_procedure`; shape ``xbar.shape + (2,)``."""
    _check_nested(n, theta1, theta2)
    crit = nested_closure_critical_values(alpha)
    xbar = np.asarray(xbar, dtype=float)
    z1 = np.sqrt(n) * (xbar - theta1)
    z2 = np.sqrt(n) * (xbar - theta2)
    out = np.full(xbar.shape + (2,), int(Decision.D3), dtype=np.int8)
    for col, z, ch, ck in ((0, z1, crit["h1"], crit["k1"]), (1, z2, crit["h2"], crit["k2"])):
        rej_h, rej_k = z < -ch, z > ck
        if np.any(rej_h & rej_k):
            raise InternalInconsistency("both members of a couple rejected")
        out[..., col][rej_k] = int(Decision.D1)
        out[..., col][rej_h] = int(Decision.D2)
    return out


def counterexample_procedure(xbar: float, n: int, theta1: float, theta2: float,
                             alpha: float = DEFAULT_ALPHA) -> DecisionVector:
    """Closure procedure for ``h_i: theta >= theta_i`` vs ``k_i: theta < theta_i``
    with ``theta1 < theta2``, from the sample mean of ``n`` unit-variance draws.
    """
    return DecisionVector(tuple(counterexample_codes(float(xbar), n, theta1, theta2, alpha)))


def nested_bonferroni_codes(xbar, n: int, theta1: float, theta2: float,
                            alpha: float = DEFAULT_ALPHA) -> np.ndarray:
    """Bonferroni decisions (level ``alpha/2`` per claim) on the nested
    one-sided p-values, shape ``xbar.shape + (2,)``."""
    from .models import NestedNormalModel, nested_pvalue_arrays

    _check_nested(n, theta1, theta2)
    model = NestedNormalModel(0.0, n, theta1, theta2)
    p_h, _ = nested_pvalue_arrays(model, xbar)
    level = per_test_level(CalibrationKind.BONFERRONI, alpha, 2)
    return classify(p_h, level, 1.0 - level)


@dataclass(frozen=True)
class Interval:
    """Interval on the standardised scale ``sqrt(n)(xbar - theta_index)``."""

    index: int
    test: str
    lo: float
    hi: float
    lo_closed: bool
    hi_closed: bool

    def __str__(self):
        return (f"{'[' if self.lo_closed else '('}{self.lo:.6f}, "
                f"{self.hi:.6f}{']' if self.hi_closed else ')'}")

    def to_dict(self):
        return {"index": self.index, "test": self.test, "lo": self.lo, "hi": self.hi,
                "lo_closed": self.lo_closed, "hi_closed": self.hi_closed}


def analytic_disagreement(alpha: float = DEFAULT_ALPHA) -> list:
    """Where the two rules differ, derived from their critical values.

    A test rejecting for ``z > c`` differs between critical values ``c < c'``
    on ``(c, c']``; one rejecting for ``z < -c`` differs on ``[-c', -c)``.
    """
    cl = nested_closure_critical_values(alpha)
    bf = nested_bonferroni_critical_values(alpha)
    out = []
    for name in TEST_NAMES:
        lo, hi = sorted((cl[name], bf[name]))
        if lo == hi:
            continue
        index = int(name[1])
        if name[0] == "k":
            out.append(Interval(index, name, lo, hi, False, True))
        else:
            out.append(Interval(index, name, -hi, -lo, True, False))
    return out


@dataclass
class DisagreementReport:
    alpha: float
    n: int
    theta1: float
    theta2: float
    closure_critical: dict
    bonferroni_critical: dict
    analytic: list
    observed: list
    grid: np.ndarray
    closure_codes: np.ndarray
    bonferroni_codes: np.ndarray

    @property
    def disagree(self) -> bool:
        return bool(self.observed)

    def segments(self) -> list:
        """Maximal grid runs over which both rules' decisions are constant."""
        keys = np.concatenate([self.closure_codes, self.bonferroni_codes], axis=1)
        change = np.flatnonzero((keys[1:] != keys[:-1]).any(axis=1)) + 1
        starts = np.concatenate([[0], change])
        stops = np.concatenate([change, [len(self.grid)]])
        out = []
        for s, e in zip(starts, stops):
            out.append({
                "xbar_from": float(self.grid[s]),
                "xbar_to": float(self.grid[e - 1]),
                "closure": [Decision(int(c)).name for c in self.closure_codes[s]],
                "bonferroni": [Decision(int(c)).name for c in self.bonferroni_codes[s]],
            })
        return out

    def to_dict(self, include_grid=False):
        d = {
            "alpha": self.alpha, "n": self.n, "theta1": self.theta1, "theta2": self.theta2,
            "closure_critical": self.closure_critical,
            "bonferroni_critical": self.bonferroni_critical,
            "analytic_intervals": [iv.to_dict() for iv in self.analytic],
            "observed_intervals": self.observed,
            "segments": self.segments(),
        }
        if include_grid:
            d["grid"] = self.grid.tolist()
            d["closure_codes"] = self.closure_codes.tolist()
            d["bonferroni_codes"] = self.bonferroni_codes.tolist()
        return d


def default_grid(n, theta1, theta2, alpha=DEFAULT_ALPHA, points=4001):
    pad = (upper_critical_value(alpha / 2) + 2.0) / np.sqrt(n)
    return np.linspace(theta1 - pad, theta2 + pad, points)


def counterexample_vs_bonferroni(xbar_grid=None, n: int = 1, theta1: float = 0.0,
                                 theta2: float = 10.0,
                                 alpha: float = DEFAULT_ALPHA) -> DisagreementReport:
    """Sweep sample means and locate where the closure and Bonferroni rules differ.

    Each disagreement run on the grid is refined by bisection, so the
    reported endpoints are accurate far beyond the grid spacing.
    """
    _check_nested(n, theta1, theta2)
    grid = default_grid(n, theta1, theta2, alpha) if xbar_grid is None else \
        np.sort(np.asarray(xbar_grid, dtype=float))
    cl = counterexample_codes(grid, n, theta1, theta2, alpha)
    bf = nested_bonferroni_codes(grid, n, theta1, theta2, alpha)
    thetas = (theta1, theta2)
    sqrt_n = np.sqrt(n)

    observed = []
    for col in range(2):
        def differs(x, col=col):
            a = counterexample_codes(np.array([x]), n, theta1, theta2, alpha)[0, col]
            b = nested_bonferroni_codes(np.array([x]), n, theta1, theta2, alpha)[0, col]
            return a != b

        mask = cl[:, col] != bf[:, col]
        if not mask.any():
            continue
        edges = np.flatnonzero(np.diff(mask.astype(np.int8)))
        starts = [0] if mask[0] else []
        starts += [e + 1 for e in edges if mask[e + 1]]
        for s in starts:
            e = s
            while e + 1 < len(mask) and mask[e + 1]:
                e += 1
            lo = grid[0] if s == 0 else _bisect_edge(differs, grid[s - 1], grid[s])
            hi = grid[-1] if e == len(mask) - 1 else _bisect_edge(differs, grid[e + 1], grid[e])
            observed.append({
                "index": col + 1,
                "xbar_lo": float(lo), "xbar_hi": float(hi),
                "z_lo": float(sqrt_n * (lo - thetas[col])),
                "z_hi": float(sqrt_n * (hi - thetas[col])),
                "closure": Decision(int(cl[s, col])).name,
                "bonferroni": Decision(int(bf[s, col])).name,
            })
    return DisagreementReport(
        alpha, n, theta1, theta2,
        nested_closure_critical_values(alpha), nested_bonferroni_critical_values(alpha),
        analytic_disagreement(alpha), observed, grid, cl, bf)


def _bisect_edge(inside, x_out, x_in, iters=200):
    """Boundary between a point where ``inside`` is False and one where it is True."""
    for _ in range(iters):
        mid = 0.5 * (x_out + x_in)
        if mid == x_out or mid == x_in:
            break
        if inside(mid):
            x_in = mid
        else:
            x_out = mid
    return 0.5 * (x_out + x_in)
