"""Single-step simultaneous tests of hypotheses and alternatives.

Rejection is always strict: a p-value equal to the threshold is accepted,
so the boundary value lands in the uncertainty zone.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    ComplementarityViolation,
    DegenerateFamily,
    InternalInconsistency,
    InvalidLevel,
    InvalidThresholds,
    LengthMismatch,
)
from .family import (
    Decision,
    DecisionVector,
    HypothesisFamily,
    PartitionSets,
    TruthAssignment,
)

DEFAULT_ALPHA = 0.05


class CalibrationKind(str, enum.Enum):
    BONFERRONI = "bonferroni"
    INDEPENDENT = "independent"


def _check_level(alpha):
    if not (0.0 < alpha < 1.0):
        raise InvalidLevel(f"alpha={alpha!r} is not in (0, 1)")


def per_test_level(kind, alpha: float, m: int) -> float:
    """Per-claim level ``alpha(m)``.

    ``alpha / m`` for Bonferroni, ``1 - (1 - alpha)**(1/m)`` when the
    hypothesis p-values are independent.
    """
    kind = CalibrationKind(kind)
    _check_level(alpha)
    if m < 1:
        raise DegenerateFamily(f"m={m}; a family needs at least one couple")
    if kind is CalibrationKind.BONFERRONI:
        return alpha / m
    # -expm1(log1p(-a)/m) keeps full precision for tiny levels
    return float(-np.expm1(np.log1p(-alpha) / m))


@dataclass(frozen=True)
class Calibration:
    kind: CalibrationKind
    alpha: float
    m: int

    def __post_init__(self):
        object.__setattr__(self, "kind", CalibrationKind(self.kind))
        per_test_level(self.kind, self.alpha, self.m)

    @property
    def value(self) -> float:
        return per_test_level(self.kind, self.alpha, self.m)

    @property
    def caveat(self):
        if self.kind is CalibrationKind.INDEPENDENT:
            return "independence of hypothesis p-values assumed"
        return None


@dataclass(frozen=True)
class ThreeWayThresholds:
    """Rejection thresholds ``lower = alpha(M)`` and ``upper = 1 - alpha(M)``."""

    lower: float
    upper: float

    def __post_init__(self):
        if abs(self.lower + self.upper - 1.0) > 1e-15:
            raise InvalidThresholds("lower + upper must equal 1")
        if not (0.0 <= self.lower < self.upper <= 1.0):
            raise InvalidThresholds(
                f"need 0 <= lower < upper <= 1, got ({self.lower}, {self.upper})")

    @classmethod
    def from_level(cls, level: float) -> "ThreeWayThresholds":
        return cls(level, 1.0 - level)


def calibrate(kind, alpha: float = DEFAULT_ALPHA, m: int = 1) -> ThreeWayThresholds:
    """Thresholds of the single-step three-decision rule.

    >>> calibrate("bonferroni", 0.05, 10)
    ThreeWayThresholds(lower=0.005, upper=0.995)
    """
    return ThreeWayThresholds.from_level(Calibration(kind, alpha, m).value)


def classify(p_h, lower: float, upper: float) -> np.ndarray:
    """Vectorised three-decision rule on complementary p-values.

    Returns integer codes (1, 2, 3) for (D1, D2, D3) with the same shape as
    ``p_h``.
    """
    p_h = np.asarray(p_h, dtype=float)
    out = np.full(p_h.shape, int(Decision.D3), dtype=np.int8)
    out[p_h > upper] = int(Decision.D1)
    out[p_h < lower] = int(Decision.D2)
    return out


def classify_pairs(p_h, p_k, lower: float) -> np.ndarray:
    """Three-decision rule testing ``p_h`` and ``p_k`` separately at ``lower``.

    Used for non-complementary pairs; raises if both members of a couple
    would be rejected.
    """
    p_h = np.asarray(p_h, dtype=float)
    p_k = np.asarray(p_k, dtype=float)
    rej_h = p_h < lower
    rej_k = p_k < lower
    if np.any(rej_h & rej_k):
        raise InternalInconsistency("both hypothesis and alternative rejected")
    out = np.full(p_h.shape, int(Decision.D3), dtype=np.int8)
    out[rej_k] = int(Decision.D1)
    out[rej_h] = int(Decision.D2)
    return out


def _require_complementary(family, override):
    if override or family.complementary:
        return
    rows = family.noncomplementary_indices()
    raise ComplementarityViolation(
        f"p_h + p_k != 1 for indices {rows}; pass override=True to test "
        "hypotheses and alternatives separately", rows)


def single_step(family: HypothesisFamily, thresholds: ThreeWayThresholds,
                override: bool = False) -> DecisionVector:
    """Apply the single-step three-decision rule to every couple.

    With ``override=True`` non-complementary pairs are accepted and the
    alternative is rejected when ``p_k < lower``.
    """
    _require_complementary(family, override)
    if family.complementary:
        codes = classify(family.p_h, thresholds.lower, thresholds.upper)
    else:
        codes = classify_pairs(family.p_h, family.p_k, thresholds.lower)
    return DecisionVector(tuple(codes))


def bauer_bonferroni(family: HypothesisFamily, alpha: float = DEFAULT_ALPHA,
                     override: bool = False) -> PartitionSets:
    """Bonferroni procedure for hypotheses and alternatives at level ``alpha/M``.

    Returns the rejected-hypothesis set ``u_bar = {p_h < alpha/M}`` and the
    rejected-alternative set ``l = {p_h > 1 - alpha/M}`` (or ``p_k < alpha/M``
    for non-complementary pairs under ``override``).
    """
    _require_complementary(family, override)
    level = per_test_level(CalibrationKind.BONFERRONI, alpha, family.m)
    p_h = family.p_h
    rej_h = p_h < level
    if family.complementary:
        rej_k = p_h > 1.0 - level
    else:
        rej_k = family.p_k < level
    idx = np.arange(1, family.m + 1)
    return PartitionSets.from_rejections(family.m, idx[rej_h].tolist(),
                                         idx[rej_k].tolist())


def fwer_violation(d: DecisionVector, truth: TruthAssignment) -> bool:
    """True iff some true hypothesis is rejected (D2) or some true
    alternative is rejected (D1)."""
    if len(d) != truth.m:
        raise LengthMismatch(f"{len(d)} decisions for {truth.m} couples")
    return (any(d[i - 1] == Decision.D2 for i in truth.true_hypotheses)
            or any(d[i - 1] == Decision.D1 for i in truth.true_alternatives))


def fwer_violation_codes(codes, h_true) -> np.ndarray:
    """Vectorised :func:`fwer_violation` over the last axis of ``codes``."""
    codes = np.asarray(codes)
    h_true = np.asarray(h_true, dtype=bool)
    err = np.where(h_true, codes == Decision.D2, codes == Decision.D1)
    return err.any(axis=-1)
