"""Loss, risk and Monte Carlo estimation of FWER and the uncertainty zone.

Per-couple loss for the three decisions:

============  =====  =======  =====
truth         D1     D2       D3
============  =====  =======  =====
``h_i`` true  0      a + l    l
``k_i`` true  c + b  0        b
============  =====  =======  =====

With ``a = c``, ``b = l`` the total loss of one replicate splits as
``(a + b) * (#directional errors) + b * |G|``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .closure import ClosedTester, LocalTestRule, counterexample_codes
from .exceptions import ConfigError, IdentityModeRequired, LengthMismatch, PreconditionError
from .family import Decision, DecisionVector, HypothesisFamily, TruthAssignment
from .models import (
    GaussianMeansModel,
    NestedNormalModel,
    gaussian_means_pvalue_arrays,
    nested_pvalue_arrays,
    simulate_sample_means_batch,
)
from .procedures import DEFAULT_ALPHA, CalibrationKind, calibrate, classify

NORMALISATION_TOL = 1e-12


@dataclass(frozen=True)
class LossSpec:
    a: float = 0.5
    b: float = 0.5
    c: float = 0.5
    l: float = 0.5

    def __post_init__(self):
        for name in ("a", "b", "c", "l"):
            v = float(getattr(self, name))
            if not (v >= 0.0 and math.isfinite(v)):
                raise PreconditionError(f"loss {name}={v!r} must be non-negative")
            object.__setattr__(self, name, v)

    @classmethod
    def identity(cls, b: float) -> "LossSpec":
        """Symmetric loss with ``a = c = 1 - b`` and ``b = l``."""
        a = 1.0 - b
        return cls(a, b, a, b)

    @property
    def identity_mode(self) -> bool:
        return (self.a == self.c and self.b == self.l
                and abs(self.a + self.b - 1.0) <= NORMALISATION_TOL)

    def cell(self, h_true: bool, d) -> float:
        d = Decision(d)
        if h_true:
            return (0.0, self.a + self.l, self.l)[d - 1]
        return (self.c + self.b, 0.0, self.b)[d - 1]

    def cell_exact(self, h_true: bool, d) -> Fraction:
        a, b, c, l = (Fraction(v) for v in (self.a, self.b, self.c, self.l))
        d = Decision(d)
        if h_true:
            return (Fraction(0), a + l, l)[d - 1]
        return (c + b, Fraction(0), b)[d - 1]


def loss(truth: TruthAssignment, d: DecisionVector, spec: LossSpec, exact: bool = False):
    """Additive loss of a decision vector.

    With ``exact=True`` the sum is carried out in rational arithmetic and a
    :class:`fractions.Fraction` is returned.
    """
    if len(d) != truth.m:
        raise LengthMismatch(f"{len(d)} decisions for {truth.m} couples")
    mask = truth.h_mask
    if exact:
        return sum((spec.cell_exact(bool(h), x) for h, x in zip(mask, d)), Fraction(0))
    return math.fsum(spec.cell(bool(h), x) for h, x in zip(mask, d))


def _counts(h_true, codes):
    """Per-replicate counts (d2 under h, d3 under h, d1 under k, d3 under k)."""
    codes = np.atleast_2d(codes)
    h = np.broadcast_to(np.asarray(h_true, dtype=bool), codes.shape)
    k = ~h
    return (((codes == Decision.D2) & h).sum(axis=1),
            ((codes == Decision.D3) & h).sum(axis=1),
            ((codes == Decision.D1) & k).sum(axis=1),
            ((codes == Decision.D3) & k).sum(axis=1))


def three_term_exact(truth: TruthAssignment, d: DecisionVector, spec: LossSpec) -> Fraction:
    """``(a + b) * directional + b * |G|`` in rational arithmetic."""
    n_h2, n_h3, n_k1, n_k3 = (int(x[0]) for x in _counts(truth.h_mask, d.codes))
    a, b = Fraction(spec.a), Fraction(spec.b)
    return (a + b) * (n_h2 + n_k1) + b * (n_h3 + n_k3)


def decomposition_check(replicates, spec: LossSpec) -> bool:
    """Exact per-replicate check of the three-term loss decomposition.

    ``replicates`` is an iterable of ``(TruthAssignment, DecisionVector)``.
    Returns True iff the cell-by-cell loss equals the three-term form in
    exact arithmetic for every replicate.
    """
    if not spec.identity_mode:
        raise IdentityModeRequired("decomposition needs a = c, b = l and a + b = 1")
    for truth, d in replicates:
        if loss(truth, d, spec, exact=True) != three_term_exact(truth, d, spec):
            return False
    return True


# --- Monte Carlo ---------------------------------------------------------------

PROCEDURES = ("single_step", "bauer_bonferroni", "closure", "counterexample")


@dataclass(frozen=True)
class ProcedureSpec:
    """Which procedure a simulation applies.

    ``kind`` is one of ``single_step`` (with ``calibration``),
    ``bauer_bonferroni``, ``closure`` (closed test with a Bonferroni or
    independence schedule) or ``counterexample`` (the closure rule for the
    nested normal model).
    """

    kind: str = "single_step"
    alpha: float = DEFAULT_ALPHA
    calibration: CalibrationKind = CalibrationKind.BONFERRONI

    def __post_init__(self):
        if self.kind not in PROCEDURES:
            raise ConfigError(f"unknown procedure {self.kind!r}; choose from {PROCEDURES}")
        object.__setattr__(self, "calibration", CalibrationKind(self.calibration))

    def decider(self, model):
        """Function mapping a block of sample means to decision codes."""
        m = model.m
        if isinstance(model, NestedNormalModel):
            def pvalues(xbar):
                return nested_pvalue_arrays(model, xbar[:, 0])
            structure = model.oracle()
        elif isinstance(model, GaussianMeansModel):
            def pvalues(xbar):
                return gaussian_means_pvalue_arrays(model, xbar)
            structure = None
        else:
            raise ConfigError(f"unsupported model {type(model).__name__}")

        if self.kind == "counterexample":
            if not isinstance(model, NestedNormalModel):
                raise ConfigError("the counterexample procedure needs a NestedNormalModel")
            return lambda xbar: counterexample_codes(
                xbar[:, 0], model.n, model.theta1, model.theta2, self.alpha)
        if self.kind == "closure":
            rule = LocalTestRule(self.calibration.value, self.alpha)
            fam = HypothesisFamily.from_p_h([0.5] * m) if structure is None else \
                HypothesisFamily.from_p_h([0.5] * m, structure)
            tester = ClosedTester(fam, rule)
            return lambda xbar: tester.decide(*pvalues(xbar))
        kind = CalibrationKind.BONFERRONI if self.kind == "bauer_bonferroni" else self.calibration
        th = calibrate(kind, self.alpha, m)
        return lambda xbar: classify(pvalues(xbar)[0], th.lower, th.upper)

    def caveats(self):
        out = []
        if self.calibration is CalibrationKind.INDEPENDENT and self.kind in ("single_step", "closure"):
            out.append("independence of hypothesis p-values assumed")
        return out


@dataclass
class RiskReport:
    directional_h: float
    directional_k: float
    expected_g: float
    risk: float
    fwer: float
    replicates: int
    std_errors: dict
    decomposition_residual: float = None
    h_true: list = field(default_factory=list)
    loss: LossSpec = None
    procedure: dict = field(default_factory=dict)
    model: dict = field(default_factory=dict)
    seed: int = None
    caveats: list = field(default_factory=list)

    def fwer_within(self, alpha, k_se=3.0) -> bool:
        """``fwer <= alpha + k_se * SE`` with the binomial SE at ``alpha``."""
        return self.fwer <= alpha + k_se * math.sqrt(alpha * (1 - alpha) / self.replicates)

    def to_dict(self):
        return {
            "model": self.model,
            "procedure": self.procedure,
            "loss": None if self.loss is None else
            {"a": self.loss.a, "b": self.loss.b, "c": self.loss.c, "l": self.loss.l},
            "seed": self.seed,
            "replicates": self.replicates,
            "h_true": self.h_true,
            "fwer": self.fwer,
            "directional_h": self.directional_h,
            "directional_k": self.directional_k,
            "expected_g": self.expected_g,
            "risk": self.risk,
            "std_errors": self.std_errors,
            "decomposition_residual": self.decomposition_residual,
            "caveats": self.caveats,
        }


def _mean_se(x):
    x = np.asarray(x, dtype=float)
    mean = math.fsum(x) / len(x)
    if len(x) < 2:
        return mean, 0.0
    var = math.fsum((x - mean) ** 2) / (len(x) - 1)
    return mean, math.sqrt(var / len(x))


def monte_carlo_risk(model, procedure: ProcedureSpec = None, spec: LossSpec = None,
                     replicates: int = 10_000, seed: int = 0, workers: int = 1,
                     chunk_size: int = 8192) -> RiskReport:
    """Estimate FWER, directional error rates, ``E|G|`` and risk by simulation.

    Replicates are split into chunks that may run on ``workers`` threads;
    the result is bit-identical for every chunking because each replicate's
    variates are addressed by its index and the accumulation runs over the
    concatenated per-replicate values in replicate order.
    """
    procedure = procedure or ProcedureSpec()
    spec = spec or LossSpec()
    replicates = int(replicates)
    if replicates < 1:
        raise PreconditionError("replicates must be >= 1")
    decide = procedure.decider(model)
    h_true = np.asarray(model.h_true, dtype=bool)

    def run(bounds):
        start, stop = bounds
        xbar = simulate_sample_means_batch(model, seed, start, stop)
        return decide(xbar)

    bounds = [(s, min(s + chunk_size, replicates)) for s in range(0, replicates, chunk_size)]
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(run, bounds))
    else:
        parts = [run(b) for b in bounds]
    codes = np.concatenate(parts, axis=0)

    n_h2, n_h3, n_k1, n_k3 = _counts(h_true, codes)
    fwer_ind = (n_h2 + n_k1) > 0
    g = n_h3 + n_k3
    w = ((spec.a + spec.l) * n_h2 + spec.l * n_h3
         + (spec.c + spec.b) * n_k1 + spec.b * n_k3)

    fwer, fwer_se = _mean_se(fwer_ind)
    dh, dh_se = _mean_se(n_h2)
    dk, dk_se = _mean_se(n_k1)
    eg, eg_se = _mean_se(g)
    risk, risk_se = _mean_se(w)

    residual = None
    if spec.identity_mode:
        a, b, c, l = (Fraction(v) for v in (spec.a, spec.b, spec.c, spec.l))
        s_h2, s_h3, s_k1, s_k3 = (int(x.sum()) for x in (n_h2, n_h3, n_k1, n_k3))
        total = (a + l) * s_h2 + l * s_h3 + (c + b) * s_k1 + b * s_k3
        three = (a + b) * (s_h2 + s_k1) + b * (s_h3 + s_k3)
        residual = float(abs(total - three) / replicates)

    return RiskReport(
        directional_h=dh, directional_k=dk, expected_g=eg, risk=risk, fwer=fwer,
        replicates=replicates,
        std_errors={"fwer": fwer_se, "directional_h": dh_se, "directional_k": dk_se,
                    "expected_g": eg_se, "risk": risk_se},
        decomposition_residual=residual,
        h_true=h_true.tolist(), loss=spec,
        procedure={"kind": procedure.kind, "alpha": procedure.alpha,
                   "calibration": procedure.calibration.value},
        model=_describe(model), seed=seed, caveats=procedure.caveats(),
    )


def _describe(model):
    if isinstance(model, GaussianMeansModel):
        return {"type": "gaussian_means", "theta": list(model.theta), "n": model.n,
                "null_boundary": list(model.null_boundary)}
    return {"type": "nested_normal", "theta": model.theta, "n": model.n,
            "theta1": model.theta1, "theta2": model.theta2}
