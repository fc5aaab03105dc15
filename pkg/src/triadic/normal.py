"""Standard normal CDF and quantile.

Thin wrappers over :func:`scipy.special.ndtr` / :func:`scipy.special.ndtri`
that add domain checking and the upper critical value helper used by the
one-sided tests.
"""
import numpy as np
from scipy import special

from .exceptions import DomainError


def std_normal_cdf(z):
    """Phi(z). Accepts scalars or arrays."""
    out = special.ndtr(np.asarray(z, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def std_normal_sf(z):
    """1 - Phi(z), computed without cancellation in the upper tail."""
    out = special.ndtr(-np.asarray(z, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def std_normal_quantile(p):
    """Inverse of :func:`std_normal_cdf` on the open interval (0, 1)."""
    p = np.asarray(p, dtype=float)
    if np.any(~((p > 0.0) & (p < 1.0))):
        raise DomainError("normal quantile is defined only for 0 < p < 1")
    out = special.ndtri(p)
    return float(out) if np.ndim(out) == 0 else out


def upper_critical_value(a):
    """``c_a`` with ``P(Z > c_a) = a``; e.g. ``c_0.05 = 1.6449``."""
    q = std_normal_quantile(a)
    return -q
