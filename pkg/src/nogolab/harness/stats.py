"""Pearson chi-square tests and Monte-Carlo error helpers."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.stats import chi2

from ..errors import SparseBins

MIN_EXPECTED = 5.0


def chi_square(observed: Sequence[float], expected: Sequence[float], total: int) -> tuple[float, float]:
    """Goodness of fit of `observed` counts against probabilities `expected`."""
    obs = np.asarray(observed, dtype=float)
    probs = np.asarray(expected, dtype=float)
    if obs.shape != probs.shape:
        raise ValueError("observed and expected have different lengths")
    if abs(probs.sum() - 1.0) > 1e-9:
        raise ValueError("expected probabilities must sum to 1")
    exp = probs * total
    if np.any(exp < MIN_EXPECTED):
        raise SparseBins(f"smallest expected count {exp.min():.3g} is below {MIN_EXPECTED}")
    stat = float(np.sum((obs - exp) ** 2 / exp))
    return stat, float(chi2.sf(stat, obs.size - 1))


def chi_square_homogeneity(a: Sequence[float], b: Sequence[float]) -> tuple[float, float]:
    """Two-sample test that count vectors `a` and `b` share one distribution."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na, nb = a.sum(), b.sum()
    pooled = a + b
    keep = pooled > 0
    ea = pooled[keep] * na / (na + nb)
    eb = pooled[keep] * nb / (na + nb)
    if np.any(ea < MIN_EXPECTED) or np.any(eb < MIN_EXPECTED):
        raise SparseBins("expected count below 5 in the two-sample table")
    stat = float(np.sum((a[keep] - ea) ** 2 / ea) + np.sum((b[keep] - eb) ** 2 / eb))
    return stat, float(chi2.sf(stat, int(keep.sum()) - 1))


def standard_error(samples: Sequence[float]) -> float:
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        return 0.0
    return float(x.std(ddof=1) / math.sqrt(x.size))


def binomial_sigma(p: float, trials: int) -> float:
    return math.sqrt(p * (1 - p) / trials)
