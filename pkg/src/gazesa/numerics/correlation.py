"""Pearson, Spearman and Kendall tau-b correlation with two-sided p-values.

Pearson and Spearman p-values come from the t statistic
``r * sqrt((n - 2) / (1 - r**2))`` on ``n - 2`` degrees of freedom. Kendall's
p-value uses the normal approximation with the tie-corrected variance.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..errors import ConstantSeries, LengthMismatch, TooFewSamples
from .special import normal_two_sided, student_t_two_sided


@dataclass(frozen=True)
class CorrelationResult:
    coefficient: float
    p_value: float
    n: int

    def to_dict(self) -> dict:
        return {"cc": self.coefficient, "p": self.p_value}


def _pair(xs, ys) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(xs, dtype=float).ravel()
    y = np.asarray(ys, dtype=float).ravel()
    if x.size != y.size:
        raise LengthMismatch(f"series lengths differ: {x.size} vs {y.size}")
    if x.size < 3:
        raise TooFewSamples(f"need at least 3 pairs, got {x.size}")
    return x, y


def _t_pvalue(r: float, n: int) -> float:
    if abs(r) >= 1.0:
        return 0.0
    df = n - 2
    return student_t_two_sided(r * math.sqrt(df / (1.0 - r * r)), df)


def _pearson_r(x: np.ndarray, y: np.ndarray) -> float:
    dx = x - x.mean()
    dy = y - y.mean()
    mx, my = float(np.max(np.abs(dx))), float(np.max(np.abs(dy)))
    if mx == 0.0 or my == 0.0:
        raise ConstantSeries("correlation undefined for a constant series")
    # rescale so squaring cannot underflow or overflow
    dx, dy = dx / mx, dy / my
    sxx = float(np.sum(dx * dx))
    syy = float(np.sum(dy * dy))
    r = float(np.sum(dx * dy)) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def pearson(xs, ys) -> CorrelationResult:
    x, y = _pair(xs, ys)
    r = _pearson_r(x, y)
    return CorrelationResult(r, _t_pvalue(r, x.size), x.size)


def rankdata(values) -> np.ndarray:
    """1-based ranks with tied values sharing their mean rank."""
    v = np.asarray(values, dtype=float).ravel()
    order = np.argsort(v, kind="mergesort")
    ranks = np.empty(v.size)
    sorted_v = v[order]
    i = 0
    while i < v.size:
        j = i
        while j + 1 < v.size and sorted_v[j + 1] == sorted_v[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(xs, ys) -> CorrelationResult:
    x, y = _pair(xs, ys)
    return pearson(rankdata(x), rankdata(y))


@functools.lru_cache(maxsize=64)
def _upper_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n, k=1)


def _tie_sums(v: np.ndarray) -> tuple[int, int, int, int]:
    _, counts = np.unique(v, return_counts=True)
    t = [int(c) for c in counts if c > 1]
    pairs = sum(c * (c - 1) // 2 for c in t)
    v2 = sum(c * (c - 1) * (2 * c + 5) for c in t)
    v1 = sum(c * (c - 1) for c in t)
    v3 = sum(c * (c - 1) * (c - 2) for c in t)
    return pairs, v2, v1, v3


def kendall(xs, ys) -> CorrelationResult:
    """Kendall's tau-b."""
    x, y = _pair(xs, ys)
    n = x.size
    iu, ju = _upper_pairs(n)
    sx = np.sign(x[ju] - x[iu])
    sy = np.sign(y[ju] - y[iu])
    prod = sx * sy
    concordant = int(np.count_nonzero(prod > 0))
    discordant = int(np.count_nonzero(prod < 0))
    n0 = n * (n - 1) // 2
    ties_x, vt, t1, t2 = _tie_sums(x) if np.any(sx == 0) else (0, 0, 0, 0)
    ties_y, vu, u1, u2 = _tie_sums(y) if np.any(sy == 0) else (0, 0, 0, 0)
    if ties_x == n0 or ties_y == n0:
        raise ConstantSeries("correlation undefined for a constant series")
    s = concordant - discordant
    tau = s / math.sqrt((n0 - ties_x) * (n0 - ties_y))
    tau = max(-1.0, min(1.0, tau))

    var = (n * (n - 1) * (2 * n + 5) - vt - vu) / 18.0
    var += t1 * u1 / (2.0 * n * (n - 1))
    if n > 2:
        var += t2 * u2 / (9.0 * n * (n - 1) * (n - 2))
    p = normal_two_sided(s / math.sqrt(var)) if var > 0 else 1.0
    return CorrelationResult(tau, p, n)


def permutation_pvalue(
    method: Callable[[np.ndarray, np.ndarray], CorrelationResult],
    xs,
    ys,
    n_perm: int,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """Two-sided permutation p-value: shuffle ``ys`` and count coefficients at
    least as extreme as the observed one."""
    x, y = _pair(xs, ys)
    rng = rng if rng is not None else np.random.default_rng(0)
    observed = abs(method(x, y).coefficient)
    hits = 0
    for _ in range(n_perm):
        if abs(method(x, rng.permutation(y)).coefficient) >= observed - 1e-12:
            hits += 1
    return (hits + 1) / (n_perm + 1)
