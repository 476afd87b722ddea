"""Entropy, Markov stationary distributions and KDE mutual information."""

from __future__ import annotations

import math
import warnings

import numpy as np

from ..errors import (
    DegenerateData,
    LengthMismatch,
    NonConvergedWarning,
    NotADistribution,
    NotStochastic,
    TooFewSamples,
)
from .kde import kde_fit

MI_MIN_SAMPLES = 16


def shannon_entropy(p) -> float:
    """Shannon entropy in bits, with 0 * log 0 taken as 0."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0 or np.any(p < 0) or not np.all(np.isfinite(p)):
        raise NotADistribution("probabilities must be a non-empty vector of values >= 0")
    if abs(p.sum() - 1.0) > 1e-9:
        raise NotADistribution(f"probabilities sum to {p.sum()!r}, not 1")
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz))) + 0.0


def _check_stochastic(P) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] == 0:
        raise NotStochastic("transition matrix must be square and non-empty")
    if np.any(P < 0) or not np.all(np.isfinite(P)):
        raise NotStochastic("transition matrix has negative or non-finite entries")
    if np.any(np.abs(P.sum(axis=1) - 1.0) > 1e-9):
        raise NotStochastic("rows must sum to 1")
    return P


def stationary_distribution(P, tol: float = 1e-12, max_iter: int = 10_000) -> np.ndarray:
    """Stationary distribution of a row-stochastic matrix by power iteration.

    Iterates the lazy chain ``(P + I) / 2`` from the uniform distribution.
    The lazy chain has the same stationary distributions as ``P`` but is
    aperiodic, so alternating chains (common for object-to-object gaze
    transitions) still converge. Emits :class:`NonConvergedWarning` and
    returns the last iterate if ``max_iter`` is reached.
    """
    P = _check_stochastic(P)
    k = P.shape[0]
    lazy = 0.5 * (P + np.eye(k))
    pi = np.full(k, 1.0 / k)
    for _ in range(max_iter):
        nxt = pi @ lazy
        nxt /= nxt.sum()
        if np.abs(nxt - pi).sum() < tol:
            return nxt
        pi = nxt
    warnings.warn(f"power iteration did not converge in {max_iter} steps", NonConvergedWarning)
    return pi


def _precedes(a: np.ndarray, b: np.ndarray) -> bool:
    diff = np.flatnonzero(a != b)
    return diff.size == 0 or a[diff[0]] < b[diff[0]]


def mutual_information(xs, ys) -> float:
    """Resubstitution KDE estimate of I(X; Y) in bits.

    Averages ``log2(f_xy / (f_x * f_y))`` over the observed pairs, with all
    three densities from :func:`kde_fit`. The estimate can dip slightly below
    zero for independent data and is returned unclipped. A zero-variance
    input carries no information and yields exactly 0.

    Raises:
        LengthMismatch: series of different lengths.
        TooFewSamples: fewer than 16 pairs.
        DegenerateData: the pairs lie exactly on a line (unbounded MI).
    """
    x = np.asarray(xs, dtype=float).ravel()
    y = np.asarray(ys, dtype=float).ravel()
    if x.size != y.size:
        raise LengthMismatch(f"series lengths differ: {x.size} vs {y.size}")
    if x.size < MI_MIN_SAMPLES:
        raise TooFewSamples(f"need at least {MI_MIN_SAMPLES} pairs, got {x.size}")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        return 0.0
    # canonical argument order makes the estimate exactly symmetric
    if not _precedes(x, y):
        x, y = y, x
    pairs = np.column_stack([x, y])
    try:
        log_joint = kde_fit(pairs).logpdf(pairs)
    except DegenerateData:
        raise DegenerateData("pairs are collinear; mutual information is unbounded") from None
    log_marg = kde_fit(x).logpdf(x) + kde_fit(y).logpdf(y)
    return float(np.mean(log_joint - log_marg)) / math.log(2.0)
