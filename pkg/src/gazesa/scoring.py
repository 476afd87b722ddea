"""Situation-awareness scores from a gaze trace.

Per trial:

* perception (``sa_l1``): share of gaze points covered by perception events,
  i.e. event count / total points times mean event length;
* comprehension (``sa_l2``): event lengths weighted by the standard normal
  pdf of their z-score, over total points;
* projection components (``sa_l3_dir``, ``sa_l3_spd``): lag-1 mutual
  information of the signed-sine turn series and of the log-scaled
  step-length change series.

Across a batch, ``sa_l3`` is the first principal component of the two
projection components and ``sa_overall`` the first principal component of
``(sa_l1, sa_l2, sa_l3)``. Both PCA scores are relative to the batch they
were fitted on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateData, EmptyTrace, TooFewRows, TooFewTrials, TooShort
from .model import GazeTrace
from .numerics import mutual_information, pca_first_component
from .numerics.pca import PcaModel
from .segmentation import SegmentationResult, event_lengths, segment_runs

PHI_0 = 1.0 / math.sqrt(2.0 * math.pi)
ZERO_DELTA_EPS = 1e-12
MIN_SERIES = 17  # 16 lag-1 pairs

SCORE_COLUMNS = ("trial_id", "sa_l1", "sa_l2", "sa_l3_dir", "sa_l3_spd", "sa_l3", "sa_overall")


def _phi(z):
    return PHI_0 * np.exp(-0.5 * np.square(z))


def length_stats(lengths: Sequence[float]) -> tuple[float, float]:
    """Mean and population standard deviation of event lengths."""
    arr = np.asarray(lengths, dtype=float)
    if arr.size == 0:
        return 0.0, 0.0
    mu = float(arr.mean())
    return mu, float(np.sqrt(np.mean((arr - mu) ** 2)))


def sa_l1(seg: SegmentationResult) -> float:
    if seg.m_total == 0:
        raise EmptyTrace("trace has no samples")
    lengths = event_lengths(seg)
    if not lengths:
        return 0.0
    return (len(lengths) / seg.m_total) * (sum(lengths) / len(lengths))


def sa_l2(seg: SegmentationResult, stats: Optional[tuple[float, float]] = None) -> float:
    """Comprehension score.

    Args:
        seg: segmentation of one trace.
        stats: ``(mean, std)`` used to z-score event lengths. Defaults to the
            trial's own event-length statistics; pass pooled statistics to
            standardize against a whole batch.
    """
    if seg.m_total == 0:
        raise EmptyTrace("trace has no samples")
    lengths = np.asarray(event_lengths(seg), dtype=float)
    if lengths.size == 0:
        return 0.0
    mu, sigma = stats if stats is not None else length_stats(lengths)
    z = (lengths - mu) / sigma if sigma > 0 else np.zeros_like(lengths)
    return float(np.sum(lengths * _phi(z))) / seg.m_total


@dataclass(frozen=True, eq=False)
class MotionDeltaSeries:
    dir: np.ndarray
    spd: np.ndarray
    dropped_zero_vectors: int = 0
    dropped_zero_deltas: int = 0


def deltas_from_positions(points) -> MotionDeltaSeries:
    """Turn and step-length change series for an ordered point sequence.

    Each step vector joins consecutive points; zero-length steps are dropped
    before pairing. For every pair of adjacent steps the turn is the signed
    sine of the angle between them (positive for counter-clockwise) and the
    speed change is ``-sign(d) * log10(|d|)`` with ``d`` the change in step
    length. Pairs with ``|d| < 1e-12`` have no speed entry.
    """
    P = np.asarray(points, dtype=float).reshape(-1, 2)
    V = np.diff(P, axis=0)
    norms = np.hypot(V[:, 0], V[:, 1])
    keep = norms > 0
    dropped_vectors = int(np.count_nonzero(~keep))
    V, norms = V[keep], norms[keep]
    if len(V) < 2:
        return MotionDeltaSeries(np.zeros(0), np.zeros(0), dropped_vectors, 0)

    a, b = V[:-1], V[1:]
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    direction = np.clip(cross / (norms[:-1] * norms[1:]), -1.0, 1.0)

    dl = norms[1:] - norms[:-1]
    nonzero = np.abs(dl) >= ZERO_DELTA_EPS
    dl = dl[nonzero]
    speed = -np.sign(dl) * np.log10(np.abs(dl))
    return MotionDeltaSeries(direction, speed, dropped_vectors, int(np.count_nonzero(~nonzero)))


def motion_deltas(trace: GazeTrace) -> MotionDeltaSeries:
    if len(trace) < 4:
        raise TooShort(f"need at least 4 gaze samples, got {len(trace)}")
    return deltas_from_positions(trace.positions)


def lag1_information(series) -> float:
    s = np.asarray(series, dtype=float)
    if s.size < MIN_SERIES:
        return 0.0
    try:
        return mutual_information(s[:-1], s[1:])
    except DegenerateData:
        return 0.0


def sa_l3_components(deltas: MotionDeltaSeries) -> tuple[float, float]:
    return lag1_information(deltas.dir), lag1_information(deltas.spd)


def _batch_pca(matrix, width: int) -> tuple[PcaModel, np.ndarray]:
    X = np.asarray(matrix, dtype=float).reshape(-1, width)
    try:
        return pca_first_component(X)
    except TooFewRows as exc:
        raise TooFewTrials(f"batch PCA needs at least 2 trials: {exc}") from None


def sa_l3_batch(components) -> tuple[PcaModel, np.ndarray]:
    """First-PC projection scores from an ``(n_trials, 2)`` matrix of
    (direction, speed) components."""
    return _batch_pca(components, 2)


def sa_overall_batch(levels) -> tuple[PcaModel, np.ndarray]:
    """First-PC overall scores from an ``(n_trials, 3)`` matrix of
    (sa_l1, sa_l2, sa_l3)."""
    return _batch_pca(levels, 3)


@dataclass(frozen=True)
class SaScoreSet:
    trial_id: str
    sa_l1: float
    sa_l2: float
    sa_l3_dir: float
    sa_l3_spd: float
    sa_l3: Optional[float] = None
    sa_overall: Optional[float] = None

    def row(self) -> tuple:
        return tuple(getattr(self, c) for c in SCORE_COLUMNS)


@dataclass(frozen=True, eq=False)
class TrialFeatures:
    """Per-trial intermediate results that do not depend on the batch."""

    trial_id: str
    seg: SegmentationResult
    sa_l1: float
    sa_l3_dir: float
    sa_l3_spd: float
    deltas: MotionDeltaSeries


def trial_features(trace: GazeTrace, count_first_run: bool = False) -> TrialFeatures:
    seg = segment_runs(trace, count_first_run=count_first_run)
    deltas = motion_deltas(trace)
    l3_dir, l3_spd = sa_l3_components(deltas)
    return TrialFeatures(trace.trial_id, seg, sa_l1(seg), l3_dir, l3_spd, deltas)


@dataclass(frozen=True, eq=False)
class BatchScores:
    scores: list[SaScoreSet]
    l3_model: Optional[PcaModel]
    overall_model: Optional[PcaModel]


def score_features(features: Sequence[TrialFeatures], l2_pooled: bool = False) -> BatchScores:
    """Finish scoring: comprehension scores, then both batch PCA fits.

    Raises:
        TooFewTrials: fewer than two trials (the per-trial scores are still
            attached to the exception as ``partial``).
    """
    pooled = None
    if l2_pooled:
        pooled = length_stats([m for f in features for m in event_lengths(f.seg)])
    partial = [
        SaScoreSet(f.trial_id, f.sa_l1, sa_l2(f.seg, pooled), f.sa_l3_dir, f.sa_l3_spd)
        for f in features
    ]
    if len(partial) < 2:
        exc = TooFewTrials(f"batch PCA needs at least 2 trials, got {len(partial)}")
        exc.partial = partial
        raise exc
    l3_model, l3 = sa_l3_batch([[s.sa_l3_dir, s.sa_l3_spd] for s in partial])
    overall_model, overall = sa_overall_batch(
        [[s.sa_l1, s.sa_l2, v] for s, v in zip(partial, l3)]
    )
    scores = [
        replace(s, sa_l3=float(a), sa_overall=float(b)) for s, a, b in zip(partial, l3, overall)
    ]
    return BatchScores(scores, l3_model, overall_model)


def score_traces(
    traces: Sequence[GazeTrace], count_first_run: bool = False, l2_pooled: bool = False
) -> BatchScores:
    return score_features([trial_features(t, count_first_run) for t in traces], l2_pooled)
