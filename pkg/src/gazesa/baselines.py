"""Comparison indicators: gaze transition entropy, stationary gaze entropy,
gaze rate and dwell time.

Markov states are object labels at run granularity, so the transition
counts never contain self-loops.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NoRuns, TooFewRuns, ZeroDuration
from .model import GazeTrace
from .numerics import shannon_entropy, stationary_distribution
from .segmentation import SegmentationResult

BASELINE_COLUMNS = ("trial_id", "gte_bits", "sge_bits", "gaze_rate_hz", "dwell_ms")


@dataclass(frozen=True, eq=False)
class TransitionModel:
    states: tuple[str, ...]
    counts: np.ndarray
    matrix: np.ndarray
    frequencies: np.ndarray


def build_transitions(seg: SegmentationResult) -> TransitionModel:
    """Count object-to-object transitions between consecutive runs.

    Background gaps are ignored. Rows without any outgoing transition are
    padded with a uniform distribution over all states.
    """
    labels = [r.object for r in seg.runs]
    if len(labels) < 2:
        raise TooFewRuns(f"need at least 2 runs, got {len(labels)}")
    states = tuple(sorted(set(labels)))
    index = {s: i for i, s in enumerate(states)}
    k = len(states)
    counts = np.zeros((k, k), dtype=np.int64)
    for a, b in zip(labels, labels[1:]):
        if a != b:
            counts[index[a], index[b]] += 1
    totals = counts.sum(axis=1)
    matrix = np.full((k, k), 1.0 / k)
    has_out = totals > 0
    matrix[has_out] = counts[has_out] / totals[has_out, None]
    freq = np.bincount([index[s] for s in labels], minlength=k) / len(labels)
    return TransitionModel(states, counts, matrix, freq)


def _row_entropies(P: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(P > 0, -P * np.log2(np.where(P > 0, P, 1.0)), 0.0)
    return terms.sum(axis=1)


def gte(model: TransitionModel, pi: Optional[np.ndarray] = None) -> float:
    """Gaze transition entropy in bits: stationary-weighted row entropy."""
    P = model.matrix
    if pi is None:
        pi = stationary_distribution(P)
    return float(np.sum(pi * _row_entropies(P))) + 0.0


def sge(model: TransitionModel) -> float:
    """Stationary gaze entropy in bits."""
    pi = stationary_distribution(model.matrix)
    return shannon_entropy(pi / pi.sum())


def gaze_rate(seg: SegmentationResult, trace: GazeTrace) -> float:
    """Perception events per second of trace."""
    duration_ms = trace.duration_ms
    if duration_ms <= 0:
        raise ZeroDuration("trace spans zero time")
    return seg.c_dect / (duration_ms / 1000.0)


def dwell_time(seg: SegmentationResult) -> float:
    """Mean run duration in milliseconds over all runs."""
    if not seg.runs:
        raise NoRuns("trace has no object runs")
    return float(np.mean([r.duration for r in seg.runs]))


@dataclass(frozen=True)
class BaselineSet:
    trial_id: str
    gte_bits: Optional[float]
    sge_bits: Optional[float]
    gaze_rate_hz: Optional[float]
    dwell_ms: Optional[float]

    def row(self) -> tuple:
        return tuple(getattr(self, c) for c in BASELINE_COLUMNS)


def compute_baselines(seg: SegmentationResult, trace: GazeTrace) -> BaselineSet:
    """All four indicators; an indicator whose precondition fails is None."""
    try:
        model = build_transitions(seg)
        pi = stationary_distribution(model.matrix)
        g, s = gte(model, pi), shannon_entropy(pi / pi.sum())
    except TooFewRuns:
        g = s = None
    try:
        rate = gaze_rate(seg, trace)
    except ZeroDuration:
        rate = None
    try:
        dwell = dwell_time(seg)
    except NoRuns:
        dwell = None
    return BaselineSet(trace.trial_id, g, s, rate, dwell)
