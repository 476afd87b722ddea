"""Driving performance, the correlation study, and its report format."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .baselines import compute_baselines
from .errors import ConstantSpeed, DataError, TooFewSamples, TooFewTrials
from .model import TelemetryTrace, TrialRecord
from .numerics import CorrelationResult, kendall, pearson, permutation_pvalue, spearman
from .scoring import BatchScores, TrialFeatures, score_features, trial_features

MEASURES = (
    "sa_l1",
    "sa_l2",
    "sa_l3",
    "sa_overall",
    "gte",
    "sge",
    "gaze_rate",
    "dwell_time",
)
METHODS = (("spearman", spearman), ("kendall", kendall), ("pearson", pearson))
MIN_TRIALS = 8


def driving_performance(telemetry: TelemetryTrace) -> float:
    """Reciprocal of the mean absolute acceleration (s^2/m).

    Acceleration is the first difference of speed over the first difference
    of time, with time converted from milliseconds to seconds.
    """
    if len(telemetry) < 3:
        raise TooFewSamples(f"need at least 3 telemetry samples, got {len(telemetry)}")
    t = telemetry.times / 1000.0
    v = telemetry.speeds
    if t[-1] - t[0] <= 0:
        raise TooFewSamples("telemetry spans zero time")
    mean_abs = float(np.mean(np.abs(np.diff(v) / np.diff(t))))
    if mean_abs < 1e-9:
        raise ConstantSpeed("speed never changes; performance is unbounded")
    return 1.0 / mean_abs


@dataclass(frozen=True)
class TrialMeasures:
    """Per-trial measure values; ``None`` marks an unmet precondition."""

    trial_id: str
    values: dict
    performance: Optional[float]
    errors: dict = field(default_factory=dict)


@dataclass
class MeasureRow:
    name: str
    results: dict  # method -> CorrelationResult or None
    excluded: int
    flag: Optional[str] = None
    permutation_p: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"name": self.name}
        for method, _ in METHODS:
            res = self.results.get(method)
            entry = res.to_dict() if res is not None else {"cc": None, "p": None}
            if method in self.permutation_p:
                entry["p_perm"] = self.permutation_p[method]
            out[method] = entry
        out["excluded"] = self.excluded
        if self.flag:
            out["flag"] = self.flag
        return out


@dataclass
class CorrelationReport:
    n: int
    rows: list[MeasureRow]
    trials: list[TrialMeasures] = field(default_factory=list)

    def row(self, name: str) -> MeasureRow:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"n": self.n, "measures": [r.to_dict() for r in self.rows]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"


def _baseline_values(record: TrialRecord, features: TrialFeatures) -> dict:
    b = compute_baselines(features.seg, record.gaze)
    return {"gte": b.gte_bits, "sge": b.sge_bits, "gaze_rate": b.gaze_rate_hz, "dwell_time": b.dwell_ms}


def collect_measures(
    records: Sequence[TrialRecord],
    features: Sequence[TrialFeatures],
    l2_pooled: bool = False,
) -> tuple[list[TrialMeasures], BatchScores]:
    """Combine per-trial features into the eight measures plus performance."""
    batch = score_features(features, l2_pooled=l2_pooled)
    out = []
    for record, feat, score in zip(records, features, batch.scores):
        values = {
            "sa_l1": score.sa_l1,
            "sa_l2": score.sa_l2,
            "sa_l3": score.sa_l3,
            "sa_overall": score.sa_overall,
        }
        values.update(_baseline_values(record, feat))
        errors = {}
        try:
            perf = driving_performance(record.telemetry)
        except DataError as exc:
            perf = None
            errors["performance"] = type(exc).__name__
        out.append(TrialMeasures(record.trial_id, values, perf, errors))
    return out, batch


def correlation_table(
    trials: Sequence[TrialMeasures],
    permutation: int = 0,
    seed: int = 0,
) -> CorrelationReport:
    """Correlate every measure with driving performance.

    Trials lacking a value for a measure, or lacking a performance value,
    are left out of that measure's row and counted in ``excluded``. A row
    whose remaining data make a coefficient undefined gets ``None`` results
    and a ``flag`` naming the reason.
    """
    trials = sorted(trials, key=lambda tm: tm.trial_id)
    rows = []
    for name in MEASURES:
        pairs = [
            (tm.values.get(name), tm.performance)
            for tm in trials
            if tm.values.get(name) is not None and tm.performance is not None
        ]
        excluded = len(trials) - len(pairs)
        x = np.array([p[0] for p in pairs], dtype=float)
        y = np.array([p[1] for p in pairs], dtype=float)
        results, flag, perm = {}, None, {}
        for method, fn in METHODS:
            try:
                results[method] = fn(x, y)
            except DataError as exc:
                results[method] = None
                flag = type(exc).__name__
                continue
            if permutation > 0:
                rng = np.random.default_rng([seed, MEASURES.index(name)])
                perm[method] = permutation_pvalue(fn, x, y, permutation, rng)
        rows.append(MeasureRow(name, results, excluded, flag, perm))
    return CorrelationReport(len(trials), rows, list(trials))


def correlate(
    trials: Sequence[TrialRecord],
    count_first_run: bool = False,
    l2_pooled: bool = False,
    permutation: int = 0,
) -> CorrelationReport:
    """Correlation study: each measure against driving performance."""
    if len(trials) < MIN_TRIALS:
        raise TooFewTrials(f"correlation study needs at least {MIN_TRIALS} trials, got {len(trials)}")
    records = sorted(trials, key=lambda r: r.trial_id)
    ids = [r.trial_id for r in records]
    if len(set(ids)) != len(ids):
        raise DataError("trial ids must be unique")
    features = [trial_features(r.gaze, count_first_run) for r in records]
    measures, _ = collect_measures(records, features, l2_pooled)
    return correlation_table(measures, permutation)


def format_table(report: CorrelationReport) -> str:
    """Plain-text table with one line per measure."""

    def cell(res: Optional[CorrelationResult]) -> str:
        if res is None:
            return f"{'NA':>7} {'NA':>9}"
        return f"{res.coefficient:7.3f} {res.p_value:9.2e}"

    head = f"{'measure':<12}" + "".join(f"{m:>18}" for m, _ in METHODS)
    lines = [f"n = {report.n}", head]
    for r in report.rows:
        lines.append(f"{r.name:<12}" + "".join(f" {cell(r.results.get(m))}" for m, _ in METHODS))
    return "\n".join(lines) + "\n"

