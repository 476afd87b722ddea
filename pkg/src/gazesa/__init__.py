"""Situation-awareness scores from gaze traces, with baselines and a
correlation study against driving performance."""

from .baselines import build_transitions, dwell_time, gaze_rate, gte, sge
from .model import (
    GazeSample,
    GazeTrace,
    TelemetryTrace,
    TrialRecord,
    parse_gaze_csv,
    parse_telemetry_csv,
    validate_trial,
)
from .scoring import (
    SaScoreSet,
    motion_deltas,
    sa_l1,
    sa_l2,
    sa_l3_batch,
    sa_l3_components,
    sa_overall_batch,
    score_traces,
)
from .segmentation import event_lengths, segment_runs
from .study import correlate, driving_performance
from .synth import SynthConfig, generate_trial

__version__ = "0.1.0"

__all__ = [
    "GazeSample",
    "GazeTrace",
    "SaScoreSet",
    "SynthConfig",
    "TelemetryTrace",
    "TrialRecord",
    "build_transitions",
    "correlate",
    "driving_performance",
    "dwell_time",
    "event_lengths",
    "gaze_rate",
    "generate_trial",
    "gte",
    "motion_deltas",
    "parse_gaze_csv",
    "parse_telemetry_csv",
    "sa_l1",
    "sa_l2",
    "sa_l3_batch",
    "sa_l3_components",
    "sa_overall_batch",
    "score_traces",
    "segment_runs",
    "sge",
    "validate_trial",
]
