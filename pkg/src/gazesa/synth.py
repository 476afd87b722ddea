"""Seeded synthetic trials with a tunable situation-awareness level.

``theta`` in [0, 1] stands in for ground-truth awareness. It controls three
independent parts of a trial:

* object labels: run lengths are gamma distributed with shape growing in
  theta (more regular dwell), runs get shorter, and background gaps become
  rarer;
* gaze kinematics: the turn signal and the step-length change signal are
  unit-variance AR(1) processes with coefficient ``0.9 * theta``; the signed
  sine of each turn is ``tanh`` of the turn signal, so theta = 0 gives
  white-noise kinematics;
* telemetry: speed around 40 km/h driven by AR(1) acceleration noise whose
  scale shrinks as theta grows.

Positions are in pixel-like units (about 12 px per sample).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfig
from .model import GazeTrace, TelemetryTrace, TrialRecord, fmt_float

TARGET_SPEED = 40.0 / 3.6  # m/s
TELEMETRY_HZ = 10.0
STEP_PX = 12.0
STEP_SD_PX = 0.5
STEP_REVERSION = 0.3
TURN_GAIN = 0.5


@dataclass(frozen=True)
class SynthConfig:
    theta: float
    seed: int = 0
    duration_s: float = 30.0
    sample_rate_hz: float = 90.0
    n_objects: int = 6
    trial_id: str = ""

    def validate(self) -> None:
        if not (0.0 <= self.theta <= 1.0) or math.isnan(self.theta):
            raise InvalidConfig(f"theta must lie in [0, 1], got {self.theta!r}")
        if not self.sample_rate_hz > 0:
            raise InvalidConfig("sample_rate_hz must be positive")
        if not self.duration_s > 0:
            raise InvalidConfig("duration_s must be positive")
        if self.n_objects < 2:
            raise InvalidConfig("need at least 2 objects")
        if not 0 <= self.seed < 2**64:
            raise InvalidConfig("seed must be a 64-bit unsigned integer")


def ar1(rng: np.random.Generator, n: int, coef: float) -> np.ndarray:
    """Stationary unit-variance AR(1) sample path."""
    eps = rng.standard_normal(n)
    out = np.empty(n)
    out[0] = eps[0]
    scale = math.sqrt(1.0 - coef * coef)
    for i in range(1, n):
        out[i] = coef * out[i - 1] + scale * eps[i]
    return out


def _labels(rng: np.random.Generator, n: int, theta: float, n_objects: int) -> list:
    shape = 1.0 + 15.0 * theta
    mean_run = 40.0 - 15.0 * theta
    p_gap = 0.5 - 0.45 * theta
    names = [f"obj{i}" for i in range(n_objects)]
    labels: list = []
    prev = None
    while len(labels) < n:
        choices = [o for o in names if o != prev]
        obj = choices[int(rng.integers(len(choices)))]
        length = max(1, int(round(rng.gamma(shape, mean_run / shape))))
        labels.extend([obj] * length)
        prev = obj
        if rng.random() < p_gap:
            labels.extend([None] * int(rng.geometric(1.0 / 15.0)))
    return labels[:n]


def _positions(rng: np.random.Generator, n: int, theta: float) -> np.ndarray:
    coef = 0.9 * theta
    turn = ar1(rng, n, coef)
    step_change = ar1(rng, n, coef)
    heading = np.cumsum(np.arcsin(np.tanh(TURN_GAIN * turn)))
    length = np.empty(n)
    length[0] = STEP_PX
    for i in range(1, n):
        nxt = length[i - 1] + STEP_SD_PX * step_change[i] - STEP_REVERSION * (length[i - 1] - STEP_PX)
        length[i] = nxt if nxt > 1.0 else 2.0 - nxt
    steps = np.column_stack([length * np.cos(heading), length * np.sin(heading)])
    start = np.array([960.0, 540.0])
    return np.vstack([start, start + np.cumsum(steps[:-1], axis=0)])


def _telemetry(rng: np.random.Generator, duration_s: float, theta: float) -> tuple[np.ndarray, np.ndarray]:
    n = int(round(duration_s * TELEMETRY_HZ)) + 1
    dt = 1.0 / TELEMETRY_HZ
    accel_sd = (0.25 + 1.25 * (1.0 - theta)) * math.exp(0.2 * rng.standard_normal())
    accel = accel_sd * ar1(rng, n, 0.8)
    speed = np.empty(n)
    speed[0] = TARGET_SPEED
    for i in range(1, n):
        speed[i] = max(0.0, speed[i - 1] + accel[i] * dt - 0.05 * (speed[i - 1] - TARGET_SPEED))
    t_ms = np.arange(n) * (1000.0 * dt)
    return t_ms, speed


def _wire(values: np.ndarray) -> list[float]:
    # round-trip through the CSV precision so in-memory and on-disk trials agree
    return [float(fmt_float(v)) for v in values]


def generate_trial(config: SynthConfig) -> TrialRecord:
    """Build one synthetic trial; a pure function of ``config``."""
    config.validate()
    rng = np.random.default_rng(config.seed)
    label_rng, kin_rng, tel_rng = rng.spawn(3)
    n = max(4, int(round(config.duration_s * config.sample_rate_hz)))
    t_ms = _wire(np.arange(n) * (1000.0 / config.sample_rate_hz))
    xy = _positions(kin_rng, n, config.theta)
    xs, ys = _wire(xy[:, 0]), _wire(xy[:, 1])
    labels = _labels(label_rng, n, config.theta, config.n_objects)
    tid = config.trial_id or f"synth-{config.seed}"
    gaze = GazeTrace.from_arrays(tid, t_ms, list(zip(xs, ys)), labels)
    tt, speed = _telemetry(tel_rng, config.duration_s, config.theta)
    telemetry = TelemetryTrace(tid, tuple(zip(_wire(tt), _wire(speed))))
    return TrialRecord(gaze, telemetry, participant="synthetic", session=0)


def cohort_seeds(seed: int, count: int) -> list[int]:
    """Independent per-trial 64-bit seeds derived from one base seed."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def ramp_thetas(count: int) -> list[float]:
    if count < 1:
        raise InvalidConfig("need at least one trial")
    if count == 1:
        return [0.5]
    return [i / (count - 1) for i in range(count)]


def ramp_cohort(
    count: int,
    seed: int = 0,
    duration_s: float = 30.0,
    sample_rate_hz: float = 90.0,
    n_objects: int = 6,
) -> list[TrialRecord]:
    """``count`` trials with theta spaced evenly over [0, 1]."""
    return cohort(ramp_thetas(count), seed, duration_s, sample_rate_hz, n_objects)


def cohort(
    thetas,
    seed: int = 0,
    duration_s: float = 30.0,
    sample_rate_hz: float = 90.0,
    n_objects: int = 6,
) -> list[TrialRecord]:
    width = max(2, len(str(len(thetas))))
    return [
        generate_trial(SynthConfig(
            float(th), s, duration_s, sample_rate_hz, n_objects, trial_id=f"t{i + 1:0{width}d}"
        ))
        for i, (th, s) in enumerate(zip(thetas, cohort_seeds(seed, len(thetas))))
    ]
