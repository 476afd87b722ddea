"""Domain types, CSV ingestion and trial validation.

Gaze CSV header is ``t_ms,x,y,object``; an empty ``object`` cell means the
sample fell on background. Telemetry CSV header is ``t_ms,speed_mps``.
Coordinates are unitless but must be consistent within one trace.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, Union

import numpy as np

from .errors import EmptyInput, MalformedRow, NegativeSpeed, NonMonotonicTime

GAZE_HEADER = ("t_ms", "x", "y", "object")
TELEMETRY_HEADER = ("t_ms", "speed_mps")

ByteSource = Union[bytes, str, io.IOBase]


def fmt_float(value: float) -> str:
    """Format a float at 9 significant digits (the CSV wire precision)."""
    return format(float(value), ".9g")


@dataclass(frozen=True)
class GazeSample:
    t: float
    pos: tuple[float, float]
    object: Optional[str] = None

    def __post_init__(self):
        if not (math.isfinite(self.t) and self.t >= 0):
            raise ValueError(f"timestamp must be finite and non-negative, got {self.t!r}")
        if not all(math.isfinite(c) for c in self.pos):
            raise ValueError(f"position must be finite, got {self.pos!r}")


@dataclass(frozen=True)
class GazeTrace:
    """Ordered gaze samples of one trial.

    The number of samples is the trial's total gaze-point count.
    """

    trial_id: str
    samples: tuple[GazeSample, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        for prev, cur in zip(self.samples, self.samples[1:]):
            if not cur.t > prev.t:
                raise NonMonotonicTime(-1, cur.t)

    @classmethod
    def from_arrays(cls, trial_id: str, t, xy, labels: Sequence[Optional[str]]) -> "GazeTrace":
        xy = np.asarray(xy, dtype=float)
        samples = tuple(
            GazeSample(float(ti), (float(p[0]), float(p[1])), lab or None)
            for ti, p, lab in zip(t, xy, labels)
        )
        return cls(trial_id, samples)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def m_total(self) -> int:
        return len(self.samples)

    @cached_property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples], dtype=float)

    @cached_property
    def positions(self) -> np.ndarray:
        return np.array([s.pos for s in self.samples], dtype=float).reshape(-1, 2)

    @cached_property
    def labels(self) -> tuple[Optional[str], ...]:
        return tuple(s.object for s in self.samples)

    @property
    def duration_ms(self) -> float:
        if not self.samples:
            return 0.0
        return self.samples[-1].t - self.samples[0].t


@dataclass(frozen=True)
class TelemetryTrace:
    trial_id: str
    samples: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple((float(t), float(v)) for t, v in self.samples))
        for t, v in self.samples:
            if not (math.isfinite(t) and math.isfinite(v)):
                raise ValueError("telemetry values must be finite")
            if v < 0:
                raise NegativeSpeed(-1, v)
        for (t0, _), (t1, _) in zip(self.samples, self.samples[1:]):
            if not t1 > t0:
                raise NonMonotonicTime(-1, t1)

    def __len__(self) -> int:
        return len(self.samples)

    @cached_property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.samples], dtype=float)

    @cached_property
    def speeds(self) -> np.ndarray:
        return np.array([v for _, v in self.samples], dtype=float)


@dataclass(frozen=True)
class TrialRecord:
    gaze: GazeTrace
    telemetry: TelemetryTrace
    participant: str = ""
    session: int = 0

    def __post_init__(self):
        if self.gaze.trial_id != self.telemetry.trial_id:
            raise ValueError(
                f"trial id mismatch: gaze {self.gaze.trial_id!r} vs telemetry {self.telemetry.trial_id!r}"
            )

    @property
    def trial_id(self) -> str:
        return self.gaze.trial_id


# -- parsing ---------------------------------------------------------------


def _text(data: ByteSource) -> str:
    if isinstance(data, str):
        return data
    if isinstance(data, (bytes, bytearray)):
        return bytes(data).decode("utf-8-sig")
    raw = data.read()
    return raw.decode("utf-8-sig") if isinstance(raw, bytes) else raw


def _rows(data: ByteSource, header: tuple[str, ...]):
    reader = csv.reader(io.StringIO(_text(data), newline=""))
    try:
        head = next(reader)
    except StopIteration:
        raise EmptyInput("input has no header") from None
    if tuple(c.strip() for c in head) != header:
        raise MalformedRow(1, f"expected header {','.join(header)!r}, got {','.join(head)!r}")
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        yield lineno, row


def _float(value: str, lineno: int, column: str) -> float:
    try:
        out = float(value)
    except ValueError:
        raise MalformedRow(lineno, f"bad number {value!r} in column {column!r}") from None
    if not math.isfinite(out):
        raise MalformedRow(lineno, f"non-finite value {value!r} in column {column!r}")
    return out


def parse_gaze_csv(data: ByteSource, trial_id: str = "") -> GazeTrace:
    """Parse a gaze CSV stream into a :class:`GazeTrace`.

    Raises:
        EmptyInput: no header or no data rows.
        MalformedRow: wrong column count or unparseable number.
        NonMonotonicTime: a timestamp not strictly greater than its predecessor.
    """
    samples = []
    last_t = None
    for lineno, row in _rows(data, GAZE_HEADER):
        if len(row) == 3:
            row = row + [""]
        if len(row) != 4:
            raise MalformedRow(lineno, f"expected 4 columns, got {len(row)}")
        t = _float(row[0], lineno, "t_ms")
        if t < 0:
            raise MalformedRow(lineno, f"negative timestamp {t!r}")
        x = _float(row[1], lineno, "x")
        y = _float(row[2], lineno, "y")
        if last_t is not None and not t > last_t:
            raise NonMonotonicTime(lineno, t)
        last_t = t
        label = row[3].strip()
        samples.append(GazeSample(t, (x, y), label or None))
    if not samples:
        raise EmptyInput("gaze CSV has no data rows")
    return GazeTrace(trial_id, tuple(samples))


def parse_telemetry_csv(data: ByteSource, trial_id: str = "") -> TelemetryTrace:
    """Parse a telemetry CSV stream into a :class:`TelemetryTrace`."""
    samples = []
    last_t = None
    for lineno, row in _rows(data, TELEMETRY_HEADER):
        if len(row) != 2:
            raise MalformedRow(lineno, f"expected 2 columns, got {len(row)}")
        t = _float(row[0], lineno, "t_ms")
        v = _float(row[1], lineno, "speed_mps")
        if t < 0:
            raise MalformedRow(lineno, f"negative timestamp {t!r}")
        if last_t is not None and not t > last_t:
            raise NonMonotonicTime(lineno, t)
        if v < 0:
            raise NegativeSpeed(lineno, v)
        last_t = t
        samples.append((t, v))
    if not samples:
        raise EmptyInput("telemetry CSV has no data rows")
    return TelemetryTrace(trial_id, tuple(samples))


def gaze_to_csv(trace: GazeTrace) -> str:
    lines = [",".join(GAZE_HEADER)]
    for s in trace.samples:
        lines.append(f"{fmt_float(s.t)},{fmt_float(s.pos[0])},{fmt_float(s.pos[1])},{s.object or ''}")
    return "\n".join(lines) + "\n"


def telemetry_to_csv(trace: TelemetryTrace) -> str:
    lines = [",".join(TELEMETRY_HEADER)]
    lines.extend(f"{fmt_float(t)},{fmt_float(v)}" for t, v in trace.samples)
    return "\n".join(lines) + "\n"


# -- validation ------------------------------------------------------------


@dataclass(frozen=True)
class TrialWarning:
    message: str

    @property
    def kind(self) -> str:
        return type(self).__name__

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


class SampleRateWarning(TrialWarning):
    pass


class OverlapWarning(TrialWarning):
    pass


def validate_trial(
    record: TrialRecord,
    nominal_hz: float = 90.0,
    rate_tolerance: float = 0.5,
    min_overlap: float = 0.9,
) -> list[TrialWarning]:
    """Return non-fatal warnings about a parsed trial; never modifies it."""
    warnings: list[TrialWarning] = []
    gaze_t = record.gaze.times
    if len(gaze_t) >= 2 and nominal_hz > 0:
        nominal_ms = 1000.0 / nominal_hz
        median_dt = float(np.median(np.diff(gaze_t)))
        if abs(median_dt - nominal_ms) > rate_tolerance * nominal_ms:
            warnings.append(SampleRateWarning(
                f"median gaze interval {median_dt:.3f} ms vs nominal {nominal_ms:.3f} ms"
            ))
    tele_t = record.telemetry.times
    if len(gaze_t) >= 2 and len(tele_t) >= 1:
        span = gaze_t[-1] - gaze_t[0]
        overlap = max(0.0, min(gaze_t[-1], tele_t[-1]) - max(gaze_t[0], tele_t[0]))
        if span > 0 and overlap / span < min_overlap:
            warnings.append(OverlapWarning(
                f"telemetry covers {100 * overlap / span:.1f}% of the gaze time span"
            ))
    return warnings
