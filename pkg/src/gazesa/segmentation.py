"""Split a gaze trace into same-object runs and pick out perception events.

A run is a maximal stretch of consecutive samples carrying the same object
label. Background samples (no label) belong to no run and break runs. A run
is a perception event when its label differs from the label of the run
before it; the first run of a trace has no predecessor and is not an event
unless ``count_first_run`` is set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .model import GazeTrace


@dataclass(frozen=True)
class Run:
    object: str
    start_index: int
    end_index: int
    duration: float  # ms, t_end - t_start

    @property
    def length(self) -> int:
        return self.end_index - self.start_index + 1


@dataclass(frozen=True)
class SegmentationResult:
    runs: tuple[Run, ...]
    events: tuple[Run, ...]
    m_total: int
    background_count: int

    @property
    def c_dect(self) -> int:
        """Number of perception events."""
        return len(self.events)

    def is_event(self, run: Run) -> bool:
        return run in self.events


def segment_runs(trace: GazeTrace, count_first_run: bool = False) -> SegmentationResult:
    labels = trace.labels
    times = trace.times
    runs: list[Run] = []
    events: list[Run] = []
    background = 0
    start: Optional[int] = None

    def close(end: int) -> None:
        run = Run(labels[start], start, end, float(times[end] - times[start]))
        if runs:
            if runs[-1].object != run.object:
                events.append(run)
        elif count_first_run:
            events.append(run)
        runs.append(run)

    for i, label in enumerate(labels):
        if start is not None and label != labels[start]:
            close(i - 1)
            start = None
        if label is None:
            background += 1
        elif start is None:
            start = i
    if start is not None:
        close(len(labels) - 1)

    return SegmentationResult(tuple(runs), tuple(events), len(labels), background)


def event_lengths(seg: SegmentationResult) -> list[int]:
    return [e.length for e in seg.events]


def runs_to_csv(seg: SegmentationResult) -> str:
    """Debug dump of all runs, one row per run."""
    lines = ["object,start_idx,end_idx,length,duration_ms,is_event"]
    event_starts = {e.start_index for e in seg.events}
    for r in seg.runs:
        lines.append(
            f"{r.object},{r.start_index},{r.end_index},{r.length},"
            f"{format(r.duration, '.9g')},{int(r.start_index in event_starts)}"
        )
    return "\n".join(lines) + "\n"
