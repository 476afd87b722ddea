import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gazesa.model import GazeTrace  # noqa: E402


def trace_from_labels(labels, dt=11.0, trial_id="t"):
    """Gaze trace with the given label sequence on a diagonal path."""
    n = len(labels)
    return GazeTrace.from_arrays(
        trial_id, [i * dt for i in range(n)], [(float(i), float(i % 3)) for i in range(n)], labels
    )


@pytest.fixture
def labels_trace():
    return trace_from_labels


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
