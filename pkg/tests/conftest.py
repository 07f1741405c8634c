import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from facecut import synth

# one line per acceptance criterion, printed after the run
ACCEPTANCE_RESULTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def landmarks96():
    return synth.landmark_template(96, 96)


@pytest.fixture(scope="session")
def face96(landmarks96):
    return synth.render_face(landmarks96, 96, 96)


@pytest.fixture(scope="session")
def fake_pair96(face96):
    """(fake image, planted truth mask) for the 96x96 face."""
    rng = np.random.default_rng(20240817)
    return synth.plant_manipulation(face96, rng)
