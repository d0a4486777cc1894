import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "spindir", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("spindir")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def criterion():
    """Record a one-line PASS/FAIL verdict for an acceptance criterion."""

    class Recorder:
        def __init__(self):
            self.label = None

        def __call__(self, label):
            self.label = label
            return self

        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            verdict = "PASS" if exc_type is None else "FAIL"
            detail = "" if exc is None else f" -- {str(exc).splitlines()[0]}"
            ACCEPTANCE_LINES.append(f"[{verdict}] {self.label}{detail}")
            return False

    return Recorder()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
