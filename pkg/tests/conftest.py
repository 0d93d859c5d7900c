import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=50, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def path3():
    return [(0, 1, 1.0), (1, 2, 1.0)]


@pytest.fixture
def square():
    # a-b-z-c-a with a=0, b=1, z=2, c=3
    return [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


#: (criterion, label, passed, seconds, detail) rows recorded by the acceptance suite
ACCEPTANCE: list = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, label, ok, secs, detail in sorted(ACCEPTANCE):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {num}: {status}  {label}  ({secs:.1f}s){'  ' + detail if detail else ''}")
