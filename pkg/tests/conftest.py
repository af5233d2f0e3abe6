import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

# criterion number -> (passed, description, detail); filled by test_acceptance
ACCEPTANCE_RESULTS: dict = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, title, detail = ACCEPTANCE_RESULTS[key]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {key:>2}: {title} ({detail})")
