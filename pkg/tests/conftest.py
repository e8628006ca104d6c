import sys
from pathlib import Path

from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).resolve().parent))

# corner properties need an admissibility filter, which rejects many boundary-heavy draws
settings.register_profile("filippov", suppress_health_check=[HealthCheck.filter_too_much], deadline=None)
settings.load_profile("filippov")

# lines recorded by test_acceptance.py, echoed in the terminal summary
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
