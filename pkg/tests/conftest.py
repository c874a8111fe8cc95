"""Shared pytest configuration.

Hypothesis runs derandomized so every checkout reproduces the same
examples; the acceptance module records one line per criterion and the
terminal summary prints them even when output capture is on.
"""

import hypothesis

hypothesis.settings.register_profile(
    "orbicert",
    derandomize=True,
    max_examples=60,
    deadline=None,
)
hypothesis.settings.load_profile("orbicert")

ACCEPTANCE_LINES = []


def record_criterion(number, passed, detail):
    status = "PASS" if passed else "FAIL"
    ACCEPTANCE_LINES.append((number, f"{status} criterion {number}: {detail}"))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
