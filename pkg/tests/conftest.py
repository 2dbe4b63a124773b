"""Shared pytest plumbing.

test_acceptance.py appends one line per top-level check to ACCEPTANCE_LINES;
the hook below prints the whole block after the test summary, so the
pass/fail lines are visible in a plain ``pytest -v`` run (no -s needed).
"""

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("=", "acceptance summary")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
