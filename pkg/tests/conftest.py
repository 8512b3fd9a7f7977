"""Shared pytest hooks.

Acceptance tests register one verdict line each through ``record_criterion``;
the lines are repeated in the terminal summary so they show up without ``-s``.
"""

CRITERIA = []


def record_criterion(number: int, title: str, passed: bool, detail: str) -> str:
    line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
    CRITERIA.append((number, line))
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(CRITERIA):
        terminalreporter.write_line(line)
