"""Shared pytest plumbing: collect acceptance verdict lines.

The acceptance tests record one PASS/FAIL line each; printing them from
inside a test gets swallowed by capture, so they are replayed in the
terminal summary where they always appear in the run log.
"""

VERDICTS = []


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
