"""Shared test helpers: seeded rng factory and acceptance reporting.

Acceptance tests record one line per criterion; the lines are printed in a
dedicated terminal section after the run so the verdicts are visible even
when output capturing is on.
"""

import numpy as np

ACCEPTANCE_RESULTS = []


def seeded_rng(*entropy) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(list(entropy))))


def record_criterion(number: int, description: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE_RESULTS.append((number, description, bool(passed), detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, description, passed, detail in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if passed else "FAIL"
        line = f"criterion {number} {status}: {description}"
        if detail:
            line += f" [{detail}]"
        terminalreporter.write_line(line)
