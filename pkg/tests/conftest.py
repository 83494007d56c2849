import csv
import os

import pytest

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def _load_reference():
    path = os.path.join(FIXTURES, "reference_values.csv")
    if not os.path.exists(path):
        from cutoffot.oracles import write_fixtures

        write_fixtures(FIXTURES)
    with open(path, newline="") as fh:
        return {r["name"]: (float(r["value"]), float(r["tolerance"])) for r in csv.DictReader(fh)}


@pytest.fixture(scope="session")
def ref():
    """Oracle values frozen on disk: name -> (value, tolerance)."""
    return _load_reference()


@pytest.fixture(scope="session")
def gauss_disk():
    from cutoffot.measures import cumulative_profile, gaussian, uniform_ball

    mu, nu = uniform_ball(2), gaussian(2)
    return mu, nu, cumulative_profile(mu), cumulative_profile(nu)


ACCEPTANCE_LINES = {}


def record_criterion(number: int, ok: bool, detail: str) -> str:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
