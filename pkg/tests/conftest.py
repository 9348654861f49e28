import json
from importlib import resources

import pytest

from logcap import resolution_for, materialize

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def record():
    """Record one pass/fail line per acceptance criterion, then assert it."""

    def _record(label, passed, detail):
        ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {label}: {detail}")
        assert passed, f"{label}: {detail}"

    return _record


def sample(spec, n_points):
    return materialize(spec, resolution_for(spec, n_points))


@pytest.fixture(scope="session")
def schema():
    def load(name):
        text = resources.files("logcap").joinpath("schemas", f"{name}.schema.json").read_text()
        return json.loads(text)

    return load
