import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line per acceptance criterion and assert it."""
    lines = request.config._acceptance_lines

    def record(label, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} {label}: {detail}"
        lines.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
