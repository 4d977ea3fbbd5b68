import numpy as np
import pytest

from oscilab.materials import PhasePair, build_pressure, build_sigma


@pytest.fixture(scope="session")
def pair():
    return PhasePair(1.0, 3.0)


@pytest.fixture(scope="session")
def sigma(pair):
    return build_sigma(pair, [0.0, 1.0])


@pytest.fixture(scope="session")
def pressure(pair):
    return build_pressure(pair, [0.0, 1.0])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


class CriterionLog:
    """Collects named checks for one acceptance criterion and reports a single verdict."""

    def __init__(self, number: int, title: str, sink: list):
        self.number, self.title, self.sink = number, title, sink
        self.checks = []

    def check(self, name: str, value, ok: bool, bound: str = ""):
        self.checks.append((name, value, bool(ok), bound))
        return ok

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        failed = [c for c in self.checks if not c[2]]
        passed = exc_type is None and not failed and bool(self.checks)
        if exc_type is not None:
            detail = f"error: {exc_type.__name__}: {exc}"
        elif failed:
            detail = "; ".join(f"{n}={_fmt(v)} (need {b})" for n, v, _, b in failed)
        else:
            detail = "; ".join(f"{n}={_fmt(v)}" for n, v, _, _ in self.checks)
        line = f"criterion {self.number:2d} {'PASS' if passed else 'FAIL'}  {self.title}: {detail}"
        self.sink.append((self.number, line))
        print(line)
        if exc_type is None:
            assert passed, line
        return False


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.3g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture
def criterion(request):
    sink = request.config._acceptance_lines

    def make(number: int, title: str) -> CriterionLog:
        return CriterionLog(number, title, sink)

    return make


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
