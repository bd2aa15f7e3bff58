import numpy as np
import pytest

import sidebandit as sb

_ACCEPTANCE: dict[int, tuple[str, str]] = {}


@pytest.fixture
def record_criterion():
    """Record a pass/fail line for an acceptance criterion.

    Usage: ``with record_criterion(3, "bound identity"): ...``
    """

    class _Recorder:
        def __init__(self, number, title):
            self.number, self.title = number, title

        def __enter__(self):
            _ACCEPTANCE[self.number] = ("FAIL", self.title)
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc_type is None:
                _ACCEPTANCE[self.number] = ("PASS", self.title)
            return False

    return _Recorder


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        status, title = _ACCEPTANCE[number]
        terminalreporter.write_line(f"[{status}] criterion {number:2d}: {title}")


@pytest.fixture
def triangle():
    return sb.build_graph(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def path3():
    return sb.build_graph(3, [(0, 1), (1, 2)])


def random_graph(rng: np.random.Generator, max_arms: int = 30) -> sb.SOGraph:
    k = int(rng.integers(1, max_arms + 1))
    p = float(rng.uniform(0.0, 1.0))
    return sb.generate_graph("erdos_renyi", k, int(rng.integers(0, 2**31)), p=p)
