import numpy as np
import pytest

from socialcapital.harness.presets import homophilic, partial, tolerant
from socialcapital.utility import SocietyConfig


@pytest.fixture
def homophilic_pair():
    return SocietyConfig((homophilic(5, 0.5, 0.5), homophilic(5, 0.5, 0.5)), horizon=400, seed=1)


@pytest.fixture
def tolerant_single():
    return SocietyConfig((tolerant(5, 0.5, 1.0),), horizon=300, seed=2)


@pytest.fixture
def mixed_three():
    return SocietyConfig(
        (homophilic(5, 1.0, 0.4), homophilic(5, 1.0, 0.4), partial("1/3", 0.5, 0.2)), horizon=300, seed=3
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# -- acceptance reporting ---------------------------------------------------------

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record():
    """Store the verdict of an acceptance criterion and echo one line."""

    def _record(criterion: int, passed: bool, text: str):
        ACCEPTANCE[criterion] = (bool(passed), text)
        print(f"C{criterion} {'PASS' if passed else 'FAIL'}: {text}")

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for c in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[c]
        terminalreporter.write_line(f"C{c:<2} {'PASS' if ok else 'FAIL'}  {text}")
