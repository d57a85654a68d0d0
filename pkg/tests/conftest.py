import math

import numpy as np
import pytest
from hypothesis import settings, strategies as st

from circlewalk.configs import CircleConfig

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def configs(draw, max_n: int = 12):
    n = draw(st.integers(2, max_n))
    k = draw(st.integers(1, n - 1))
    sites = draw(st.sets(st.integers(0, n - 1), min_size=k, max_size=k))
    return CircleConfig.from_sites(n, sites)


@st.composite
def small_instances(draw, max_states: int = 300):
    n = draw(st.integers(3, 9))
    k = draw(st.integers(1, n - 1))
    if math.comb(n, k) > max_states:
        k = 2
    return n, k


def unit_points(k: int, rng: np.random.Generator) -> np.ndarray:
    return np.exp(2j * np.pi * rng.random(k))


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


# one line per acceptance criterion, filled by tests/test_acceptance.py
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for num in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[num])
