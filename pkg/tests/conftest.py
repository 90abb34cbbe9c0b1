import math

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from nhcage.params import LadderParams

SQ3 = math.sqrt(3.0)

# the four flat-band configurations, one per degeneracy type
TABLE_SETS = {
    "EP4": LadderParams(2.0, 2.0, 2.0, 2.0, math.pi / 3, -math.pi / 3),
    "EP2_second": LadderParams(2.0, 2.0, 2 * SQ3, 2.0, math.pi / 3, math.pi / 6),
    "EP2_first": LadderParams(2.0, 2.0, 2.0, 2.0, 0.0, 0.0),
    "DP2": LadderParams(2.0, 2.0, 1.0, 2.0, 0.0, math.pi / 3),
}

_acceptance_lines = []


def multiset_distance(a, b):
    """Largest distance between optimally matched elements of two multisets."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    assert a.size == b.size
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def random_ladder(rng, gauge_fixed=True, j_equals_t=False):
    j = rng.uniform(0.5, 3.0)
    t = j if j_equals_t else rng.uniform(0.5, 3.0)
    t1, t2 = rng.uniform(0.2, 3.0, 2)
    th1, th2 = rng.uniform(-math.pi, math.pi, 2)
    eta = (0.0, 0.0) if gauge_fixed else tuple(rng.uniform(-math.pi, math.pi, 2))
    return LadderParams(j, t, t1, t2, th1, th2, *eta)


@pytest.fixture
def table_sets():
    return dict(TABLE_SETS)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def record_acceptance(line):
    print(line)
    _acceptance_lines.append(line)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
