import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dyncurv.dms import DynamicMetricSpace, TimeGrid

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SQRT2 = float(np.sqrt(2.0))


def square_matrix():
    return np.array([[0, 1, SQRT2, 1], [1, 0, 1, SQRT2], [SQRT2, 1, 0, 1], [1, SQRT2, 1, 0]], float)


def rhombus_matrix():
    # sides 1, minor diagonal 1 (points 0-2), major diagonal sqrt(3)
    s3 = float(np.sqrt(3.0))
    return np.array([[0, 1, 1, 1], [1, 0, 1, s3], [1, 1, 0, 1], [1, s3, 1, 0]], float)


def random_semimetric(rng, n, T=None, scale=10.0):
    shape = (n, n) if T is None else (T, n, n)
    d = rng.uniform(0, scale, size=shape)
    d = (d + np.swapaxes(d, -1, -2)) / 2
    idx = np.arange(n)
    d[..., idx, idx] = 0.0
    return d


def random_dms(rng, n, T, step=1.0, scale=10.0):
    return DynamicMetricSpace([f"p{i}" for i in range(n)], TimeGrid(0.0, step, T),
                              distances=random_semimetric(rng, n, T, scale))


def static_dms(mat, T, step=1.0):
    return DynamicMetricSpace([str(i) for i in range(len(mat))], TimeGrid(0.0, step, T),
                              distances=np.repeat(np.asarray(mat, float)[None], T, axis=0))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
