import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from geoprox.geometry import Euclidean, HalfPlane, MetricTree, SphericalCap
from geoprox.suites import DEMO_TREE

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=["euclidean", "halfplane", "tree", "sphere"])
def space(request):
    return {
        "euclidean": Euclidean(2),
        "halfplane": HalfPlane(),
        "tree": MetricTree(DEMO_TREE),
        "sphere": SphericalCap(1.0, 1.2),
    }[request.param]


@pytest.fixture(params=["euclidean", "halfplane", "tree"])
def cat0_space(request):
    return {"euclidean": Euclidean(2), "halfplane": HalfPlane(), "tree": MetricTree(DEMO_TREE)}[request.param]


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance") or __import__("sys").modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
