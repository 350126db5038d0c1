import os
from itertools import product

import pytest
from hypothesis import HealthCheck, settings

from sheaflab.poset import make_poset

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def K2():
    return make_poset(["bot", "top"], [("bot", "top")])


@pytest.fixture
def V():
    return make_poset(["a", "b", "c"], [("a", "b"), ("a", "c")])


@pytest.fixture
def chain3():
    return make_poset(["c0", "c1", "c2"], [("c0", "c1"), ("c1", "c2")])


@pytest.fixture
def diamond():
    return make_poset(["bot", "x", "y", "T"], [("bot", "x"), ("bot", "y"), ("x", "T"), ("y", "T")])


def subsets(points):
    pts = sorted(points)
    for bits in product((0, 1), repeat=len(pts)):
        yield frozenset(p for p, b in zip(pts, bits) if b)


def brute_opens(P):
    return [s for s in subsets(P) if all(q in s for p in s for q in P if P.le(p, q))]
