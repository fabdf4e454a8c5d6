import math

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from qubitjm.core import SimpleObservable, Vec3
from qubitjm.fuzz import random_observable

# grid-search examples are slow enough to trip the per-example deadline
settings.register_profile("repo", deadline=None, print_blob=True)
settings.load_profile("repo")


@st.composite
def observables(draw, max_norm=1.0):
    x = draw(st.floats(-1.0, 1.0, allow_nan=False))
    theta = draw(st.floats(0.0, math.pi))
    phi = draw(st.floats(0.0, 2 * math.pi))
    frac = draw(st.floats(0.0, 1.0))
    m = frac * (1.0 - abs(x)) * max_norm
    d = Vec3(math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta))
    return SimpleObservable(x, d * m)


pairs = st.tuples(observables(), observables())


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_pairs(rng, n):
    return [(random_observable(rng), random_observable(rng)) for _ in range(n)]


def obs(x, m):
    return SimpleObservable(float(x), Vec3(*map(float, m)))


ACCEPTANCE_LINES = []


def record_acceptance(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] acceptance {number} {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
