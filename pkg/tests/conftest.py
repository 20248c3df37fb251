import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from muntz import goursat_kernel, validate

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def exponent_lists(draw, min_size=1, max_size=6, gap=0.25):
    """Exponents on a 0.05 lattice above -1/2, pairwise at least ``gap`` apart, shuffled."""
    n = draw(st.integers(min_size, max_size))
    start = draw(st.integers(-9, 20)) * 0.05
    steps = draw(st.lists(st.integers(0, 20), min_size=n - 1, max_size=n - 1))
    lam = start + np.cumsum([0.0] + [gap + 0.05 * s for s in steps])
    perm = draw(st.permutations(list(range(n))))
    return [float(lam[i]) for i in perm]


def random_sequence(rng: np.random.Generator, n: int, spacing=(0.5, 1.0)) -> list[float]:
    lam = -0.45 + rng.uniform(0, 0.5) + np.cumsum(np.r_[0.0, rng.uniform(*spacing, n - 1)])
    return [float(x) for x in rng.permutation(lam)]


@pytest.fixture
def kern12():
    return goursat_kernel(validate([1.0, 2.0]))


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    if module is not None and module.REPORT:
        terminalreporter.section("acceptance criteria")
        for line in module.REPORT:
            terminalreporter.write_line(line)
