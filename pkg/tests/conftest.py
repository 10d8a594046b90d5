import cmath
import math
import sys

import numpy as np
import pytest
from hypothesis import strategies as st

from freescs.params import InitialConditions, ModelParams


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_state(rng, zeta_max=0.9, xi_max=4.0):
    """(xi, zeta) drawn uniformly from discs of the given radii."""
    zeta = cmath.rect(zeta_max * math.sqrt(rng.uniform()), rng.uniform(0, 2 * math.pi))
    xi = cmath.rect(xi_max * math.sqrt(rng.uniform()), rng.uniform(0, 2 * math.pi))
    return xi, zeta


def random_setup(rng, t_max=20.0):
    """Admissible model, initial conditions and a time."""
    mp = ModelParams(
        hbar=rng.uniform(0.5, 2.0),
        m0=rng.uniform(0.5, 2.0),
        gamma=rng.uniform(-0.1, 0.2),
        l=rng.uniform(0.5, 2.0),
    )
    zeta0 = cmath.rect(0.9 * math.sqrt(rng.uniform()), rng.uniform(0, 2 * math.pi))
    f0 = cmath.rect(rng.uniform(0.5, 2.0), rng.uniform(0, 2 * math.pi))
    varphi = complex(rng.normal(), rng.normal()) * 2
    ic = InitialConditions(f0=f0, g0=zeta0 * f0, varphi=varphi)
    return mp, ic, rng.uniform(0, t_max)


finite = dict(allow_nan=False, allow_infinity=False)

zetas = st.builds(
    cmath.rect,
    st.floats(0.0, 0.9, **finite),
    st.floats(0.0, 2 * math.pi, **finite),
)
xis = st.builds(
    cmath.rect,
    st.floats(0.0, 3.0, **finite),
    st.floats(0.0, 2 * math.pi, **finite),
)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
