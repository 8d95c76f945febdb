import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

settings.register_profile("default", max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

GEOMETRIES = ("heisenberg", "su2", "e11", "e2", "sl2r")
ALL_GEOMETRIES = GEOMETRIES + ("abelian",)

component = st.floats(min_value=0.1, max_value=10.0, allow_nan=False, allow_infinity=False)
metrics = st.tuples(component, component, component)


def rel_err(x, y):
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    scale = np.maximum(np.abs(y), 1e-300)
    return float(np.max(np.abs(x - y) / scale))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
