import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from sdbb.codebuilder import code_from_strings

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def dense_rank(a) -> int:
    """Plain-Python Gaussian elimination over GF(2) (test oracle)."""
    rows = [int("".join(str(int(b)) for b in r), 2) for r in np.asarray(a) if len(r)]
    rank = 0
    while rows:
        pivot = max(rows)
        if pivot == 0:
            break
        rows.remove(pivot)
        top = pivot.bit_length() - 1
        rows = [r ^ pivot if (r >> top) & 1 else r for r in rows]
        rank += 1
    return rank


@pytest.fixture(scope="session")
def code_16():
    return code_from_strings("1 + x + y + y^-1", (0, 4), (2, 2))


@pytest.fixture(scope="session")
def color_6():
    return code_from_strings("1 + x + y", (3, 0), (1, 1))


@pytest.fixture(scope="session")
def color_18():
    return code_from_strings("1 + x + y", (3, 0), (0, 3))


@pytest.fixture(scope="session")
def code_56():
    return code_from_strings("1 + x + x^2*y + x^-1*y", (0, 7), (4, 3))
