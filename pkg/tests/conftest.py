import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_field_pair(radius, seed, s_u=1.0, s_n=0.0):
    """Random (u, n_plus) data at the given regularities, n_plus mean-zero."""
    from zakbench.fields import random_sobolev_field

    u = random_sobolev_field(s_u, radius, seed=seed)
    n = random_sobolev_field(s_n, radius, seed=seed + 7919, mean_zero=True)
    return u, n
