import numpy as np
from hypothesis import strategies as st

from ttp_lpst.instance_io import Instance
from tests.conftest import random_drr

team_counts = st.sampled_from([4, 6, 8, 10])
seeds = st.integers(0, 2**32 - 1)


@st.composite
def drr_schedules(draw, n=None):
    n = draw(team_counts) if n is None else n
    return random_drr(n, draw(seeds))


@st.composite
def instances(draw, n=None):
    n = draw(team_counts) if n is None else n
    upper = draw(st.lists(st.integers(0, 10_000), min_size=n * (n - 1) // 2,
                          max_size=n * (n - 1) // 2))
    d = np.zeros((n, n), dtype=np.int64)
    d[np.triu_indices(n, 1)] = upper
    return Instance(d + d.T)
