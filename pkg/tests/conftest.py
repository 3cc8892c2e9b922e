from pathlib import Path

import numpy as np
import pytest

from ttp_lpst.annealer import random_schedule
from ttp_lpst.instance_io import Instance, parse_instance, parse_schedule
from ttp_lpst.neighborhood import KIND_ORDER, random_walk
from ttp_lpst.schedule import Schedule
from tests import oracles

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "data"
TOY_TEXT = "4\n0 1 2 3\n1 0 4 5\n2 4 0 6\n3 5 6 0\n"
GAL10_FOOTER = [404, 416, 477, 463, 423, 435, 452, 500, 462, 503]


def load_instance(name: str) -> Instance:
    return parse_instance((DATA / "instances" / f"{name}.txt").read_text())


def rows_to_schedule(rows) -> Schedule:
    opp = np.array([[o for o, _ in row] for row in rows], dtype=np.int64)
    home = np.array([[h for _, h in row] for row in rows], dtype=bool)
    return Schedule(opp, home)


def schedule_to_rows(s: Schedule):
    return [[(int(s.opp[t, r]), bool(s.home[t, r])) for r in range(s.rounds)] for t in range(s.n)]


def zero_instance(n: int) -> Instance:
    return Instance(np.zeros((n, n), dtype=np.int64))


def random_instance(n: int, rng: np.random.Generator) -> Instance:
    pts = rng.integers(0, 100, size=(n, 2))
    d = np.rint(np.hypot(*(pts[:, None, :] - pts[None, :, :]).transpose(2, 0, 1)))
    return Instance(d.astype(np.int64))


UNIFORM = {k: 1.0 / len(KIND_ORDER) for k in KIND_ORDER}


def random_drr(n: int, seed: int, scramble: int = 50) -> Schedule:
    """A random schedule pushed through ``scramble`` uniformly drawn moves, so
    inputs are not limited to the mirrored circle-method structure."""
    rng = np.random.default_rng(seed)
    return random_walk(random_schedule(zero_instance(n), rng), scramble, UNIFORM, rng)


@pytest.fixture(scope="session")
def gal10() -> Instance:
    return load_instance("gal10")


@pytest.fixture(scope="session")
def gal10_sched(gal10) -> Schedule:
    return parse_schedule((DATA / "schedules" / "gal10_4535.txt").read_text(), gal10)


@pytest.fixture(scope="session")
def toy() -> Instance:
    return parse_instance(TOY_TEXT)


@pytest.fixture(scope="session")
def pst8() -> Schedule:
    return rows_to_schedule(oracles.pst8_rows())


@pytest.fixture(scope="session")
def pst8_names():
    return oracles.PST8_NAMES


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.lines():
            terminalreporter.write_line(line)
