"""Schedule model, constraint counting, travel distance and the search objective."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from ttp_lpst.instance_io import Instance

MAX_STREAK = 3


@dataclass(eq=False)
class Schedule:
    """Opponent and venue grids indexed ``[team, round]``.

    ``home[t, r]`` is True when team ``t`` hosts its round-``r`` game. A
    pairing-consistent schedule has ``opp[opp[t, r], r] == t`` and opposite
    venues for the two sides of every game.
    """

    opp: np.ndarray
    home: np.ndarray

    def __post_init__(self):
        self.opp = np.asarray(self.opp, dtype=np.int64)
        self.home = np.asarray(self.home, dtype=bool)
        if self.opp.shape != self.home.shape:
            raise ValueError("opponent and venue grids differ in shape")

    @property
    def n(self) -> int:
        return self.opp.shape[0]

    @property
    def rounds(self) -> int:
        return self.opp.shape[1]

    def copy(self) -> Schedule:
        return Schedule(self.opp.copy(), self.home.copy())

    def game(self, t: int, r: int) -> tuple[int, bool]:
        return int(self.opp[t, r]), bool(self.home[t, r])

    def meeting_rounds(self, a: int, b: int) -> list[int]:
        return np.flatnonzero(self.opp[a] == b).tolist()

    def __eq__(self, other):
        if not isinstance(other, Schedule):
            return NotImplemented
        return np.array_equal(self.opp, other.opp) and np.array_equal(self.home, other.home)

    __hash__ = None


@dataclass(frozen=True)
class ViolationReport:
    atmost: int
    norepeat: int

    @property
    def total(self) -> int:
        return self.atmost + self.norepeat

    @property
    def feasible(self) -> bool:
        return self.total == 0


def is_pairing_consistent(s: Schedule) -> bool:
    n, rounds = s.opp.shape
    if s.opp.min() < 0 or s.opp.max() >= n:
        return False
    back = s.opp[s.opp, _columns(rounds)]
    if not np.array_equal(back, _teams(n, rounds)) or np.any(s.opp == _teams(n, rounds)):
        return False
    return not np.any(s.home[s.opp, _columns(rounds)] == s.home)


@functools.lru_cache(maxsize=None)
def _columns(rounds: int) -> np.ndarray:
    return np.arange(rounds)


@functools.lru_cache(maxsize=None)
def _teams(n: int, rounds: int) -> np.ndarray:
    return np.repeat(np.arange(n)[:, None], rounds, axis=1)


@functools.lru_cache(maxsize=None)
def _drr_codes(n: int) -> np.ndarray:
    # row t: sorted (opponent, venue) codes 2*o + home over every o != t
    codes = np.broadcast_to(np.arange(2 * n), (n, 2 * n))
    return codes[codes // 2 != np.arange(n)[:, None]].reshape(n, 2 * n - 2)


def is_double_round_robin(s: Schedule) -> bool:
    n, rounds = s.opp.shape
    if rounds != 2 * n - 2 or not is_pairing_consistent(s):
        return False
    return bool(np.array_equal(np.sort(s.opp * 2 + s.home, axis=1), _drr_codes(n)))


def count_atmost_violations(s: Schedule) -> int:
    # a maximal run of length L holds L - MAX_STREAK windows of MAX_STREAK + 1 equal venues
    h = s.home
    k = MAX_STREAK + 1
    if h.shape[1] < k:
        return 0
    same = np.ones((h.shape[0], h.shape[1] - k + 1), dtype=bool)
    for i in range(1, k):
        same &= h[:, i:h.shape[1] - k + 1 + i] == h[:, :h.shape[1] - k + 1]
    return int(same.sum())


def count_norepeat_violations(s: Schedule) -> int:
    # each repeated pairing is seen from both teams
    return int((s.opp[:, 1:] == s.opp[:, :-1]).sum()) // 2


def violations(s: Schedule) -> ViolationReport:
    return ViolationReport(count_atmost_violations(s), count_norepeat_violations(s))


def locations(s: Schedule) -> np.ndarray:
    """Where each team is in each round: its own venue at home, the opponent's when away."""
    return np.where(s.home, np.arange(s.n)[:, None], s.opp)


def team_distances(s: Schedule, inst: Instance) -> list[int]:
    loc = locations(s)
    teams = np.arange(s.n)
    d = inst.dist
    per = d[teams, loc[:, 0]] + d[loc[:, -1], teams] + d[loc[:, :-1], loc[:, 1:]].sum(axis=1)
    return [int(v) for v in per]


def team_distance(s: Schedule, inst: Instance, t: int) -> int:
    return team_distances(s, inst)[t]


def total_distance(s: Schedule, inst: Instance) -> int:
    return sum(team_distances(s, inst))


def violation_scale(v: int) -> float:
    """Sublinear growth of the penalty with the violation count; 1 at v = 1."""
    if v <= 0:
        return 0.0
    return 1.0 + math.sqrt(v) * math.log(v) / 2.0


def combine(distance: float, nviol: int, w: float) -> float:
    if nviol == 0:
        return float(distance)
    return math.hypot(distance, w * violation_scale(nviol))


def objective(s: Schedule, inst: Instance, w: float) -> float:
    if w <= 0:
        raise ValueError("penalty weight must be positive")
    return combine(total_distance(s, inst), violations(s).total, w)
