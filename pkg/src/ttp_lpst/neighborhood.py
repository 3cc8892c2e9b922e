"""Schedule moves: the five classic TTP moves and lookahead partial swap teams.

Every public move is a pure function: the input schedule is left untouched
and a new schedule is returned. The work is done in place on copies by the
compiled kernels in :mod:`ttp_lpst._kernels`.

Partial swap teams (PST) between ``ti`` and ``tj`` starting in round ``r``
exchanges the two teams' games round by round. After each exchange ``ti``
holds a duplicate of the game it just received, so the chain continues in
the round where ``ti`` originally had that game, and stops once ``ti`` gets
back the game it gave away first. The games ``tj`` hands over along the way,
in chain order, form the *swaplist*.

Lookahead PST flips the venues of ``tj``'s two games against a team ``tl``
that appears twice in the swaplist before running the chain, which makes the
chain jump over everything between the two occurrences, and flips them back
afterwards. Early exit stops the chain as soon as ``ti`` receives its
original opponent with the wrong venue and repairs the resulting duplicate
by flipping one game on each side.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ttp_lpst import _kernels as K
from ttp_lpst.schedule import Schedule


class ChainError(RuntimeError):
    """PST chain ran longer than the number of rounds: the schedule is corrupt."""


class MoveKind(enum.Enum):
    SWAP_HOMES = "SwapHomes"
    SWAP_ROUNDS = "SwapRounds"
    SWAP_TEAMS = "SwapTeams"
    SWAP_TEAMS_VN = "SwapTeamsVN"
    PARTIAL_SWAP_ROUNDS = "PartialSwapRounds"
    PARTIAL_SWAP_TEAMS = "PartialSwapTeams"
    LPST = "LPST"


# index of each kind is its kernel code
KIND_ORDER = (
    MoveKind.SWAP_HOMES,
    MoveKind.SWAP_ROUNDS,
    MoveKind.SWAP_TEAMS,
    MoveKind.SWAP_TEAMS_VN,
    MoveKind.PARTIAL_SWAP_ROUNDS,
    MoveKind.PARTIAL_SWAP_TEAMS,
    MoveKind.LPST,
)

BASIC_KINDS = (
    MoveKind.SWAP_HOMES,
    MoveKind.SWAP_ROUNDS,
    MoveKind.SWAP_TEAMS,
    MoveKind.PARTIAL_SWAP_ROUNDS,
    MoveKind.PARTIAL_SWAP_TEAMS,
)

LPST_SHARE = 0.66

DEFAULT_WEIGHTS: dict[MoveKind, float] = {
    MoveKind.LPST: LPST_SHARE,
    **{k: (1.0 - LPST_SHARE) / len(BASIC_KINDS) for k in BASIC_KINDS},
}


def cumulative_weights(weights: Mapping[MoveKind, float]) -> np.ndarray:
    return np.cumsum([float(weights.get(k, 0.0)) for k in KIND_ORDER])


def _rng(rng: np.random.Generator | None) -> np.random.Generator:
    return rng if rng is not None else np.random.default_rng()


@dataclass(frozen=True)
class MoveSpec:
    kind: MoveKind
    args: tuple[int, ...]


@dataclass(frozen=True)
class SwapEntry:
    round: int
    opponent: int
    home: bool


@dataclass(frozen=True)
class SwapList:
    """``team``'s games handed to ``partner`` by a simulated PST, in chain order."""

    entries: tuple[SwapEntry, ...]
    team: int | None = None
    partner: int | None = None

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    @property
    def rounds(self) -> list[int]:
        return [e.round for e in self.entries]

    def tokens(self, names: Sequence[str]) -> list[str]:
        return [("" if e.home else "@") + names[e.opponent] for e in self.entries]

    @classmethod
    def from_tokens(cls, tokens: Sequence[str], names: Sequence[str]) -> SwapList:
        """Build a list from ``"@H"``-style tokens; rounds are the positions."""
        names = list(names)
        entries = tuple(
            SwapEntry(i, names.index(tok.lstrip("@")), not tok.startswith("@"))
            for i, tok in enumerate(tokens)
        )
        return cls(entries)


@dataclass(frozen=True)
class LookaheadPlan:
    """How to run a PST chain.

    ``lookahead_span`` holds the two swaplist positions of ``lookahead``;
    the entries after the first position up to the second are skipped.
    """

    lookahead: int | None
    lookahead_span: tuple[int, int] | None
    early_exit_index: int | None
    predicted_swaps: int
    cost: float

    @property
    def gap(self) -> int:
        if self.lookahead_span is None:
            return 0
        a, b = self.lookahead_span
        return b - a


# -- basic moves -------------------------------------------------------------


def _distinct(a: int, b: int, what: str) -> None:
    if a == b:
        raise ValueError(f"{what} must be distinct, got {a} twice")


def swap_homes(s: Schedule, ti: int, tj: int) -> Schedule:
    _distinct(ti, tj, "teams")
    out = s.copy()
    K.swap_homes(out.opp, out.home, ti, tj)
    return out


def swap_rounds(s: Schedule, rk: int, rl: int) -> Schedule:
    _distinct(rk, rl, "rounds")
    out = s.copy()
    K.swap_rounds(out.opp, out.home, rk, rl)
    return out


def swap_teams(s: Schedule, ti: int, tj: int, violation_neutral: bool = False) -> Schedule:
    """Exchange the rows of ``ti`` and ``tj`` outside their two mutual games.

    With ``violation_neutral`` the mutual games are also flipped, which gives
    ``ti`` exactly ``tj``'s old venue pattern and vice versa, so no
    constraint violation is created or removed.
    """
    _distinct(ti, tj, "teams")
    out = s.copy()
    K.swap_teams(out.opp, out.home, ti, tj, violation_neutral)
    return out


def round_closure(s: Schedule, t: int, rk: int, rl: int) -> list[int]:
    """Teams that must swap rounds ``rk`` and ``rl`` together with ``t``."""
    member = np.empty(s.n, dtype=bool)
    K.round_closure(s.opp, t, rk, rl, member)
    return np.flatnonzero(member).tolist()


def partial_swap_rounds(s: Schedule, ti: int, rk: int, rl: int) -> Schedule:
    _distinct(rk, rl, "rounds")
    out = s.copy()
    K.partial_swap_rounds(out.opp, out.home, ti, rk, rl)
    return out


# -- partial swap teams ------------------------------------------------------


def _check_pst_args(s: Schedule, ti: int, tj: int, r: int) -> None:
    _distinct(ti, tj, "teams")
    if s.opp[ti, r] == tj:
        raise ValueError(f"teams {ti} and {tj} meet in round {r}; the chain cannot start there")


def _closed(length: int, ti: int, tj: int, r: int, rounds: int) -> int:
    if length < 0:
        raise ChainError(f"PST chain ({ti}, {tj}, {r}) exceeded {rounds} rounds")
    return length


def pst_rounds(s: Schedule, ti: int, tj: int, r: int, early_exit: bool = False) -> list[int]:
    """Rounds a PST chain would exchange, in order."""
    _check_pst_args(s, ti, tj, r)
    seq = np.empty(s.rounds, dtype=np.int64)
    length, _ = K.pst_chain(s.opp, s.home, ti, tj, r, early_exit, seq)
    return seq[:_closed(length, ti, tj, r, s.rounds)].tolist()


def simulate_pst(s: Schedule, ti: int, tj: int, r: int) -> SwapList:
    rounds = pst_rounds(s, ti, tj, r)
    entries = tuple(SwapEntry(q, int(s.opp[tj, q]), bool(s.home[tj, q])) for q in rounds)
    return SwapList(entries, team=tj, partner=ti)


def partial_swap_teams(s: Schedule, ti: int, tj: int, r: int,
                       allow_early_exit: bool = False,
                       rng: np.random.Generator | None = None) -> Schedule:
    _check_pst_args(s, ti, tj, r)
    out = s.copy()
    seq = np.empty(s.rounds, dtype=np.int64)
    length, _ = K.partial_swap_teams(out.opp, out.home, ti, tj, r, allow_early_exit, _rng(rng), seq)
    _closed(length, ti, tj, r, s.rounds)
    return out


# -- lookahead planning ------------------------------------------------------


def lookahead_candidates(sl: SwapList, exclude: Sequence[int] = ()) -> dict[int, tuple[int, int]]:
    """Teams seen at least twice in the swaplist, mapped to their widest pair of positions."""
    first: dict[int, int] = {}
    last: dict[int, int] = {}
    for i, e in enumerate(sl):
        first.setdefault(e.opponent, i)
        last[e.opponent] = i
    banned = set(exclude)
    if sl.partner is not None:
        banned.add(sl.partner)
    return {
        t: (first[t], last[t])
        for t in first
        if t not in banned and last[t] - first[t] >= 2
    }


def enumerate_plans(sl: SwapList, p_look: float, p_exit: float,
                    allow_early_exit: bool = True,
                    exclude: Sequence[int] = ()) -> list[LookaheadPlan]:
    """Every way of running the chain described by ``sl``, with its cost.

    This is the readable reference for the compiled planner behind
    :func:`select_plan`.
    """
    size = len(sl)
    final = sl[size - 1]
    exits = []
    if allow_early_exit:
        exits = [i for i in range(size - 1)
                 if sl[i].opponent == final.opponent and sl[i].home != final.home]

    plans = [LookaheadPlan(None, None, None, size, float(size))]
    for e in exits:
        plans.append(LookaheadPlan(None, None, e, e + 1, e + 1 + p_exit))
    for t, (a, b) in lookahead_candidates(sl, exclude).items():
        swaps = size - (b - a)
        plans.append(LookaheadPlan(t, (a, b), None, swaps, swaps + p_look))
        for e in exits:
            if e > b:
                swaps = a + 1 + e - b
                plans.append(LookaheadPlan(t, (a, b), e, swaps, swaps + p_look + p_exit))
    return plans


def _plan_from_row(row: np.ndarray, cost: float) -> LookaheadPlan:
    t, a, b, e, swaps = (int(v) for v in row)
    return LookaheadPlan(
        lookahead=t if t >= 0 else None,
        lookahead_span=(a, b) if t >= 0 else None,
        early_exit_index=e if e >= 0 else None,
        predicted_swaps=swaps,
        cost=float(cost),
    )


def select_plan(sl: SwapList, p_look: float, p_exit: float,
                rng: np.random.Generator | None = None,
                allow_early_exit: bool = True,
                exclude: Sequence[int] = ()) -> LookaheadPlan:
    """Cheapest plan for the chain; ties are broken uniformly at random."""
    if not len(sl):
        raise ValueError("empty swaplist")
    sw_opp = np.array([e.opponent for e in sl], dtype=np.int64)
    sw_home = np.array([e.home for e in sl], dtype=bool)
    n = int(max(sw_opp.max(), sl.partner or 0, *exclude, 0)) + 1
    banned = np.zeros(n, dtype=bool)
    banned[list(exclude)] = True
    if sl.partner is not None:
        banned[sl.partner] = True
    row = np.empty(5, dtype=np.int64)
    cost = K.select_plan(sw_opp, sw_home, len(sl), n, banned, float(p_look), float(p_exit),
                         allow_early_exit, _rng(rng), row)
    return _plan_from_row(row, cost)


@dataclass(frozen=True)
class LpstOutcome:
    schedule: Schedule
    plan: LookaheadPlan
    exchanged: list[int]


def lpst_trace(s: Schedule, ti: int, tj: int, r: int, p_look: float = 2.0,
               p_exit: float = 3.0, rng: np.random.Generator | None = None,
               lookahead: int | None = None,
               allow_early_exit: bool = True) -> LpstOutcome:
    """Run lookahead PST and report the plan and the rounds exchanged.

    ``lookahead`` forces the lookahead opponent (with no early exit)
    instead of planning.
    """
    _check_pst_args(s, ti, tj, r)
    rng = _rng(rng)
    sl = simulate_pst(s, ti, tj, r)
    if lookahead is None:
        plan = select_plan(sl, p_look, p_exit, rng, allow_early_exit)
    else:
        span = lookahead_candidates(sl).get(lookahead)
        if span is None:
            raise ValueError(f"team {lookahead} is not a lookahead candidate")
        swaps = len(sl) - (span[1] - span[0])
        plan = LookaheadPlan(lookahead, span, None, swaps, swaps + p_look)
    out = s.copy()
    seq = np.empty(s.rounds, dtype=np.int64)
    tl = -1 if plan.lookahead is None else plan.lookahead
    length = K.run_plan(out.opp, out.home, ti, tj, r, tl, plan.early_exit_index is not None, rng, seq)
    _closed(length, ti, tj, r, s.rounds)
    return LpstOutcome(out, plan, seq[:length].tolist())


def lpst(s: Schedule, ti: int, tj: int, r: int, p_look: float = 2.0, p_exit: float = 3.0,
         rng: np.random.Generator | None = None) -> Schedule:
    return lpst_trace(s, ti, tj, r, p_look, p_exit, rng).schedule


# -- proposals ---------------------------------------------------------------


def move_is_valid(s: Schedule, spec: MoveSpec) -> bool:
    n, rounds = s.n, s.rounds
    k, a = spec.kind, spec.args
    if k in (MoveKind.SWAP_HOMES, MoveKind.SWAP_TEAMS, MoveKind.SWAP_TEAMS_VN):
        return len(a) == 2 and a[0] != a[1] and all(0 <= t < n for t in a)
    if k is MoveKind.SWAP_ROUNDS:
        return len(a) == 2 and a[0] != a[1] and all(0 <= q < rounds for q in a)
    if len(a) != 3:
        return False
    if k is MoveKind.PARTIAL_SWAP_ROUNDS:
        t, rk, rl = a
        return 0 <= t < n and rk != rl and 0 <= rk < rounds and 0 <= rl < rounds
    ti, tj, r = a
    return (ti != tj and 0 <= ti < n and 0 <= tj < n and 0 <= r < rounds
            and s.opp[ti, r] != tj)


def _spec_from_args(kind_code: int, args: np.ndarray) -> MoveSpec:
    kind = KIND_ORDER[kind_code]
    width = 2 if kind in (MoveKind.SWAP_HOMES, MoveKind.SWAP_ROUNDS,
                          MoveKind.SWAP_TEAMS, MoveKind.SWAP_TEAMS_VN) else 3
    return MoveSpec(kind, tuple(int(v) for v in args[:width]))


def sample_move(s: Schedule, weights: Mapping[MoveKind, float],
                rng: np.random.Generator | None = None) -> MoveSpec:
    """Draw a move kind from ``weights``, then uniformly valid arguments for it.

    Argument tuples that break the kind's preconditions are redrawn; after
    a bounded number of failures a swap-homes move is returned instead.
    """
    args = np.empty(3, dtype=np.int64)
    code = K.sample_move(s.opp, cumulative_weights(weights), _rng(rng), args)
    return _spec_from_args(code, args)


def apply_move(s: Schedule, spec: MoveSpec, rng: np.random.Generator | None = None,
               p_look: float = 2.0, p_exit: float = 3.0) -> Schedule:
    if not move_is_valid(s, spec):
        raise ValueError(f"invalid arguments for {spec.kind.value}: {spec.args}")
    out = s.copy()
    args = np.array((*spec.args, -1)[:3], dtype=np.int64)
    seq = np.empty(s.rounds, dtype=np.int64)
    plan = np.empty(5, dtype=np.int64)
    ok = K.apply_move(out.opp, out.home, KIND_ORDER.index(spec.kind), args,
                      float(p_look), float(p_exit), _rng(rng), seq, plan)
    if not ok:
        raise ChainError(f"{spec.kind.value}{spec.args}: chain did not close")
    return out


def random_walk(s: Schedule, steps: int, weights: Mapping[MoveKind, float] | None = None,
                rng: np.random.Generator | None = None,
                p_look: float = 2.0, p_exit: float = 3.0) -> Schedule:
    """``steps`` sampled moves applied in sequence, all accepted."""
    out = s.copy()
    cum = cumulative_weights(DEFAULT_WEIGHTS if weights is None else weights)
    if not K.random_walk(out.opp, out.home, cum, steps, float(p_look), float(p_exit), _rng(rng)):
        raise ChainError("random walk hit a chain that did not close")
    return out

