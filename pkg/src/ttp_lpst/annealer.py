"""Simulated annealing over double round-robin schedules, without reheats.

Each chain starts from a random schedule, proposes moves from the weighted
neighborhood, accepts by the Metropolis rule on the penalized objective and
cools geometrically once per proposal. Feasible incumbents always beat
infeasible ones.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from typing import Callable, Mapping

import numpy as np

from ttp_lpst import _kernels as K
from ttp_lpst.instance_io import Instance
from ttp_lpst.neighborhood import DEFAULT_WEIGHTS, KIND_ORDER, MoveKind, cumulative_weights
from ttp_lpst.schedule import Schedule

Observer = Callable[[int, int, float, float, "int | None"], None]

# temperature falls by this many orders of magnitude over the step budget
DECADES = 4.0


@dataclass
class AnnealParams:
    """Search configuration. ``None`` fields are derived from the instance.

    ``t0`` defaults to ``t0_factor`` times the mean off-diagonal distance,
    ``beta`` to the rate that cools by ``DECADES`` orders of magnitude over
    ``steps``, and ``w`` to ``w_factor`` times the mean distance.
    """

    steps: int = 1_000_000
    t0: float | None = None
    beta: float | None = None
    w: float | None = None
    t0_factor: float = 4.4
    w_factor: float = 20.0
    weights: Mapping[MoveKind, float] = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    p_look: float = 2.0
    p_exit: float = 3.0
    seed: int = 0
    chains: int = 1
    target: int | None = None

    def validate(self) -> None:
        if self.steps < 0:
            raise ValueError("steps must be non-negative")
        if self.t0 is not None and self.t0 <= 0:
            raise ValueError("t0 must be positive")
        if self.beta is not None and not 0 < self.beta < 1:
            raise ValueError("beta must lie in (0, 1)")
        if self.w is not None and self.w <= 0:
            raise ValueError("w must be positive")
        if self.t0_factor <= 0 or self.w_factor <= 0:
            raise ValueError("t0_factor and w_factor must be positive")
        if self.chains < 1:
            raise ValueError("chains must be at least 1")
        if any(v < 0 for v in self.weights.values()):
            raise ValueError("proposal weights must be non-negative")
        if not math.isclose(sum(self.weights.values()), 1.0, abs_tol=1e-9):
            raise ValueError("proposal weights must sum to 1")

    def resolved(self, inst: Instance) -> AnnealParams:
        n = inst.n
        mean_d = float(inst.dist.sum()) / (n * (n - 1))
        return replace(
            self,
            t0=self.t0 if self.t0 is not None else max(self.t0_factor * mean_d, 1.0),
            beta=self.beta if self.beta is not None else 10.0 ** (-DECADES / max(self.steps, 1)),
            w=self.w if self.w is not None else max(self.w_factor * mean_d, 1.0),
        )


@dataclass
class KindStats:
    proposed: int = 0
    accepted: int = 0


@dataclass
class AnnealResult:
    best: Schedule
    best_distance: int
    best_feasible: bool
    proposals: int
    acceptances: int
    per_kind: dict[MoveKind, KindStats]
    exhausted: bool
    chain: int = 0
    seconds: float = 0.0


def random_schedule(inst: Instance, rng: np.random.Generator) -> Schedule:
    """A random double round-robin, usually infeasible.

    Circle method under a shuffled team order with random venues, mirrored
    with flipped venues for the second half, then scrambled by random round
    swaps and venue swaps.
    """
    n = inst.n
    half = n - 1
    perm = rng.permutation(n).tolist()
    opp = np.empty((n, 2 * half), dtype=np.int64)
    home = np.empty((n, 2 * half), dtype=bool)
    ring = perm[1:]
    for r in range(half):
        pairs = [(perm[0], ring[0])] + [(ring[i], ring[-i]) for i in range(1, n // 2)]
        for a, b in pairs:
            ha = bool(rng.random() < 0.5)
            for q, h in ((r, ha), (r + half, not ha)):
                opp[a, q], opp[b, q] = b, a
                home[a, q], home[b, q] = h, not h
        ring = ring[-1:] + ring[:-1]
    for _ in range(4 * n):
        if rng.random() < 0.5:
            K.swap_rounds(opp, home, *rng.choice(2 * half, 2, replace=False).tolist())
        else:
            K.swap_homes(opp, home, *rng.choice(n, 2, replace=False).tolist())
    return Schedule(opp, home)


def accept(delta: float, temp: float, rng: np.random.Generator) -> bool:
    """Metropolis rule."""
    if temp <= 0:
        raise ValueError("temperature must be positive")
    if delta <= 0:
        return True
    return bool(rng.random() < math.exp(-delta / temp))


def temperature(params: AnnealParams, k: int) -> float:
    return params.t0 * params.beta ** k


def chain_seeds(seed: int, chains: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(chains)


def _better(d: int, feasible: bool, best_d: int, best_feasible: bool) -> bool:
    if feasible != best_feasible:
        return feasible
    return d < best_d


def run_chain(inst: Instance, params: AnnealParams, chain: int,
              seed: np.random.SeedSequence | int,
              progress: Observer | None = None, stride: int = 10_000) -> AnnealResult:
    """One annealing chain; ``params`` must already be valid."""
    p = params.resolved(inst)
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    dist = np.ascontiguousarray(inst.dist)
    n = inst.n

    cur = random_schedule(inst, rng)
    opp, home = cur.opp.copy(), cur.home.copy()
    cand_opp, cand_home = np.empty_like(opp), np.empty_like(home)
    team_d = np.empty(n, dtype=np.int64)
    team_a = np.empty(n, dtype=np.int64)
    team_rep = np.empty(n, dtype=np.int64)
    d, v = K.evaluate(opp, home, dist, team_d, team_a, team_rep)
    target = -1 if p.target is None else int(p.target)
    best_meta = np.array([d, v == 0, v == 0 and 0 <= target and d <= target], dtype=np.int64)
    best_opp, best_home = opp.copy(), home.copy()
    stats = np.zeros((len(KIND_ORDER), 2), dtype=np.int64)
    scratch = [np.empty(n, dtype=np.int64) for _ in range(3)]
    cum = cumulative_weights(p.weights)

    k = 0
    step = p.steps if progress is None else max(1, stride)
    while k < p.steps and not best_meta[2]:
        k = K.anneal(opp, home, cand_opp, cand_home, dist, k, min(k + step, p.steps),
                     float(p.t0), float(p.beta), float(p.w), cum, float(p.p_look),
                     float(p.p_exit), target, rng, team_d, team_a, team_rep, *scratch,
                     best_opp, best_home, best_meta, stats)
        if progress is not None:
            cur_cost = K.combine(int(team_d.sum()), int(team_a.sum() + team_rep.sum() // 2), float(p.w))
            progress(chain, k, temperature(p, k), cur_cost,
                     int(best_meta[0]) if best_meta[1] else None)

    return AnnealResult(
        best=Schedule(best_opp, best_home),
        best_distance=int(best_meta[0]),
        best_feasible=bool(best_meta[1]),
        proposals=k,
        acceptances=int(stats[:, 1].sum()),
        per_kind={kind: KindStats(int(stats[i, 0]), int(stats[i, 1]))
                  for i, kind in enumerate(KIND_ORDER)},
        exhausted=not best_meta[2],
        chain=chain,
        seconds=time.perf_counter() - start,
    )


def _run_chain_args(args):
    return run_chain(*args)


def run_anneal(inst: Instance, params: AnnealParams, progress: Observer | None = None,
               stride: int = 10_000, workers: int = 1) -> AnnealResult:
    """Run ``params.chains`` independent chains and keep the best result.

    Chains run in worker processes when ``workers > 1``; the progress
    observer is only supported in-process.
    """
    params.validate()
    seeds = chain_seeds(params.seed, params.chains)
    if workers > 1 and params.chains > 1:
        if progress is not None:
            raise ValueError("progress observers need workers=1")
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_chain_args,
                                    [(inst, params, c, sd) for c, sd in enumerate(seeds)]))
    else:
        results = [run_chain(inst, params, c, sd, progress, stride) for c, sd in enumerate(seeds)]

    top = results[0]
    for res in results[1:]:
        if _better(res.best_distance, res.best_feasible, top.best_distance, top.best_feasible):
            top = res
    per_kind = {k: KindStats(sum(r.per_kind[k].proposed for r in results),
                             sum(r.per_kind[k].accepted for r in results)) for k in MoveKind}
    return replace(
        top,
        proposals=sum(r.proposals for r in results),
        acceptances=sum(r.acceptances for r in results),
        per_kind=per_kind,
        exhausted=all(r.exhausted for r in results),
        seconds=sum(r.seconds for r in results),
    )


PARAM_FIELDS = {f.name for f in fields(AnnealParams)}
