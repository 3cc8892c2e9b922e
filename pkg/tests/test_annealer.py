import math
import time

import numpy as np
import pytest

from ttp_lpst import _kernels as K
from ttp_lpst.annealer import (
    AnnealParams,
    accept,
    chain_seeds,
    random_schedule,
    run_anneal,
    run_chain,
    temperature,
)
from ttp_lpst.neighborhood import MoveKind, cumulative_weights
from ttp_lpst.schedule import is_double_round_robin, total_distance, violations
from tests import oracles
from tests.conftest import rows_to_schedule, schedule_to_rows

TOY_OPTIMUM = 55


@pytest.fixture(scope="module")
def toy_optimum(toy):
    return oracles.brute_force_optimum(toy.dist.tolist())


def test_toy_oracle_value(toy_optimum):
    assert toy_optimum == TOY_OPTIMUM


def test_accept_trivial():
    rng = np.random.default_rng(0)
    assert accept(-5.0, 0.001, rng)
    assert accept(0.0, 1.0, rng)
    with pytest.raises(ValueError):
        accept(1.0, 0.0, rng)


def test_accept_frequency():
    rng = np.random.default_rng(1)
    hits = sum(accept(3.0, 3.0, rng) for _ in range(100_000))
    assert abs(hits / 100_000 - math.exp(-1)) <= 0.01


def test_temperature_law(toy):
    p = AnnealParams(steps=1000, t0=50.0).resolved(toy)
    assert p.beta == pytest.approx(10 ** (-4 / 1000))
    for k in (0, 1, 17, 999, 1000):
        assert temperature(p, k) == pytest.approx(50.0 * p.beta ** k, rel=1e-9)
    assert temperature(p, 1000) == pytest.approx(50.0 * 1e-4, rel=1e-9)


def test_observer_temperatures(toy):
    seen = []
    params = AnnealParams(steps=500, t0=10.0, beta=0.99)
    run_anneal(toy, params, lambda c, k, temp, cost, best: seen.append((k, temp)), stride=50)
    assert [k for k, _ in seen] == list(range(50, 501, 50))
    for k, temp in seen:
        assert temp == pytest.approx(10.0 * 0.99 ** k, rel=1e-9)


@pytest.mark.parametrize("bad", [
    dict(steps=-1), dict(t0=0.0), dict(beta=1.0), dict(beta=0.0), dict(w=-1.0), dict(chains=0),
    dict(weights={MoveKind.LPST: 0.5}), dict(weights={MoveKind.LPST: 1.5, MoveKind.SWAP_HOMES: -0.5}),
])
def test_params_validation(bad):
    with pytest.raises(ValueError):
        AnnealParams(**bad).validate()


def test_resolved_defaults(gal10):
    p = AnnealParams(steps=100).resolved(gal10)
    mean_d = gal10.dist.sum() / 90
    assert p.w == pytest.approx(AnnealParams().w_factor * mean_d)
    assert p.t0 > 0 and 0 < p.beta < 1


def test_random_schedule_is_drr(gal10):
    for seed in range(50):
        assert is_double_round_robin(random_schedule(gal10, np.random.default_rng(seed)))


def test_random_schedules_differ(gal10):
    seen = {random_schedule(gal10, np.random.default_rng(seed)).opp.tobytes() for seed in range(100)}
    assert len(seen) == 100


def test_random_schedule_n4_enumerated(toy):
    every = {tuple(map(tuple, rows)) for rows in oracles.all_drr_schedules(4)}
    for seed in range(30):
        rows = schedule_to_rows(random_schedule(toy, np.random.default_rng(seed)))
        assert tuple(map(tuple, rows)) in every


def test_zero_steps(gal10):
    res = run_anneal(gal10, AnnealParams(steps=0, seed=4))
    start = random_schedule(gal10, np.random.default_rng(chain_seeds(4, 1)[0]))
    assert res.proposals == 0 and res.acceptances == 0
    assert res.best == start
    assert res.best_distance == total_distance(start, gal10)
    assert res.best_feasible == violations(start).feasible


def test_determinism(gal10):
    p = AnnealParams(steps=20_000, seed=9)
    a, b = run_anneal(gal10, p), run_anneal(gal10, p)
    assert a.best == b.best
    assert (a.best_distance, a.proposals, a.acceptances) == (b.best_distance, b.proposals, b.acceptances)
    assert a.per_kind == b.per_kind


def test_result_invariants(gal10):
    res = run_anneal(gal10, AnnealParams(steps=50_000, seed=2, chains=2))
    assert res.acceptances <= res.proposals == 100_000
    assert sum(s.proposed for s in res.per_kind.values()) == res.proposals
    assert all(s.accepted <= s.proposed for s in res.per_kind.values())
    assert res.per_kind[MoveKind.SWAP_TEAMS_VN].proposed == 0
    assert is_double_round_robin(res.best)
    assert res.best_distance == total_distance(res.best, gal10)
    if res.best_feasible:
        assert violations(res.best).feasible


def test_chains_use_distinct_seeds(gal10):
    p = AnnealParams(steps=2000, seed=1)
    seeds = chain_seeds(1, 3)
    runs = [run_chain(gal10, p, c, sd) for c, sd in enumerate(seeds)]
    assert len({r.best.opp.tobytes() for r in runs}) == 3
    best = run_anneal(gal10, AnnealParams(steps=2000, seed=1, chains=3))
    assert best.best_distance == min(r.best_distance for r in runs if r.best_feasible == best.best_feasible)


def test_worker_pool_matches_in_process(toy):
    p = AnnealParams(steps=3000, seed=5, chains=2)
    a, b = run_anneal(toy, p), run_anneal(toy, p, workers=2)
    assert a.best == b.best and a.best_distance == b.best_distance


def test_feasible_incumbent_never_worsens(gal10):
    bests = []
    run_anneal(gal10, AnnealParams(steps=200_000, seed=3),
               lambda c, k, temp, cost, best: bests.append(best), stride=5000)
    feasible = [b for b in bests if b is not None]
    assert feasible == sorted(feasible, reverse=True)
    assert bests.index(feasible[0]) + len(feasible) == len(bests)


def test_target_stops_early(toy):
    res = run_anneal(toy, AnnealParams(steps=1_000_000, seed=0, target=10_000))
    assert res.best_feasible and not res.exhausted
    assert res.proposals < 1_000_000


def test_incremental_matches_scratch(gal10):
    # drive the kernel in short bursts and re-evaluate from scratch between them
    p = AnnealParams(steps=20_000, seed=0).resolved(gal10)
    rng = np.random.default_rng(0)
    s = random_schedule(gal10, rng)
    opp, home = s.opp.copy(), s.home.copy()
    n = gal10.n
    dist = np.ascontiguousarray(gal10.dist)
    arrays = [np.empty(n, dtype=np.int64) for _ in range(6)]
    K.evaluate(opp, home, dist, *arrays[:3])
    best_opp, best_home = opp.copy(), home.copy()
    meta = np.array([10**9, 0, 0], dtype=np.int64)
    stats = np.zeros((7, 2), dtype=np.int64)
    cum = cumulative_weights(p.weights)
    k = 0
    while k < p.steps:
        k = K.anneal(opp, home, np.empty_like(opp), np.empty_like(home), dist, k, k + 97,
                     p.t0, p.beta, p.w, cum, p.p_look, p.p_exit, -1, rng, *arrays,
                     best_opp, best_home, meta, stats)
        fresh = [np.empty(n, dtype=np.int64) for _ in range(3)]
        d, v = K.evaluate(opp, home, dist, *fresh)
        for cached, scratch in zip(arrays[:3], fresh):
            assert np.array_equal(cached, scratch)
        cur = rows_to_schedule(schedule_to_rows(type(s)(opp, home)))
        assert d == total_distance(cur, gal10)
        assert v == violations(cur).total
        assert is_double_round_robin(cur)


@pytest.mark.parametrize("seed", range(10))
def test_toy_optimum_reached(toy, toy_optimum, seed):
    start = time.perf_counter()
    res = run_anneal(toy, AnnealParams(steps=20_000, seed=seed))
    assert time.perf_counter() - start < 5.0
    assert res.best_feasible
    assert res.best_distance == toy_optimum


def test_nl4_optimum():
    from tests.conftest import load_instance
    inst = load_instance("nl4")
    res = run_anneal(inst, AnnealParams(steps=20_000, seed=0))
    assert res.best_distance == oracles.brute_force_optimum(inst.dist.tolist()) == 8276
