import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ttp_lpst.neighborhood import swap_homes
from ttp_lpst.schedule import (
    Schedule,
    ViolationReport,
    combine,
    count_atmost_violations,
    count_norepeat_violations,
    is_double_round_robin,
    is_pairing_consistent,
    objective,
    team_distance,
    team_distances,
    total_distance,
    violations,
)
from tests import oracles, strategies
from tests.conftest import GAL10_FOOTER, random_instance, rows_to_schedule, schedule_to_rows, zero_instance


def venues_only(rows_home):
    home = np.array(rows_home, dtype=bool)
    return Schedule(np.zeros(home.shape, dtype=np.int64), home)


def test_gal10_sched_valid(gal10_sched):
    assert is_pairing_consistent(gal10_sched)
    assert is_double_round_robin(gal10_sched)
    assert violations(gal10_sched) == ViolationReport(0, 0)


def test_gal10_sched_distances(gal10_sched, gal10):
    assert team_distances(gal10_sched, gal10) == GAL10_FOOTER
    assert team_distance(gal10_sched, gal10, 0) == 404
    assert total_distance(gal10_sched, gal10) == 4535


def test_flipped_single_game_breaks_drr(gal10_sched):
    s = gal10_sched.copy()
    o = s.opp[0, 0]
    s.home[0, 0] ^= True
    s.home[o, 0] ^= True
    assert is_pairing_consistent(s)
    assert not is_double_round_robin(s)


def test_pst8_completion_is_drr(pst8):
    assert is_double_round_robin(pst8)
    assert oracles.is_drr(schedule_to_rows(pst8))


def test_pst8_ab_not_repeated(pst8):
    a_meets_b = pst8.meeting_rounds(0, 1)
    assert a_meets_b == [0, 7]
    assert count_norepeat_violations(pst8) == oracles.violation_counts(schedule_to_rows(pst8))[1]


@pytest.mark.parametrize("row, expected", [
    ([1, 1, 1, 1, 0, 1], 1),
    ([1, 1, 1, 1, 1, 1], 3),
    ([1, 1, 1, 0, 0, 0], 0),
    ([0, 0, 0, 0, 0, 1], 2),
])
def test_atmost_counting_rule(row, expected):
    s = venues_only([row, [1, 0, 1, 0, 1, 0]])
    assert count_atmost_violations(s) == expected


def test_runs_do_not_wrap():
    assert count_atmost_violations(venues_only([[1, 1, 0, 1, 1, 1]])) == 0


def test_single_adjacent_repeat():
    # six teams; only A and B meet in two consecutive rounds (3 and 4)
    rounds = [[(0, 2), (1, 3), (4, 5)], [(0, 3), (1, 4), (2, 5)], [(0, 4), (1, 5), (2, 3)],
              [(0, 1), (2, 4), (3, 5)], [(0, 1), (2, 5), (3, 4)]]
    opp = np.zeros((6, 5), dtype=np.int64)
    for r, games in enumerate(rounds):
        for a, b in games:
            opp[a, r], opp[b, r] = b, a
    home = np.zeros_like(opp, dtype=bool)
    for r, games in enumerate(rounds):
        for a, _ in games:
            home[a, r] = True
    s = Schedule(opp, home)
    assert is_pairing_consistent(s)
    assert count_norepeat_violations(s) == 1


def test_repeat_counted_once_per_pair():
    s = Schedule(np.array([[1, 1, 2], [0, 0, 3], [3, 3, 0], [2, 2, 1]]), np.zeros((4, 3), dtype=bool))
    # pairs (0,1) and (2,3) each repeat once
    assert count_norepeat_violations(s) == 2
    assert oracles.violation_counts(schedule_to_rows(s))[1] == 2


@settings(max_examples=100)
@given(strategies.drr_schedules())
def test_counts_match_oracle(s):
    assert (count_atmost_violations(s), count_norepeat_violations(s)) == \
        oracles.violation_counts(schedule_to_rows(s))


@settings(max_examples=60)
@given(strategies.drr_schedules(), strategies.seeds)
def test_distance_matches_path_walk(s, seed):
    inst = random_instance(s.n, np.random.default_rng(seed))
    rows = schedule_to_rows(s)
    dist = inst.dist.tolist()
    assert team_distances(s, inst) == [oracles.path_walk_distance(rows, dist, t) for t in range(s.n)]


def test_zero_matrix(gal10_sched):
    assert total_distance(gal10_sched, zero_instance(10)) == 0
    assert team_distances(gal10_sched, zero_instance(10)) == [0] * 10


def test_drr_agrees_with_oracle_on_all_n4():
    schedules = oracles.all_drr_schedules(4)
    assert len(schedules) == 5760
    for rows in schedules[::97]:
        assert is_double_round_robin(rows_to_schedule(rows))


def test_objective_examples(gal10_sched, gal10):
    assert objective(gal10_sched, gal10, 100.0) == 4535
    assert combine(0, 1, 100.0) == 100.0
    assert combine(4535, 0, 1.0) == 4535


def test_objective_infeasible_uses_composite(gal10, gal10_sched):
    s = swap_homes(gal10_sched, 0, 5)
    v = violations(s).total
    assert v > 0
    d = total_distance(s, gal10)
    f = 1 + math.sqrt(v) * math.log(v) / 2
    assert objective(s, gal10, 50.0) == pytest.approx(math.sqrt(d * d + (50.0 * f) ** 2), rel=1e-12)


def test_objective_rejects_nonpositive_weight(gal10_sched, gal10):
    with pytest.raises(ValueError):
        objective(gal10_sched, gal10, 0.0)


@given(st.integers(0, 10**6), st.floats(0.01, 1e6))
def test_objective_monotone_in_violations(d, w):
    vals = [combine(d, v, w) for v in range(1, 51)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
