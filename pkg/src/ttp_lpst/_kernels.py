"""Compiled move and evaluation kernels.

All kernels work in place on the ``opp`` (int64) and ``home`` (bool) grids
of shape ``(n, rounds)``. The public wrappers live in
:mod:`ttp_lpst.neighborhood` and :mod:`ttp_lpst.annealer`.
"""

import math

import numba
import numpy as np

jit = numba.njit(cache=True, nogil=True)

# move kind codes, in the order of ``neighborhood.KIND_ORDER``
SWAP_HOMES = 0
SWAP_ROUNDS = 1
SWAP_TEAMS = 2
SWAP_TEAMS_VN = 3
PARTIAL_SWAP_ROUNDS = 4
PARTIAL_SWAP_TEAMS = 5
LPST = 6
NUM_KINDS = 7

MAX_STREAK = 3
MAX_RETRIES = 100


@jit
def swap_homes(opp, home, ti, tj):
    for r in range(opp.shape[1]):
        if opp[ti, r] == tj:
            home[ti, r] = not home[ti, r]
            home[tj, r] = not home[tj, r]


@jit
def swap_rounds(opp, home, rk, rl):
    for t in range(opp.shape[0]):
        o = opp[t, rk]
        opp[t, rk] = opp[t, rl]
        opp[t, rl] = o
        h = home[t, rk]
        home[t, rk] = home[t, rl]
        home[t, rl] = h


@jit
def swap_teams(opp, home, ti, tj, violation_neutral):
    for r in range(opp.shape[1]):
        x = opp[ti, r]
        if x == tj:
            continue
        y = opp[tj, r]
        hx = home[ti, r]
        opp[ti, r] = y
        home[ti, r] = home[tj, r]
        opp[tj, r] = x
        home[tj, r] = hx
        opp[y, r] = ti
        opp[x, r] = tj
    if violation_neutral:
        swap_homes(opp, home, ti, tj)


@jit
def round_closure(opp, t, rk, rl, member):
    """Mark in ``member`` the teams that must swap ``rk``/``rl`` with ``t``."""
    n = opp.shape[0]
    member[:] = False
    stack = np.empty(n, dtype=np.int64)
    top = 0
    member[t] = True
    stack[top] = t
    top += 1
    while top:
        top -= 1
        u = stack[top]
        for o in (opp[u, rk], opp[u, rl]):
            if not member[o]:
                member[o] = True
                stack[top] = o
                top += 1


@jit
def partial_swap_rounds(opp, home, ti, rk, rl):
    member = np.empty(opp.shape[0], dtype=np.bool_)
    round_closure(opp, ti, rk, rl, member)
    for t in range(opp.shape[0]):
        if member[t]:
            o = opp[t, rk]
            opp[t, rk] = opp[t, rl]
            opp[t, rl] = o
            h = home[t, rk]
            home[t, rk] = home[t, rl]
            home[t, rl] = h


@jit
def pst_chain(opp, home, ti, tj, r, early_exit, seq):
    """Write the chain's rounds into ``seq``.

    Returns ``(length, exited)``; a length of -1 means the chain did not
    close within ``rounds`` steps.
    """
    n, rounds = opp.shape
    where = np.empty(2 * n, dtype=np.int64)
    for q in range(rounds):
        where[2 * opp[ti, q] + home[ti, q]] = q
    x = opp[ti, r]
    hx = home[ti, r]
    cur = r
    for i in range(rounds):
        seq[i] = cur
        y = opp[tj, cur]
        hy = home[tj, cur]
        if y == x:
            if hy == hx:
                return i + 1, False
            if early_exit:
                return i + 1, True
        cur = where[2 * y + hy]
    return -1, False


@jit
def _exchange(opp, home, ti, tj, q):
    x = opp[ti, q]
    y = opp[tj, q]
    hx = home[ti, q]
    opp[ti, q] = y
    home[ti, q] = home[tj, q]
    opp[tj, q] = x
    home[tj, q] = hx
    opp[y, q] = ti
    opp[x, q] = tj


@jit
def _flip(opp, home, t, q):
    home[t, q] = not home[t, q]
    o = opp[t, q]
    home[o, q] = not home[o, q]


@jit
def partial_swap_teams(opp, home, ti, tj, r, early_exit, rng, seq):
    """Run the PST chain. Returns ``(length, exited)`` like :func:`pst_chain`.

    On an early exit ``ti`` holds two games against its original opponent
    ``x`` at the wrong venue and ``tj`` two at the right one. A fair coin
    flips either the two received games (``ti`` in the exit round, ``tj`` in
    ``r``) or the two untouched ones, mirrored on ``x``.
    """
    x = opp[ti, r]
    length, exited = pst_chain(opp, home, ti, tj, r, early_exit, seq)
    if length < 0:
        return length, exited
    for i in range(length):
        _exchange(opp, home, ti, tj, seq[i])
    if exited:
        exit_round = seq[length - 1]
        if rng.random() < 0.5:
            _flip(opp, home, ti, exit_round)
            _flip(opp, home, tj, r)
        else:
            for q in range(opp.shape[1]):
                if opp[ti, q] == x and q != exit_round:
                    _flip(opp, home, ti, q)
                    break
            for q in range(opp.shape[1]):
                if opp[tj, q] == x and q != r:
                    _flip(opp, home, tj, q)
                    break
    return length, exited


@jit
def select_plan(sw_opp, sw_home, size, n, banned, p_look, p_exit, allow_exit, rng, out):
    """Choose the cheapest way to run a chain with the given swaplist.

    Candidates: the full chain; an early exit at an earlier entry holding
    the final opponent with the other venue; a lookahead on any team seen
    at least twice (widest pair of positions, gap >= 2), which skips the
    entries after its first position up to its second; and a lookahead
    followed by an early exit beyond its second position. Each costs its
    number of exchanges plus ``p_look`` and/or ``p_exit``. Ties are broken
    uniformly at random.

    Writes ``(lookahead, first, second, exit_index, swaps)`` into ``out``
    (-1 for absent parts) and returns the plan's cost.
    """
    first = np.full(n, -1, dtype=np.int64)
    last = np.full(n, -1, dtype=np.int64)
    order = np.empty(size, dtype=np.int64)
    nteams = 0
    for i in range(size):
        t = sw_opp[i]
        if first[t] < 0:
            first[t] = i
            order[nteams] = t
            nteams += 1
        last[t] = i
    fx = sw_opp[size - 1]
    fh = sw_home[size - 1]
    exits = np.empty(size, dtype=np.int64)
    nexit = 0
    if allow_exit:
        for i in range(size - 1):
            if sw_opp[i] == fx and sw_home[i] != fh:
                exits[nexit] = i
                nexit += 1

    cap = 1 + nexit + nteams * (1 + nexit)
    plans = np.empty((cap, 5), dtype=np.int64)
    costs = np.empty(cap, dtype=np.float64)
    m = 0
    plans[m] = (-1, -1, -1, -1, size)
    costs[m] = size
    m += 1
    for k in range(nexit):
        e = exits[k]
        plans[m] = (-1, -1, -1, e, e + 1)
        costs[m] = e + 1 + p_exit
        m += 1
    for k in range(nteams):
        t = order[k]
        a = first[t]
        b = last[t]
        if banned[t] or b - a < 2:
            continue
        swaps = size - (b - a)
        plans[m] = (t, a, b, -1, swaps)
        costs[m] = swaps + p_look
        m += 1
        for j in range(nexit):
            e = exits[j]
            if e > b:
                swaps = a + 1 + e - b
                plans[m] = (t, a, b, e, swaps)
                costs[m] = swaps + p_look + p_exit
                m += 1

    best = costs[0]
    for i in range(1, m):
        if costs[i] < best:
            best = costs[i]
    ntied = 0
    for i in range(m):
        if costs[i] == best:
            ntied += 1
    pick = 0
    if ntied > 1:
        pick = rng.integers(0, ntied)
    for i in range(m):
        if costs[i] == best:
            if pick == 0:
                out[:] = plans[i]
                return best
            pick -= 1
    return best


@jit
def lpst(opp, home, ti, tj, r, p_look, p_exit, allow_exit, rng, seq, plan):
    """Lookahead partial swap teams; ``plan`` receives the chosen plan.

    Returns the number of exchanges performed (-1 on a corrupt chain).
    """
    n = opp.shape[0]
    size, _ = pst_chain(opp, home, ti, tj, r, False, seq)
    if size < 0:
        return -1
    sw_opp = np.empty(size, dtype=np.int64)
    sw_home = np.empty(size, dtype=np.bool_)
    for i in range(size):
        sw_opp[i] = opp[tj, seq[i]]
        sw_home[i] = home[tj, seq[i]]
    banned = np.zeros(n, dtype=np.bool_)
    banned[ti] = True
    select_plan(sw_opp, sw_home, size, n, banned, p_look, p_exit, allow_exit, rng, plan)
    return run_plan(opp, home, ti, tj, r, plan[0], plan[3] >= 0, rng, seq)


@jit
def run_plan(opp, home, ti, tj, r, lookahead, early_exit, rng, seq):
    if lookahead >= 0:
        swap_homes(opp, home, tj, lookahead)
    length, _ = partial_swap_teams(opp, home, ti, tj, r, early_exit, rng, seq)
    if lookahead >= 0:
        swap_homes(opp, home, tj, lookahead)
    return length


@jit
def draw_kind(cum, rng):
    u = rng.random() * cum[-1]
    for k in range(cum.shape[0]):
        if u < cum[k]:
            return k
    return cum.shape[0] - 1


@jit
def _two(rng, m):
    a = rng.integers(0, m)
    b = rng.integers(0, m - 1)
    if b >= a:
        b += 1
    return a, b


@jit
def sample_move(opp, cum, rng, args):
    """Draw a kind by the cumulative weights and valid arguments into ``args``."""
    n, rounds = opp.shape
    kind = draw_kind(cum, rng)
    for _ in range(MAX_RETRIES):
        if kind == SWAP_ROUNDS:
            a, b = _two(rng, rounds)
            args[0], args[1], args[2] = a, b, -1
            return kind
        if kind == PARTIAL_SWAP_ROUNDS:
            t = rng.integers(0, n)
            a, b = _two(rng, rounds)
            args[0], args[1], args[2] = t, a, b
            return kind
        a, b = _two(rng, n)
        if kind in (SWAP_HOMES, SWAP_TEAMS, SWAP_TEAMS_VN):
            args[0], args[1], args[2] = a, b, -1
            return kind
        r = rng.integers(0, rounds)
        if opp[a, r] != b:
            args[0], args[1], args[2] = a, b, r
            return kind
    a, b = _two(rng, n)
    args[0], args[1], args[2] = a, b, -1
    return SWAP_HOMES


@jit
def apply_move(opp, home, kind, args, p_look, p_exit, rng, seq, plan):
    """Apply a move in place; returns False if a PST chain failed to close."""
    a0, a1, a2 = args[0], args[1], args[2]
    if kind == SWAP_HOMES:
        swap_homes(opp, home, a0, a1)
    elif kind == SWAP_ROUNDS:
        swap_rounds(opp, home, a0, a1)
    elif kind == SWAP_TEAMS:
        swap_teams(opp, home, a0, a1, False)
    elif kind == SWAP_TEAMS_VN:
        swap_teams(opp, home, a0, a1, True)
    elif kind == PARTIAL_SWAP_ROUNDS:
        partial_swap_rounds(opp, home, a0, a1, a2)
    elif kind == PARTIAL_SWAP_TEAMS:
        length, _ = partial_swap_teams(opp, home, a0, a1, a2, False, rng, seq)
        return length >= 0
    else:
        return lpst(opp, home, a0, a1, a2, p_look, p_exit, True, rng, seq, plan) >= 0
    return True


@jit
def random_walk(opp, home, cum, steps, p_look, p_exit, rng):
    """Apply ``steps`` sampled moves in place; False if a chain failed to close."""
    seq = np.empty(opp.shape[1], dtype=np.int64)
    plan = np.empty(5, dtype=np.int64)
    args = np.empty(3, dtype=np.int64)
    for _ in range(steps):
        kind = sample_move(opp, cum, rng, args)
        if not apply_move(opp, home, kind, args, p_look, p_exit, rng, seq, plan):
            return False
    return True


# -- evaluation --------------------------------------------------------------


@jit
def team_terms(opp, home, dist, t):
    """Travel of ``t``, its streak excess and its repeat count."""
    rounds = opp.shape[1]
    here = t
    d = 0
    streak = 0
    excess = 0
    repeats = 0
    for r in range(rounds):
        there = t if home[t, r] else opp[t, r]
        d += dist[here, there]
        here = there
        if r > 0 and home[t, r] == home[t, r - 1]:
            streak += 1
        else:
            streak = 1
        if streak > MAX_STREAK:
            excess += 1
        if r > 0 and opp[t, r] == opp[t, r - 1]:
            repeats += 1
    d += dist[here, t]
    return d, excess, repeats


@jit
def evaluate(opp, home, dist, team_d, team_a, team_rep):
    """Fill the per-team caches; returns ``(distance, violations)``."""
    total = 0
    viol = 0
    rep = 0
    for t in range(opp.shape[0]):
        d, a, p = team_terms(opp, home, dist, t)
        team_d[t] = d
        team_a[t] = a
        team_rep[t] = p
        total += d
        viol += a
        rep += p
    return total, viol + rep // 2


@jit
def violation_scale(v):
    if v <= 0:
        return 0.0
    return 1.0 + math.sqrt(v) * math.log(v) / 2.0


@jit
def combine(d, v, w):
    if v == 0:
        return float(d)
    p = w * violation_scale(v)
    return math.sqrt(float(d) * d + p * p)


@jit
def anneal(opp, home, cand_opp, cand_home, dist, k0, k1, t0, beta, w, cum, p_look, p_exit,
           target, rng, team_d, team_a, team_rep, cand_d, cand_a, cand_rep,
           best_opp, best_home, best_meta, stats):
    """Run proposals ``k0 .. k1-1`` of one chain.

    ``opp``/``home`` hold the current schedule and the ``team_*`` arrays its
    per-team terms; only rows that a move changed are re-evaluated.
    ``best_meta`` is ``[best distance, best feasible, reached target]``.
    ``stats[kind]`` counts proposals and acceptances. Returns the index of
    the next proposal.
    """
    n, rounds = opp.shape
    seq = np.empty(rounds, dtype=np.int64)
    plan = np.empty(5, dtype=np.int64)
    args = np.empty(3, dtype=np.int64)
    cur_d = 0
    cur_a = 0
    cur_rep = 0
    for t in range(n):
        cur_d += team_d[t]
        cur_a += team_a[t]
        cur_rep += team_rep[t]
    cur_cost = combine(cur_d, cur_a + cur_rep // 2, w)
    k = k0
    while k < k1:
        if best_meta[2]:
            break
        temp = t0 * beta ** k
        cand_opp[:, :] = opp
        cand_home[:, :] = home
        kind = sample_move(opp, cum, rng, args)
        ok = apply_move(cand_opp, cand_home, kind, args, p_look, p_exit, rng, seq, plan)
        k += 1
        stats[kind, 0] += 1
        if not ok:
            raise RuntimeError("partial swap teams chain did not close")
        d = cur_d
        a = cur_a
        rep = cur_rep
        for t in range(n):
            changed = False
            for r in range(rounds):
                if cand_opp[t, r] != opp[t, r] or cand_home[t, r] != home[t, r]:
                    changed = True
                    break
            if changed:
                td, ta, tr = team_terms(cand_opp, cand_home, dist, t)
                cand_d[t] = td
                cand_a[t] = ta
                cand_rep[t] = tr
                d += td - team_d[t]
                a += ta - team_a[t]
                rep += tr - team_rep[t]
            else:
                cand_d[t] = team_d[t]
                cand_a[t] = team_a[t]
                cand_rep[t] = team_rep[t]
        v = a + rep // 2
        cost = combine(d, v, w)
        delta = cost - cur_cost
        if delta <= 0 or rng.random() < math.exp(-delta / temp):
            stats[kind, 1] += 1
            opp[:, :] = cand_opp
            home[:, :] = cand_home
            team_d[:] = cand_d
            team_a[:] = cand_a
            team_rep[:] = cand_rep
            cur_d, cur_a, cur_rep, cur_cost = d, a, rep, cost
            feasible = v == 0
            if (feasible and not best_meta[1]) or (feasible == best_meta[1] and d < best_meta[0]):
                best_opp[:, :] = opp
                best_home[:, :] = home
                best_meta[0] = d
                best_meta[1] = feasible
                if feasible and target >= 0 and d <= target:
                    best_meta[2] = 1
    return k
