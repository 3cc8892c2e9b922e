"""How often each plan type is chosen, and how many exchanges lookahead saves.

Samples PST chains from schedules reached by a short annealing run (random
schedules have a rigid mirrored structure that rarely offers early exits).

    python scripts/lookahead_stats.py --instance data/instances/gal10.txt --chains 20000
"""

import argparse
from collections import Counter
from pathlib import Path

import numpy as np

from ttp_lpst.annealer import AnnealParams, run_anneal
from ttp_lpst.instance_io import parse_instance
from ttp_lpst.neighborhood import select_plan, simulate_pst

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instance", type=Path, default=ROOT / "data" / "instances" / "gal10.txt")
    ap.add_argument("--chains", type=int, default=20_000)
    ap.add_argument("--p-look", type=float, default=2.0)
    ap.add_argument("--p-exit", type=float, default=3.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    inst = parse_instance(args.instance.read_text())
    rng = np.random.default_rng(args.seed)
    schedules = [run_anneal(inst, AnnealParams(steps=50_000, seed=k)).best for k in range(10)]

    kinds = Counter()
    full = planned = 0
    for i in range(args.chains):
        s = schedules[i % len(schedules)]
        ti, tj = rng.choice(s.n, 2, replace=False).tolist()
        r = int(rng.integers(s.rounds))
        if s.opp[ti, r] == tj:
            continue
        sl = simulate_pst(s, ti, tj, r)
        plan = select_plan(sl, args.p_look, args.p_exit, rng)
        kinds[("lookahead" if plan.lookahead is not None else "plain")
              + ("+exit" if plan.early_exit_index is not None else "")] += 1
        full += len(sl)
        planned += plan.predicted_swaps

    total = sum(kinds.values())
    print("plan share")
    for k, v in kinds.most_common():
        print(f"{k} {v / total:.4f}")
    print(f"# mean exchanges: plain chain {full / total:.2f}, planned {planned / total:.2f}")


if __name__ == "__main__":
    main()
