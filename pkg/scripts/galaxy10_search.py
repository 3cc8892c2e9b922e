"""Repeated annealing runs on Galaxy10; prints one row per seed and saves the best schedule.

    python scripts/galaxy10_search.py --runs 12 --steps 40000000 --out results/gal10
"""

import argparse
import time
from pathlib import Path

from ttp_lpst.annealer import AnnealParams, run_anneal
from ttp_lpst.instance_io import parse_instance, render_schedule, write_solution

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instance", type=Path, default=ROOT / "data" / "instances" / "gal10.txt")
    ap.add_argument("--runs", type=int, default=12)
    ap.add_argument("--first-seed", type=int, default=0)
    ap.add_argument("--steps", type=int, default=40_000_000)
    ap.add_argument("--target", type=int, default=None, help="stop a run once this distance is reached")
    ap.add_argument("--out", type=Path, default=None, help="prefix for the best schedule (.txt/.sol)")
    args = ap.parse_args()

    inst = parse_instance(args.instance.read_text())
    best = None
    print("seed distance feasible accepted seconds")
    for seed in range(args.first_seed, args.first_seed + args.runs):
        start = time.perf_counter()
        res = run_anneal(inst, AnnealParams(steps=args.steps, seed=seed, target=args.target))
        print(f"{seed} {res.best_distance} {str(res.best_feasible).lower()} "
              f"{res.acceptances} {time.perf_counter() - start:.1f}", flush=True)
        if res.best_feasible and (best is None or res.best_distance < best.best_distance):
            best = res

    if best is None:
        print("# no feasible schedule found")
        return
    print(f"# best {best.best_distance}")
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        Path(f"{args.out}.txt").write_text(render_schedule(best.best, inst))
        Path(f"{args.out}.sol").write_text(write_solution(best.best))


if __name__ == "__main__":
    main()
