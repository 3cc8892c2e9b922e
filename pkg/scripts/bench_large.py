"""Run the bench harness over the large Galaxy instances plus NL10 and CIRC10.

Results are informational; the budgets here are far below what the largest
instances need for competitive distances.

    python scripts/bench_large.py --steps 2000000 --seeds 0,1,2
"""

import argparse
import shutil
import sys
import tempfile
from pathlib import Path

from ttp_lpst.cli import main as ttp

ROOT = Path(__file__).resolve().parents[1]
INSTANCES = ("gal36", "gal38", "gal40", "nl10", "circ10")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=2_000_000)
    ap.add_argument("--seeds", default="0")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--instances", default=",".join(INSTANCES))
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        for name in args.instances.split(","):
            shutil.copy(ROOT / "data" / "instances" / f"{name}.txt", tmp)
        return ttp(["bench", tmp, "--seeds", args.seeds, "--steps", str(args.steps),
                    "--jobs", str(args.jobs)])


if __name__ == "__main__":
    sys.exit(main())
