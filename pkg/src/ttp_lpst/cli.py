"""Command line: ``solve``, ``validate``, ``score`` and ``bench``.

Exit codes: 0 success, 1 input error, 2 search budget exhausted without a
feasible schedule, 3 validation failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

from ttp_lpst.annealer import AnnealParams, run_anneal
from ttp_lpst.instance_io import (
    Instance,
    ParseError,
    parse_instance,
    read_schedule,
    render_schedule,
    write_solution,
)
from ttp_lpst.neighborhood import MoveKind
from ttp_lpst.schedule import is_double_round_robin, team_distances, violations

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_BUDGET = 2
EXIT_INVALID = 3

log = logging.getLogger("ttp_lpst")


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    instance: Path
    out: Path | None = None
    overrides: dict = field(default_factory=dict)
    report: str = "human"


def _read(path: Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def load_instance(path: Path) -> Instance:
    try:
        return parse_instance(_read(path))
    except ParseError as exc:
        raise InputError(f"{path}: {exc}") from None


def load_schedule(path: Path, inst: Instance):
    try:
        return read_schedule(_read(path), inst)
    except ParseError as exc:
        raise InputError(f"{path}: {exc}") from None


def parse_weights(text: str) -> dict[MoveKind, float]:
    """``"LPST:0.66,SwapHomes:0.34"`` -> weights by move kind."""
    out = {}
    for item in text.split(","):
        name, _, val = item.partition(":")
        out[MoveKind(name.strip())] = float(val)
    return out


_FIELD_TYPES = {"steps": int, "seed": int, "chains": int, "target": int,
                "t0": float, "beta": float, "w": float, "t0_factor": float, "w_factor": float,
                "p_look": float, "p_exit": float, "weights": parse_weights}


def coerce(key: str, value: str):
    if key not in _FIELD_TYPES:
        raise InputError(f"unknown parameter {key!r}")
    try:
        return _FIELD_TYPES[key](value)
    except (ValueError, KeyError) as exc:
        raise InputError(f"bad value for {key}: {value!r} ({exc})") from None


def read_config(path: Path) -> dict:
    """Flat ``key = value`` file with ``#`` comments, keys named like AnnealParams fields."""
    out = {}
    for lno, line in enumerate(_read(path).splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InputError(f"{path}: line {lno}: expected key=value")
        try:
            out[key.strip()] = coerce(key.strip(), value.strip())
        except InputError as exc:
            raise InputError(f"{path}: line {lno}: {exc}") from None
    return out


def build_params(cfg: RunConfig) -> AnnealParams:
    known = {f.name for f in fields(AnnealParams)}
    params = AnnealParams(**{k: v for k, v in cfg.overrides.items() if k in known})
    try:
        params.validate()
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return params


def summary_line(distance: int, feasible: bool, proposals: int) -> str:
    return f"distance={distance} feasible={str(feasible).lower()} proposals={proposals}"


def cmd_solve(cfg: RunConfig, workers: int = 1) -> int:
    inst = load_instance(cfg.instance)
    params = build_params(cfg)

    def progress(chain, step, temp, cost, best):
        log.info("chain %d step %d temp %.4g cost %.1f best %s", chain, step, temp, cost, best)

    res = run_anneal(inst, params, progress if log.isEnabledFor(logging.INFO) else None,
                     stride=max(params.steps // 20, 1), workers=workers)
    out = cfg.out or Path(Path(cfg.instance).stem + "_best")
    table = render_schedule(res.best, inst)
    Path(f"{out}.txt").write_text(table, encoding="utf-8")
    Path(f"{out}.sol").write_text(write_solution(res.best), encoding="utf-8")
    if cfg.report == "human":
        print(table, end="")
    print(summary_line(res.best_distance, res.best_feasible, res.proposals))
    return EXIT_OK if res.best_feasible else EXIT_BUDGET


def cmd_validate(instance: Path, schedule: Path) -> int:
    inst = load_instance(instance)
    s = load_schedule(schedule, inst)
    drr = is_double_round_robin(s)
    rep = violations(s)
    print(f"drr={str(drr).lower()} atmost={rep.atmost} norepeat={rep.norepeat}")
    return EXIT_OK if drr and rep.feasible else EXIT_INVALID


def cmd_score(instance: Path, schedule: Path) -> int:
    inst = load_instance(instance)
    s = load_schedule(schedule, inst)
    per = team_distances(s, inst)
    print(" ".join(str(d) for d in per) + f" total={sum(per)}")
    return EXIT_OK


def _bench_row(job):
    name, inst, seed, overrides = job
    params = AnnealParams(**{**overrides, "seed": seed, "chains": 1})
    start = time.perf_counter()
    try:
        res = run_anneal(inst, params)
    except Exception as exc:  # recorded per row; one bad run must not sink the table
        return f"{name} {seed} error - {time.perf_counter() - start:.3f} {type(exc).__name__}"
    return (f"{name} {seed} {res.best_distance} {str(res.best_feasible).lower()} "
            f"{time.perf_counter() - start:.3f}")


def bench_instances(directory: Path) -> list[tuple[str, Instance]]:
    paths = sorted(Path(directory).glob("*.txt"))
    if not paths:
        raise InputError(f"{directory}: no *.txt instance files")
    return [(p.stem, load_instance(p)) for p in paths]


def cmd_bench(directory: Path, seeds: list[int], overrides: dict, jobs: int = 1) -> int:
    instances = bench_instances(directory)
    work = [(name, inst, seed, overrides) for name, inst in instances for seed in seeds]
    print("# instance seed distance feasible seconds")
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for row in pool.map(_bench_row, work):
                print(row, flush=True)
    else:
        for job in work:
            print(_bench_row(job), flush=True)
    return EXIT_OK


def _param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--steps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--t0", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--w", type=float, help="violation weight (default: w-factor x mean distance)")
    p.add_argument("--t0-factor", dest="t0_factor", type=float,
                   help="initial temperature as a multiple of the mean distance")
    p.add_argument("--w-factor", dest="w_factor", type=float)
    p.add_argument("--p-look", dest="p_look", type=float)
    p.add_argument("--p-exit", dest="p_exit", type=float)
    p.add_argument("--target", type=int, help="stop once a feasible schedule this short is found")
    p.add_argument("--weights", type=parse_weights, help="e.g. LPST:0.66,SwapHomes:0.34")
    p.add_argument("--config", type=Path, help="key=value file; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ttp", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="anneal a schedule for an instance")
    p.add_argument("instance", type=Path)
    p.add_argument("--out", type=Path, help="output prefix; writes PREFIX.txt and PREFIX.sol")
    p.add_argument("--chains", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=("human", "machine"), default="human")
    _param_flags(p)

    p = sub.add_parser("validate", help="check double round-robin and constraints")
    p.add_argument("instance", type=Path)
    p.add_argument("schedule", type=Path)

    p = sub.add_parser("score", help="per-team and total travel distance")
    p.add_argument("instance", type=Path)
    p.add_argument("schedule", type=Path)

    p = sub.add_parser("bench", help="best distances over instances x seeds")
    p.add_argument("directory", type=Path)
    p.add_argument("--seeds", type=lambda t: [int(x) for x in t.split(",")], default=[0])
    p.add_argument("--jobs", type=int, default=1)
    _param_flags(p)
    return parser


_PARAM_KEYS = ("steps", "seed", "t0", "beta", "w", "t0_factor", "w_factor", "p_look", "p_exit",
               "target", "weights", "chains")


def _overrides(args: argparse.Namespace) -> dict:
    out = read_config(args.config) if args.config else {}
    out.update({k: getattr(args, k) for k in _PARAM_KEYS
                if getattr(args, k, None) is not None})
    return out


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    try:
        if args.command == "solve":
            cfg = RunConfig(args.instance, args.out, _overrides(args), args.format)
            return cmd_solve(cfg, workers=args.workers)
        if args.command == "validate":
            return cmd_validate(args.instance, args.schedule)
        if args.command == "score":
            return cmd_score(args.instance, args.schedule)
        overrides = _overrides(args)
        overrides.pop("seed", None)
        return cmd_bench(args.directory, args.seeds, overrides, args.jobs)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
