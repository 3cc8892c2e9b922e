"""Traveling Tournament Problem search with lookahead partial swap teams."""

from ttp_lpst.annealer import AnnealParams, AnnealResult, random_schedule, run_anneal
from ttp_lpst.instance_io import (
    Instance,
    parse_instance,
    parse_schedule,
    parse_solution,
    render_schedule,
    write_solution,
)
from ttp_lpst.neighborhood import (
    LookaheadPlan,
    MoveKind,
    MoveSpec,
    SwapList,
    lpst,
    partial_swap_rounds,
    partial_swap_teams,
    sample_move,
    select_plan,
    simulate_pst,
    swap_homes,
    swap_rounds,
    swap_teams,
)
from ttp_lpst.schedule import (
    Schedule,
    ViolationReport,
    is_double_round_robin,
    objective,
    total_distance,
    violations,
)

__all__ = [
    "AnnealParams", "AnnealResult", "Instance", "LookaheadPlan", "MoveKind", "MoveSpec",
    "Schedule", "SwapList", "ViolationReport", "is_double_round_robin", "lpst", "objective",
    "parse_instance", "parse_schedule", "parse_solution", "partial_swap_rounds",
    "partial_swap_teams", "random_schedule", "render_schedule", "run_anneal", "sample_move",
    "select_plan", "simulate_pst", "swap_homes", "swap_rounds", "swap_teams", "total_distance",
    "violations", "write_solution",
]
