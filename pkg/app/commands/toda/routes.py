"""Toda routes"""
from app.commands.router import CommandRouter, JobOutcome, arg
from app.commands.toda.service import run_liouville, run_toda_flow, run_toda_solve
from app.models.jobs import JobConfig

router = CommandRouter(tags=["toda"])

DATA_ARGS = (
    arg("--instances", type=int, help="Number of seeded instances"),
    arg("--degree", type=int, help="Degree of the random polynomial initial data"),
    arg("--bound", type=int, help="Random integer entries lie in [-bound, bound]"),
)


@router.command(
    "toda-solve", "solve toda system",
    arg("--type", choices=["A", "B", "C"], help="System type"),
    arg("--n", type=int, help="Number of unknowns of the type A system (2k for C, 2k+1 for B)"),
    *DATA_ARGS,
)
def toda_solve_route(config: JobConfig) -> JobOutcome:
    """Solve and certify the Toda system of the requested type"""
    return run_toda_solve(config)


@router.command(
    "toda-flow", "factor toda flow",
    arg("--n", type=int, help="Kernel size"),
    *DATA_ARGS,
)
def toda_flow_route(config: JobConfig) -> JobOutcome:
    """Solutions with phi(u, 0) = 1 and the recomposed Lax operator"""
    return run_toda_flow(config)


@router.command("liouville", "solve liouville equation", *DATA_ARGS)
def liouville_route(config: JobConfig) -> JobOutcome:
    return run_liouville(config)
