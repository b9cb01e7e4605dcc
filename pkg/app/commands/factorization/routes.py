"""Factorization routes"""
from app.commands.factorization.service import run_factorize, run_vieta
from app.commands.router import CommandRouter, JobOutcome, arg
from app.models.jobs import JobConfig

router = CommandRouter(tags=["factorization"])

INSTANCE_ARGS = (
    arg("--n", type=int, help="Kernel size / number of roots"),
    arg("--instances", type=int, help="Number of seeded instances"),
    arg("--bound", type=int, help="Random integer entries lie in [-bound, bound]"),
)


@router.command(
    "factorize", "factor kernel operators",
    *INSTANCE_ARGS,
    arg("--degree", type=int, help="Degree of the random polynomial kernel"),
)
def factorize_route(config: JobConfig) -> JobOutcome:
    """Kernel operator, quasideterminant form and factorization of seeded kernels"""
    return run_factorize(config)


@router.command("vieta", "compute noncommutative Vieta coefficients", *INSTANCE_ARGS)
def vieta_route(config: JobConfig) -> JobOutcome:
    """Coefficients from roots, cross-checked through the exponential kernel"""
    return run_vieta(config)
