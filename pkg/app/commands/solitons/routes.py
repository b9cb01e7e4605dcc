"""Soliton routes"""
from app.commands.router import CommandRouter, JobOutcome, arg
from app.commands.solitons.service import run_kdv_soliton, run_sech_check, run_tau_check
from app.models.jobs import JobConfig

router = CommandRouter(tags=["solitons"])

SPEC_ARGS = (
    arg("--N", type=int, help="Number of solitons"),
    arg("--alphas", nargs="+", help="Matrix literals alpha_1..alpha_N, e.g. '2; 1 0 ; 0 2 ;'"),
    arg("--amps", nargs="+", help="Matrix literals a_1..a_N"),
    arg("--instances", type=int, help="Number of seeded instances"),
    arg("--bound", type=int, help="Random integer entries lie in [-bound, bound]"),
)
GRID_ARGS = (
    arg("--radius", type=float, help="Bound on |x + t| over the grid; same as --half-width radius/2"),
    arg("--half-width", dest="half_width", type=float, help="Sample grid covers [-h, h]^2"),
    arg("--points", type=int, help="Grid points per axis"),
)


@router.command(
    "kdv-soliton", "build kdv solitons",
    *SPEC_ARGS,
    *GRID_ARGS,
    arg("--m", type=int, help="Index of the symbolic time t_m"),
    arg("--floor", type=int, help="Lowest power of ∂ kept in the dressed operator"),
    arg("--kp", dest="kdv", action="store_const", const=False, help="Draw independent beta_s (KP solitons)"),
)
def kdv_soliton_route(config: JobConfig) -> JobOutcome:
    """Dressing method with certificates for the operator identities and the KdV equation"""
    return run_kdv_soliton(config)


@router.command("tau-check", "compare with determinant form", *SPEC_ARGS)
def tau_check_route(config: JobConfig) -> JobOutcome:
    return run_tau_check(config)


@router.command(
    "sech-check", "compare with closed-form soliton",
    arg("--alpha", help="Rational alpha"),
    arg("--a", help="Rational amplitude a > 0"),
    arg("--tolerance", type=float, help="Maximum allowed deviation"),
    *GRID_ARGS,
)
def sech_check_route(config: JobConfig) -> JobOutcome:
    """Numeric comparison on a grid; the only check done in floating point"""
    return run_sech_check(config)
