"""KP routes"""
from app.commands.kp.service import run_kp_check
from app.commands.router import CommandRouter, JobOutcome, arg
from app.models.jobs import JobConfig

router = CommandRouter(tags=["kp"])


@router.command(
    "kp-check", "check pseudodifferential calculus",
    arg("--n", type=int, help="Order of the operator whose root is taken"),
    arg("--floor", type=int, help="Lowest power of ∂ kept"),
    arg("--instances", type=int, help="Number of seeded instances"),
    arg("--bound", type=int, help="Random integer entries lie in [-bound, bound]"),
)
def kp_check_route(config: JobConfig) -> JobOutcome:
    """Associativity, roots, tangency and the KdV hierarchy"""
    return run_kp_check(config)
