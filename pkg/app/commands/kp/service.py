"""KP and nKdV job service"""
from fractions import Fraction

import structlog

from app.commands.router import JobOutcome
from app.config.settings import settings
from app.models.jobs import JobConfig
from app.services.psdo import (
    PsDO,
    inverse_monic,
    kp_rhs,
    nkdv_rhs,
    nth_root,
    random_kp_operator,
    random_psdo,
    random_root_operator,
)
from app.services.series import TruncSeries
from app.utils.base_service import CertificateService, agree, seeded_generators, vanishes

logger = structlog.get_logger()

VAR = "x"
KP_FLOWS = (1, 2, 3)


def kdv_flow_term(u: TruncSeries) -> TruncSeries:
    """(u_xxx + 3 u_x u + 3 u u_x) / 4"""
    ux = u.derive(VAR)
    return (ux.derive(VAR).derive(VAR) + ux * u * 3 + u * ux * 3) * Fraction(1, 4)


def expected_kdv_hierarchy(u: TruncSeries, m: int) -> TruncSeries:
    """Order-0 coefficient of [(M^(m/2))_+, M] for M = ∂^2 + u and m = 1, 2, 3"""
    if m == 1:
        return u.derive(VAR)
    if m == 2:
        return u.zero_like()
    return kdv_flow_term(u)


def run_kp_check(config: JobConfig) -> JobOutcome:
    """Pseudodifferential calculus and the KP/nKdV flow identities on seeded operators"""
    service = CertificateService("kp-check")
    floor = config.floor if config.floor is not None else settings.psdo_floor
    order, dim = config.orders[0], config.dim
    rngs = seeded_generators(config.seed, config.instances)
    triples = [
        tuple(random_psdo(rng, VAR, kmax, floor, dim, order, bound=config.bound) for kmax in (1, 2, 1))
        for rng in rngs
    ]
    roots = [random_root_operator(rng, VAR, config.n, dim, order, bound=config.bound) for rng in rngs]
    kp_ops = [random_kp_operator(rng, VAR, floor, dim, order, bound=config.bound) for rng in rngs]
    kdv_ops = [random_root_operator(rng, VAR, 2, dim, order, bound=config.bound) for rng in rngs]

    service.certify(
        "composition-associativity", "Eq (A1) composition",
        lambda: agree(((P * Q) * R, P * (Q * R)) for P, Q, R in triples),
    )

    def monic_inverse():
        pairs = []
        for M in roots:
            inv = inverse_monic(M, floor)
            one = PsDO.identity(M.template, VAR)
            pairs.append((M.compose(inv), one))
            pairs.append((inv.compose(M), one))
        return agree(pairs)

    service.certify("monic-inverse", "§A1 calculus, monic inverse", monic_inverse)

    def root_power():
        pairs, tails = [], []
        for M in roots:
            L = nth_root(M, floor)
            power = L.power(config.n)
            pairs.append((power, M))
            tails.extend(power.split()[1].coeffs.values())
        passed, detail = agree(pairs)
        tail_passed, tail_detail = vanishes(tails) if tails else (True, {})
        return passed and tail_passed, {**detail, "tail": tail_detail}

    service.certify("root-power", "Eq (A4) root", root_power)

    def tangency():
        for L in kp_ops:
            for m in KP_FLOWS:
                kp_rhs(L, m)
        return True, {"flows": list(KP_FLOWS), "instances": len(kp_ops)}

    service.certify("kp-tangency", "Eq (A2) order <= -1", tangency)

    def kdv_hierarchy():
        pairs, others = [], []
        for M in kdv_ops:
            u = M.coeff(0)
            for m in KP_FLOWS:
                rhs = nkdv_rhs(M, m)
                pairs.append((rhs.coeff(0), expected_kdv_hierarchy(u, m)))
                others.extend(c for k, c in rhs.coeffs.items() if k != 0)
        passed, detail = agree(pairs)
        nonzero = sum(1 for c in others if not c.is_zero())
        return passed and nonzero == 0, {**detail, "extra_nonzero": nonzero}

    service.certify("kdv-hierarchy", "Eq (A6) identity", kdv_hierarchy)

    dump = "".join(f"instance {i}:\n{nth_root(M, floor).to_dump()}" for i, M in enumerate(roots))
    logger.info("KP calculus checked", floor=floor, instances=config.instances)
    return JobOutcome(report=service.report("kp-check", config.summary()), dump=dump)
