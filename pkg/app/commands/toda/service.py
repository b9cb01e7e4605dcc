"""Toda job services"""
from typing import List

import structlog

from app.commands.router import JobOutcome
from app.models.jobs import JobConfig
from app.services.algebra import AlgebraElement
from app.services.diffop import random_kernel
from app.services.series import TruncSeries
from app.services.toda import (
    U,
    UV,
    V,
    TodaInitial,
    TodaSolution,
    kernel_rank_check,
    liouville_psi_one,
    liouville_residual,
    liouville_solve,
    nilpotent_exponential,
    random_initial,
    random_symmetric_initial,
    rank_kernel,
    residual_table,
    rs_decomposition,
    symmetry_holds,
    toda_delta,
    toda_flow_factorization,
    toda_infinite_steps,
    toda_lax_residual,
    toda_residual_A,
    toda_residual_B,
    toda_residual_C,
    toda_solve_A,
    toda_solve_sym,
)
from app.utils.base_service import CertificateService, agree, seeded_generators, vanishes

logger = structlog.get_logger()


def _slices(solution: TodaSolution, init: TodaInitial):
    """(phi_i(u, 0), psi_i) and (phi_i(0, v), eta_i) pairs"""
    for phi, eta, psi in zip(solution.phi, init.eta, init.psi):
        yield phi.restrict(V), psi
        yield phi.restrict(U), eta


def _certify_type_A(
    service: CertificateService,
    inits: List[TodaInitial],
    solutions: List[TodaSolution],
    system_residuals: List[List[TruncSeries]],
) -> None:
    n = inits[0].n
    service.certify(
        "toda-residual", "Eq (1) residual",
        lambda: vanishes(r for rs in system_residuals for r in rs),
    )
    service.certify(
        "lax-residual", "Eq (2.2) residual",
        lambda: vanishes(r for s in solutions for r in toda_lax_residual(s.phi)),
    )
    service.certify(
        "initial-slices", "Thm 2.3 initial data",
        lambda: agree(pair for s, init in zip(solutions, inits) for pair in _slices(s, init)),
    )

    def delta_identity():
        pairs = []
        for s, init in zip(solutions, inits):
            dt = s.delta or toda_delta(init.psi)
            pairs.extend(zip(
                [x for row in dt.Delta.map(lambda x: x.derive(U)).entries for x in row],
                [x for row in (dt.Delta * dt.Theta).entries for x in row],
            ))
        return agree(pairs)

    service.certify("delta-identity", "Thm 2.3 proof, Delta' = Delta Theta", delta_identity)

    # |Y_1|..|Y_(n+1)| of every phi_1, shared by the recursion and both rank checks
    steps = {}

    def infinite_steps(index: int) -> List[TruncSeries]:
        if index not in steps:
            steps[index] = toda_infinite_steps(solutions[index].phi[0], n + 1)
        return steps[index]

    service.certify(
        "infinite-toda-recursion", "Eq (2.8)",
        lambda: agree(
            (infinite_steps(k)[i], s.phi[i]) for k, s in enumerate(solutions) for i in range(n)
        ),
    )

    def rank():
        at_n = [kernel_rank_check(s.phi[0], n, top=infinite_steps(k)[n]) for k, s in enumerate(solutions)]
        detail = {"rank": n, "instances": len(at_n), "vanishing": sum(at_n)}
        return all(at_n), detail

    service.certify("kernel-rank", "Prop 2.5", rank)
    if n > 1:
        def minimal_rank():
            below = [
                kernel_rank_check(s.phi[0], n - 1, top=infinite_steps(k)[n - 1]) for k, s in enumerate(solutions)
            ]
            return not any(below), {"rank": n - 1, "instances": len(below), "vanishing": sum(below)}

        service.certify("kernel-rank-minimal", "Prop 2.5", minimal_rank)

    def rs_form():
        pairs = []
        for s, init in zip(solutions, inits):
            ps, qs = rs_decomposition(init)
            pairs.append((rank_kernel(ps, qs, s.phi[0].orders), s.phi[0]))
        return agree(pairs)

    service.certify("rs-form", "Eq (2.7)", rs_form)


def _certify_symmetric(
    service: CertificateService,
    kind: str,
    inits: List[TodaInitial],
    solutions: List[TodaSolution],
    system_residuals: List[List[TruncSeries]],
) -> None:
    service.certify(
        f"toda-residual-{kind}", "Eq (2) residual" if kind == "C" else "Eq (3) residual",
        lambda: vanishes(r for rs in system_residuals for r in rs),
    )
    service.certify(
        "toda-residual", "Eq (1) residual",
        lambda: vanishes(r for s in solutions for r in toda_residual_A(s.full)),
    )

    def symmetry():
        held = [symmetry_holds(s.full) for s in solutions]
        return all(held), {"instances": len(held), "symmetric": sum(held)}

    service.certify("involution-symmetry", "phi_(n+1-i) = (phi_i^*)^-1", symmetry)
    if kind == "C" and inits[0].n == 1:
        service.certify(
            "liouville-agreement", "Eq (2.12)",
            lambda: agree(
                (liouville_solve(init.eta[0], init.psi[0], init.eta[0].constant_term()), s.phi[0])
                for s, init in zip(solutions, inits)
            ),
        )


def run_toda_solve(config: JobConfig) -> JobOutcome:
    """Seeded Toda initial value problems of type A, B or C"""
    kind = config.type
    service = CertificateService(f"toda-solve-{kind}")
    rngs = seeded_generators(config.seed, config.instances)
    if kind == "A":
        inits = [random_initial(rng, config.n, config.dim, config.degree, config.orders, config.bound) for rng in rngs]
        solutions = [toda_solve_A(init) for init in inits]
        system_residuals = [toda_residual_A(s.phi) for s in solutions]
        _certify_type_A(service, inits, solutions, system_residuals)
    else:
        inits = [
            random_symmetric_initial(rng, kind, config.k, config.dim, config.degree, config.orders) for rng in rngs
        ]
        solutions = [toda_solve_sym(init, kind) for init in inits]
        residuals = toda_residual_C if kind == "C" else toda_residual_B
        system_residuals = [residuals(s.phi) for s in solutions]
        _certify_symmetric(service, kind, inits, solutions, system_residuals)

    dump = "".join(
        s.to_dump(seed=config.seed) + "residuals:\n" + residual_table(rs) for s, rs in zip(solutions, system_residuals)
    )
    logger.info("Toda job finished", type=kind, n=config.n, instances=config.instances)
    return JobOutcome(report=service.report("toda-solve", config.summary()), dump=dump)


def run_toda_flow(config: JobConfig) -> JobOutcome:
    """phi(u, 0) = 1 solutions as flows on factorizations of the kernel operator"""
    service = CertificateService("toda-flow")
    u_order, v_order = config.orders
    flows = [
        toda_flow_factorization(
            random_kernel(rng, config.n, config.dim, v_order, config.degree, config.bound, V), u_order
        )
        for rng in seeded_generators(config.seed, config.instances)
    ]

    service.certify(
        "toda-residual", "Eq (1) residual",
        lambda: vanishes(r for f in flows for r in toda_residual_A(f.solution.phi)),
    )

    def flag(name: str, tag: str, method: str) -> None:
        def check():
            held = [getattr(f, method)() for f in flows]
            return all(held), {"instances": len(held), "holding": sum(held)}
        service.certify(name, tag, check)

    flag("u-independence", "Prop 2.2", "u_independent")
    flag("flow-form", "Cor 2.4 flow form", "matches_kernel_operator")
    flag("initial-slice", "Cor 2.4 flow form", "initial_slice_is_one")

    def nilpotent_delta():
        ones = [TruncSeries.one((U,), (u_order,), config.dim) for _ in range(config.n)]
        expected = nilpotent_exponential(config.n, u_order, config.dim)
        actual = toda_delta(ones).Delta
        return agree(zip(
            [x for row in actual.entries for x in row],
            [x for row in expected.entries for x in row],
        ))

    service.certify("delta-nilpotent-exponential", "Delta = exp(u J_n)", nilpotent_delta)

    dump = "".join(f.solution.to_dump(seed=config.seed) for f in flows)
    return JobOutcome(report=service.report("toda-flow", config.summary()), dump=dump)


def run_liouville(config: JobConfig) -> JobOutcome:
    """Liouville equation from initial data, with the psi = 1 and trivial-data forms"""
    service = CertificateService("liouville")
    u_order, _ = config.orders
    inits = [
        random_initial(rng, 1, config.dim, config.degree, config.orders, config.bound)
        for rng in seeded_generators(config.seed, config.instances)
    ]
    solutions = [liouville_solve(init.eta[0], init.psi[0], init.eta[0].constant_term()) for init in inits]

    service.certify("liouville-residual", "Eq (2.10) residual", lambda: vanishes(liouville_residual(p) for p in solutions))
    service.certify(
        "initial-slices", "Eq (2.11)",
        lambda: agree(
            pair for p, init in zip(solutions, inits)
            for pair in ((p.restrict(V), init.psi[0]), (p.restrict(U), init.eta[0]))
        ),
    )

    def psi_one():
        pairs = []
        for init in inits:
            eta = init.eta[0] * init.eta[0].constant_term().inverse()
            one_u = TruncSeries.one((U,), (u_order,), config.dim)
            pairs.append((liouville_psi_one(eta, u_order), liouville_solve(eta, one_u, AlgebraElement.identity(config.dim))))
        return agree(pairs)

    service.certify("psi-one-form", "Eq (2.13)", psi_one)

    def trivial_data():
        orders = config.orders
        one = AlgebraElement.identity(config.dim)
        phi = liouville_solve(
            TruncSeries.one((V,), (orders[1],), config.dim), TruncSeries.one((U,), (orders[0],), config.dim), one
        )
        expected = TruncSeries.one(UV, orders, config.dim) + TruncSeries.monomial(one, (1, 1), UV, orders)
        return agree([(phi, expected)])

    service.certify("trivial-data", "Eq (2.13) phi = 1 + uv", trivial_data)

    dump = "".join(f"instance {i}:\n{p.to_dump()}" for i, p in enumerate(solutions))
    return JobOutcome(report=service.report("liouville", config.summary()), dump=dump)
