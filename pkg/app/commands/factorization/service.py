"""Factorization and Vieta job services"""
from functools import lru_cache
from typing import List

import structlog

from app.commands.router import JobOutcome
from app.models.jobs import JobConfig
from app.services.algebra import AlgebraElement
from app.services.diffop import (
    DiffOp,
    Factorization,
    factorize,
    factors_of,
    from_kernel,
    kernel_from_factorization,
    kernel_quasidet_form,
    random_kernel,
    random_normalized_factors,
    random_roots,
    solve_coefficients,
    vieta,
    vieta_residual,
    vieta_via_factorization,
    wronskian_at_zero_is_unit_lower,
)
from app.services.series import TruncSeries
from app.utils.base_service import CertificateService, agree, seeded_generators, vanishes

logger = structlog.get_logger()

VAR = "x"


class FactorizationJob:
    """Seeded kernels with their operators, cached per instance"""

    def __init__(self, config: JobConfig):
        self.config = config
        order = config.orders[0]
        self.kernels: List[List[TruncSeries]] = []
        self.samples: List[TruncSeries] = []
        self.factors: List[List[TruncSeries]] = []
        for rng in seeded_generators(config.seed, config.instances):
            self.kernels.append(random_kernel(rng, config.n, config.dim, order, config.degree, config.bound, VAR))
            self.samples.append(TruncSeries.random_polynomial(rng, (VAR,), (order,), config.degree, config.dim, config.bound))
            self.factors.append(random_normalized_factors(rng, config.n, config.dim, order, config.degree, config.bound, VAR))

    @lru_cache(maxsize=None)
    def operator(self, i: int) -> DiffOp:
        return from_kernel(self.kernels[i], VAR)

    @lru_cache(maxsize=None)
    def factorization(self, i: int) -> Factorization:
        return factorize(self.kernels[i], VAR)

    @lru_cache(maxsize=None)
    def normalized_kernel(self, i: int) -> List[TruncSeries]:
        return kernel_from_factorization(self.factors[i], VAR)

    @property
    def indices(self) -> range:
        return range(len(self.kernels))


def run_factorize(config: JobConfig) -> JobOutcome:
    """
    Kernel operators, their factorization and the normalized kernel of a
    given factorization, certified on seeded instances.
    """
    job = FactorizationJob(config)
    service = CertificateService("factorize")

    service.certify(
        "kernel-annihilation", "Thm 1.1 (i)",
        lambda: vanishes(job.operator(i).apply(f) for i in job.indices for f in job.kernels[i]),
    )
    service.certify(
        "coefficient-uniqueness", "Thm 1.1 (i)",
        lambda: agree((job.operator(i), solve_coefficients(job.kernels[i], VAR)) for i in job.indices),
    )
    service.certify(
        "quasideterminant-form", "Eq (1.1)",
        lambda: agree(
            (kernel_quasidet_form(job.kernels[i], job.samples[i], VAR), job.operator(i).apply(job.samples[i]))
            for i in job.indices
        ),
    )
    service.certify(
        "factorization-recomposes", "Eq (1.2)",
        lambda: agree((job.factorization(i).recompose(), job.operator(i)) for i in job.indices),
    )

    def normalized_wronskian():
        lower = [wronskian_at_zero_is_unit_lower(job.normalized_kernel(i), VAR) for i in job.indices]
        return all(lower), {"instances": len(lower), "unit_lower": sum(lower)}

    service.certify("normalized-wronskian", "Prop 1.2", normalized_wronskian)
    service.certify(
        "normalized-kernel-annihilation", "Prop 1.2",
        lambda: vanishes(
            factors_of(job.factors[i], VAR).recompose().apply(f)
            for i in job.indices for f in job.normalized_kernel(i)
        ),
    )

    dump = "".join(
        f"instance {i}:\n{job.operator(i).to_dump()}" for i in job.indices
    )
    return JobOutcome(report=service.report("factorize", config.summary()), dump=dump)


def run_vieta(config: JobConfig) -> JobOutcome:
    """Coefficients of the monic polynomial with prescribed left roots"""
    service = CertificateService("vieta")
    families: List[List[AlgebraElement]] = [
        random_roots(rng, config.n, config.dim, config.bound) for rng in seeded_generators(config.seed, config.instances)
    ]
    results = [vieta(xs) for xs in families]

    service.certify(
        "root-equations", "Thm 1.3 / Eq (1.5)",
        lambda: vanishes(vieta_residual(r.coefficients, x) for r, xs in zip(results, families) for x in xs),
    )
    if config.n == 1:
        service.certify(
            "linear-coefficient", "Eq (1.5)",
            lambda: agree((r.coefficients[0], -xs[0]) for r, xs in zip(results, families)),
        )

    def factorization_roots():
        pairs = []
        for r, xs in zip(results, families):
            bs = vieta_via_factorization(xs, config.orders[0])
            pairs.extend(zip(bs, r.ys))
        return agree(pairs)

    service.certify("factorization-roots", "Eq (1.7)", factorization_roots)

    dump = "".join(
        f"instance {i}:\n" + "".join(f"a_{r} = {a.to_literal()}\n" for r, a in enumerate(res.coefficients, start=1))
        for i, res in enumerate(results)
    )
    logger.info("Computed Vieta coefficients", instances=len(results), n=config.n)
    return JobOutcome(report=service.report("vieta", config.summary()), dump=dump)
