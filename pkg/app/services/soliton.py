"""
Dressing method: soliton generators, the dressing operator, dressed Lax
operators and N-soliton solutions of the noncommutative KdV equation.

Only one higher time t = t_m is kept symbolic; the other times are frozen at 0,
so every object lives in series over (x, t).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
import structlog

from app.config.settings import settings
from app.services.algebra import AlgebraElement, random_invertible
from app.services.diffop import MAX_DRAWS, DiffOp, factorize, from_kernel
from app.services.ncmatrix import NCMatrix, commutative_det, quasidet, wronski
from app.services.psdo import PsDO, check_kp_shape, inverse_monic, kp_rhs
from app.services.series import TruncSeries
from app.utils.error_handlers import (
    DegenerateGenerators,
    DegeneratePrefix,
    FloorTooShallow,
    IdentityViolation,
    NotDefined,
    NotInvertible,
    ShapeError,
)

logger = structlog.get_logger()

X, T = "x", "t"
XT = (X, T)


@dataclass(frozen=True)
class SolitonSpec:
    """alpha_s, beta_s and amplitudes a_s; `m` is the symbolic time t_m"""
    alphas: List[AlgebraElement]
    betas: List[AlgebraElement]
    amps: List[AlgebraElement]
    orders: Tuple[int, int]
    dim: int
    m: int = 3

    @property
    def N(self) -> int:
        return len(self.alphas)

    @classmethod
    def kdv(
        cls, alphas: Sequence[AlgebraElement], amps: Sequence[AlgebraElement], orders: Tuple[int, int], m: int = 3,
        dim: Optional[int] = None,
    ) -> "SolitonSpec":
        """beta_s = -alpha_s"""
        if dim is None:
            dim = alphas[0].dim if alphas else 1
        return cls(list(alphas), [-a for a in alphas], list(amps), tuple(orders), dim, m)

    def is_kdv(self) -> bool:
        return all(b == -a for a, b in zip(self.alphas, self.betas))

    def template(self) -> TruncSeries:
        return TruncSeries.zeros(XT, self.orders, self.dim)


def xi_phase(spec: SolitonSpec, alpha: AlgebraElement) -> TruncSeries:
    """x alpha + t alpha^m"""
    x = TruncSeries.variable(X, XT, spec.orders, spec.dim)
    t = TruncSeries.variable(T, XT, spec.orders, spec.dim)
    return x * alpha + t * alpha ** spec.m


def soliton_generators(spec: SolitonSpec) -> List[TruncSeries]:
    """y_s = exp(xi(alpha_s)) + a_s exp(xi(beta_s))"""
    return [
        xi_phase(spec, alpha).exp() + amp * xi_phase(spec, beta).exp()
        for alpha, beta, amp in zip(spec.alphas, spec.betas, spec.amps)
    ]


def wronskian_at_origin(spec: SolitonSpec) -> NCMatrix:
    """W(y_1..y_N) at (0, 0): entry (r, s) = alpha_s^r + a_s beta_s^r"""
    return NCMatrix([
        [alpha ** r + amp * beta ** r for alpha, beta, amp in zip(spec.alphas, spec.betas, spec.amps)]
        for r in range(spec.N)
    ])


def check_generic(spec: SolitonSpec) -> None:
    """Every prefix y_1..y_i must have an invertible Wronskian at the origin"""
    if spec.N == 0:
        return
    W0 = wronskian_at_origin(spec)
    for i in range(1, spec.N + 1):
        if not W0.leading(i).is_invertible():
            raise DegenerateGenerators(f"y_1..y_{i} are not a generic set", prefix=i)


def dressing_operator(spec: SolitonSpec) -> DiffOp:
    """
    Monic operator of order N in d/dx annihilating y_1..y_N.

    Raises:
        DegenerateGenerators: the generators are not a generic set
    """
    if spec.N == 0:
        return DiffOp.identity(spec.template().one_like(), X)
    check_generic(spec)
    return from_kernel(soliton_generators(spec), X)


@dataclass(frozen=True)
class DressedOperator:
    phi: PsDO
    phi_inverse: PsDO
    L: PsDO


def dressed_L(spec: SolitonSpec, floor: Optional[int] = None) -> DressedOperator:
    """
    L = Φ ∂ Φ^-1 down to ∂^floor.

    Raises:
        FloorTooShallow: floor above -2 cannot certify the first two tail coefficients
        IdentityViolation: L is not of the form ∂ + w_0 ∂^-1 + ...
    """
    floor = settings.soliton_floor if floor is None else floor
    if floor > -2:
        raise FloorTooShallow("dressed operators need a floor of at most -2", floor=floor)
    template = spec.template()
    phi = PsDO.from_diffop(dressing_operator(spec))
    phi_inv = inverse_monic(phi, floor - spec.N - 1)
    L = phi.compose(PsDO.partial(template, X)).compose(phi_inv)
    try:
        check_kp_shape(L)
    except ShapeError as e:
        raise IdentityViolation("dressed operator lost the shape ∂ + w_0 ∂^-1 + ...", N=spec.N) from e
    logger.debug("Dressed Lax operator", N=spec.N, floor=L.floor)
    return DressedOperator(phi=phi, phi_inverse=phi_inv, L=L)


def flow_residual(spec: SolitonSpec, L: PsDO) -> Tuple[PsDO, PsDO]:
    """(dL/dt, [B_m, L]) for the symbolic time t = t_m"""
    return L.derive_coeffs(T), kp_rhs(L, spec.m)


def flow_certificate(spec: SolitonSpec, L: PsDO) -> bool:
    lhs, rhs = flow_residual(spec, L)
    return lhs.agrees_with(rhs)


@dataclass(frozen=True)
class SolitonSolution:
    u: TruncSeries
    u_alt: TruncSeries
    b: List[TruncSeries] = field(default_factory=list)
    quasideterminants: List[TruncSeries] = field(default_factory=list)
    generators: List[TruncSeries] = field(default_factory=list)

    def formulas_agree(self) -> bool:
        return self.u.agrees_with(self.u_alt)


def _modified_wronski(ys: Sequence[TruncSeries]) -> NCMatrix:
    """Wronski matrix with its last row replaced by the N-th derivatives"""
    W = wronski(ys, X)
    rows = [list(W.row(r)) for r in range(W.rows)]
    rows[-1] = [f.derive(X) for f in rows[-1]]
    return NCMatrix(rows)


def kdv_u(spec: SolitonSpec) -> SolitonSolution:
    """
    u = 2 ∂(b_1 + ... + b_N) with b_i = (∂W_i) W_i^-1, and the second form
    u = 2 ∂(Y_N W_N^-1) where Y_N uses the N-th derivatives in the last row.

    Raises:
        ShapeError: beta_s != -alpha_s
        DegenerateGenerators: the generators are not a generic set
    """
    if not spec.is_kdv():
        raise ShapeError("KdV solitons need beta_s = -alpha_s")
    template = spec.template()
    if spec.N == 0:
        return SolitonSolution(u=template, u_alt=template)
    check_generic(spec)
    ys = soliton_generators(spec)
    try:
        fac = factorize(ys, X)
    except DegeneratePrefix as e:
        raise DegenerateGenerators("generators are not a generic set", prefix=e.prefix) from e
    total = fac.b[0]
    for b in fac.b[1:]:
        total = total + b
    u = total.derive(X) * 2
    N = spec.N
    try:
        Y_N = quasidet(_modified_wronski(ys), N, N)
    except NotDefined as e:
        raise DegenerateGenerators("modified Wronski matrix is degenerate", N=N) from e
    u_alt = (Y_N * fac.quasideterminants[-1].inverse()).derive(X) * 2
    return SolitonSolution(u=u, u_alt=u_alt, b=fac.b, quasideterminants=fac.quasideterminants, generators=ys)


def kdv_residual(u: TruncSeries) -> TruncSeries:
    """u_t - (u_xxx + 3 u_x u + 3 u u_x) / 4"""
    ux = u.derive(X)
    uxxx = ux.derive(X).derive(X)
    return u.derive(T) - (uxxx + ux * u * 3 + u * ux * 3) * Fraction(1, 4)


def dressing_identity_residual(phi: DiffOp, u: TruncSeries) -> DiffOp:
    """(∂^2 + u)Φ - Φ∂^2"""
    one, zero = u.one_like(), u.zero_like()
    M = DiffOp([one, zero, u], X)
    return M.compose(phi) - phi.compose(DiffOp([one, zero, zero], X))


def commutative_tau_check(spec: SolitonSpec) -> Tuple[bool, TruncSeries, TruncSeries]:
    """
    Compare 2 ∂[(∂ det W)(det W)^-1] with 2 ∂(b_1 + ... + b_N); commutative case only.

    Returns:
        (equal, u from the determinant, u from the factorization)
    """
    if spec.dim != 1:
        raise ShapeError("the determinant form needs d = 1", dim=spec.dim)
    solution = kdv_u(spec)
    if spec.N == 0:
        return solution.u.is_zero(), solution.u, solution.u
    det = commutative_det(wronski(solution.generators, X))
    try:
        det_inv = det.inverse()
    except NotInvertible as e:
        raise DegenerateGenerators("det W vanishes at the origin") from e
    u_tau = (det.derive(X) * det_inv).derive(X) * 2
    return u_tau.agrees_with(solution.u), u_tau, solution.u


@dataclass(frozen=True)
class SechReport:
    max_deviation: float
    tolerance: float
    half_width: float
    passed: bool
    grid: np.ndarray
    u_series: TruncSeries


def sech_grid(half_width: float, points: int) -> np.ndarray:
    """Rows (x, t) of the square [-half_width, half_width]^2, x varying slowest"""
    if points <= 0:
        return np.zeros((0, 2))
    axis = np.linspace(-half_width, half_width, points)
    xs, ts = np.meshgrid(axis, axis, indexing="ij")
    return np.column_stack([xs.ravel(), ts.ravel()])


def classical_sech_check(
    alpha: Fraction,
    a: Fraction,
    orders: Optional[int] = None,
    half_width: Optional[float] = None,
    points: Optional[int] = None,
    tol: Optional[float] = None,
) -> SechReport:
    """
    Evaluate the one-soliton series and compare with 2 alpha^2 / cosh^2(alpha x + alpha^3 t - c),
    c = ln(a) / 2, on a grid.
    """
    orders = settings.sech_orders if orders is None else orders
    half_width = settings.sech_half_width if half_width is None else half_width
    points = settings.sech_points if points is None else points
    tol = settings.sech_tolerance if tol is None else tol
    if a <= 0:
        raise ShapeError("the closed form needs a > 0", a=str(a))
    spec = SolitonSpec.kdv(
        [AlgebraElement([[alpha]])], [AlgebraElement([[a]])], (orders + 2, orders)
    )
    u = kdv_u(spec).u.truncate((orders, orders))
    grid = sech_grid(half_width, points)
    al, c = float(alpha), 0.5 * np.log(float(a))
    deviation = 0.0
    for x, t in grid:
        series_value = u.eval_float([x, t])[0, 0]
        closed = 2 * al ** 2 / np.cosh(al * x + al ** 3 * t - c) ** 2
        deviation = max(deviation, float(abs(series_value - closed)))
    logger.info("Compared soliton series with closed form", max_deviation=deviation, tolerance=tol)
    return SechReport(max_deviation=deviation, tolerance=tol, half_width=half_width, passed=deviation < tol, grid=grid, u_series=u)


def sample_grid(u: TruncSeries, grid: np.ndarray) -> np.ndarray:
    """Rows x, t, then the d^2 entries of u(x, t) in double precision"""
    d = u.dim
    rows = [np.concatenate([[x, t], u.eval_float([x, t]).reshape(d * d)]) for x, t in grid]
    return np.array(rows).reshape(len(rows), 2 + d * d)


def random_spec(
    rng: np.random.Generator,
    N: int,
    dim: int,
    orders: Tuple[int, int],
    kdv: bool = True,
    m: int = 3,
    bound: int = 2,
) -> SolitonSpec:
    """
    Seeded spec whose generators pass the genericity check.

    Raises:
        DegenerateGenerators: no generic spec turned up in MAX_DRAWS draws
    """
    for _ in range(MAX_DRAWS):
        alphas = [random_invertible(rng, dim, bound) for _ in range(N)]
        amps = [random_invertible(rng, dim, bound) for _ in range(N)]
        if kdv:
            spec = SolitonSpec.kdv(alphas, amps, orders, m, dim)
        else:
            betas = [random_invertible(rng, dim, bound) for _ in range(N)]
            spec = SolitonSpec(alphas, betas, amps, tuple(orders), dim, m)
        try:
            check_generic(spec)
        except DegenerateGenerators:
            continue
        return spec
    raise DegenerateGenerators("could not draw generic soliton data", N=N, draws=MAX_DRAWS)
