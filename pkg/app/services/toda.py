"""
Nonabelian Toda field equations of types A, B and C.

Unknowns are invertible series phi_i(u, v). Solutions of the initial value
problem phi_i(u, 0) = psi_i(u), phi_i(0, v) = eta_i(v) are built from
quasideterminants of Wronski matrices in v; the residual checkers evaluate
the systems literally so that solver output can be certified independently.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
import structlog

from app.services.algebra import AlgebraElement, random_invertible, random_skew
from app.services.diffop import DiffOp, factorize, from_kernel, kernel_from_factorization
from app.services.ncmatrix import NCMatrix, leading_quasidets, wronski
from app.services.series import TruncSeries
from app.utils.error_handlers import (
    DegenerateData,
    IdentityViolation,
    NotDefined,
    ShapeError,
    SymmetryViolated,
)

logger = structlog.get_logger()

U, V = "u", "v"
UV = (U, V)

TodaType = Literal["A", "B", "C"]


@dataclass(frozen=True)
class TodaInitial:
    """eta_i(v) = phi_i(0, v) and psi_i(u) = phi_i(u, 0)"""
    eta: List[TruncSeries]
    psi: List[TruncSeries]

    @property
    def n(self) -> int:
        return len(self.eta)

    def validate(self) -> None:
        if len(self.eta) != len(self.psi) or not self.eta:
            raise ShapeError("initial data needs n eta's and n psi's", eta=len(self.eta), psi=len(self.psi))
        for i, (e, p) in enumerate(zip(self.eta, self.psi), start=1):
            if e.vars != (V,) or p.vars != (U,):
                raise ShapeError("eta must be series in v and psi series in u", index=i)
            if e.constant_term() != p.constant_term():
                raise DegenerateData(f"eta_{i}(0) differs from psi_{i}(0)", index=i)
            if not e.constant_term().is_invertible():
                raise DegenerateData(f"eta_{i}(0) is not invertible", index=i)


@dataclass(frozen=True)
class TodaSolution:
    phi: List[TruncSeries]
    kind: TodaType = "A"
    full: Optional[List[TruncSeries]] = None
    delta: Optional[DeltaTheta] = None

    @property
    def reliable_orders(self) -> Tuple[int, int]:
        return tuple(min(p.orders[k] for p in self.phi) for k in range(2))

    def to_dump(self, seed: Optional[int] = None) -> str:
        """Solution bundle: header, then one series dump per phi"""
        p0 = self.phi[0]
        header = (
            f"n={len(self.phi)} type={self.kind} dim={p0.dim} "
            f"orders={','.join(str(o) for o in self.reliable_orders)} seed={seed if seed is not None else '-'}"
        )
        blocks = [f"phi {i}:\n{p.to_dump()}" for i, p in enumerate(self.phi, start=1)]
        return header + "\n" + "".join(blocks)


@dataclass(frozen=True)
class DeltaTheta:
    Delta: NCMatrix
    Theta: NCMatrix


def log_derivative(phi: TruncSeries, var: str) -> TruncSeries:
    """(d phi / d var) phi^-1"""
    return phi.derive(var) * phi.inverse()


def _toda_lhs(phi: TruncSeries, phi_inv: TruncSeries) -> TruncSeries:
    return (phi.derive(V) * phi_inv).derive(U)


def toda_residual_A(phi: Sequence[TruncSeries]) -> List[TruncSeries]:
    """
    d/du((d phi_j/dv) phi_j^-1) minus the right-hand side of the type A system.

    For n = 1 the right-hand side is taken to be 0.
    """
    n = len(phi)
    inv = [p.inverse() for p in phi]
    out = []
    for j in range(n):
        lhs = _toda_lhs(phi[j], inv[j])
        rhs = lhs.zero_like()
        if j + 1 < n:
            rhs = rhs + phi[j + 1] * inv[j]
        if j > 0:
            rhs = rhs - phi[j] * inv[j - 1]
        out.append(lhs - rhs)
    return out


def toda_residual_C(phi: Sequence[TruncSeries]) -> List[TruncSeries]:
    """Residual of the type C system in phi_1..phi_k"""
    k = len(phi)
    inv = [p.inverse() for p in phi]
    out = []
    for j in range(k):
        lhs = _toda_lhs(phi[j], inv[j])
        if j + 1 < k:
            rhs = phi[j + 1] * inv[j]
        else:
            rhs = phi[j].star().inverse() * inv[j]
        if j > 0:
            rhs = rhs - phi[j] * inv[j - 1]
        out.append(lhs - rhs)
    return out


def toda_residual_B(phi: Sequence[TruncSeries]) -> List[TruncSeries]:
    """Residual of the type B system in phi_1..phi_(k+1); phi_(k+1) is the middle"""
    if len(phi) < 2:
        raise ShapeError("type B needs k >= 1", length=len(phi))
    k = len(phi) - 1
    inv = [p.inverse() for p in phi]
    out = []
    for j in range(k + 1):
        lhs = _toda_lhs(phi[j], inv[j])
        if j < k:
            rhs = phi[j + 1] * inv[j]
        else:
            rhs = phi[k - 1].star().inverse() * phi[k].star()
        if j > 0:
            rhs = rhs - phi[j] * inv[j - 1]
        out.append(lhs - rhs)
    return out


def residual_table(residuals: Sequence[TruncSeries]) -> str:
    """
    Text table of residual coefficients: equation, multi-index, largest
    numerator size in digits and a zero flag. Unreliable residuals are left out.
    """
    lines = ["eq index digits zero"]
    for eq, r in enumerate(residuals, start=1):
        if not r.is_reliable():
            continue
        for idx in itertools.product(*(range(o + 1) for o in r.orders)):
            c = r.coeff(*idx)
            digits = max(len(str(abs(x.numerator))) for row in c.rows for x in row)
            lines.append(f"{eq} {','.join(map(str, idx))} {digits} {int(c.is_zero())}")
    return "\n".join(lines) + "\n"


def liouville_residual(phi: TruncSeries) -> TruncSeries:
    """d/du((d phi/dv) phi^-1) - (phi^*)^-1 phi^-1"""
    return toda_residual_C([phi])[0]


def toda_delta(psi: Sequence[TruncSeries]) -> DeltaTheta:
    """
    Lower triangular Delta(u) and Theta(u) with Delta' = Delta Theta.

    Delta_jj = psi_j and, for i > j, Delta_ij = (∫ Delta_i,j+1 psi_j^-1 du) psi_j,
    which unrolls to the iterated integral of psi_i psi_(i-1)^-1 ... psi_j^-1.

    Raises:
        NotInvertible: some psi_i(0) is not invertible
        IdentityViolation: Delta' != Delta Theta
    """
    n = len(psi)
    zero = psi[0].zero_like()
    inv = [p.inverse() for p in psi]
    delta = [[zero] * n for _ in range(n)]
    for i in range(n):
        delta[i][i] = psi[i]
        for j in range(i - 1, -1, -1):
            delta[i][j] = (delta[i][j + 1] * inv[j]).integrate(U) * psi[j]
    theta = [[zero] * n for _ in range(n)]
    for i in range(n):
        theta[i][i] = inv[i] * psi[i].derive(U)
        if i > 0:
            theta[i][i - 1] = psi[0].one_like()
    Delta, Theta = NCMatrix(delta), NCMatrix(theta)
    if not Delta.map(lambda x: x.derive(U)).agrees_with(Delta * Theta):
        raise IdentityViolation("Delta' = Delta Theta fails", n=n)
    return DeltaTheta(Delta=Delta, Theta=Theta)


def nilpotent_exponential(n: int, order: int, dim: int, var: str = U) -> NCMatrix:
    """e^(var J_n) with (J_n)_ij = delta_(i,j+1), summed as a matrix series"""
    template = TruncSeries.zeros((var,), (order,), dim)
    t = TruncSeries.variable(var, (var,), (order,), dim)
    tJ = NCMatrix([[t if i == j + 1 else template for j in range(n)] for i in range(n)])
    result = NCMatrix.identity(n, template)
    term = result
    for k in range(1, n):
        term = (term * tJ).map(lambda x, k=k: x * Fraction(1, k))
        result = result + term
    return result


def _lift(s: TruncSeries, orders: Tuple[int, int]) -> TruncSeries:
    return s.lift(UV, orders)


def toda_solve_A(init: TodaInitial) -> TodaSolution:
    """
    Solve the type A initial value problem.

    g_i = eta_i eta_i(0)^-1, f is the kernel of the factorization with factors
    g_i, f^u = f Delta(u) and phi_i = |W(f^u_1..f^u_i)|_ii.

    Raises:
        DegenerateData: a required quasideterminant is undefined
    """
    init.validate()
    n = init.n
    orders = (min(p.orders[0] for p in init.psi), min(e.orders[0] for e in init.eta))
    gs = [e * e.constant_term().inverse() for e in init.eta]
    fs = [_lift(f, orders) for f in kernel_from_factorization(gs, V)]
    dt = toda_delta(init.psi)
    delta = dt.Delta
    fu = []
    for j in range(n):
        total = fs[0] * _lift(delta[0, j], orders)
        for i in range(1, n):
            total = total + fs[i] * _lift(delta[i, j], orders)
        fu.append(total)
    try:
        phi = leading_quasidets(wronski(fu, V))
    except NotDefined as e:
        i = e.context["i"]
        raise DegenerateData(f"|W(f^u_1..f^u_{i})|_{i}{i} is undefined", index=i) from e
    logger.info("Solved Toda system", type="A", n=n, orders=list(orders))
    return TodaSolution(phi=phi, kind="A", delta=dt)


def _reflect(s: TruncSeries) -> TruncSeries:
    return s.star().inverse()


def _is_star_unitary(s: TruncSeries) -> bool:
    return (s.star() * s).agrees_with(s.one_like())


def toda_solve_sym(init: TodaInitial, kind: TodaType) -> TodaSolution:
    """
    Solve type C (n = 2k, data for phi_1..phi_k) or type B (n = 2k+1, data
    for phi_1..phi_(k+1)) by extending with phi_(n+1-i) = (phi_i^*)^-1 and
    solving type A.

    Raises:
        SymmetryViolated: the B-type middle data is not star-unitary
        IdentityViolation: the type A solution lost the symmetry
    """
    init.validate()
    h = init.n
    if kind == "C":
        n = 2 * h
    elif kind == "B":
        n = 2 * h - 1
        for s in (init.eta[-1], init.psi[-1]):
            if not _is_star_unitary(s):
                raise SymmetryViolated("middle initial data must satisfy phi^* phi = 1", index=h)
    else:
        raise ShapeError("symmetric solver handles types B and C", kind=kind)
    eta, psi = list(init.eta), list(init.psi)
    for i in range(n - h, 0, -1):
        eta.append(_reflect(init.eta[i - 1]))
        psi.append(_reflect(init.psi[i - 1]))
    full = toda_solve_A(TodaInitial(eta=eta, psi=psi)).phi
    for i in range(n):
        if not (full[n - 1 - i] * full[i].star()).agrees_with(full[i].one_like()):
            raise IdentityViolation("phi_(n+1-i) phi_i^* = 1 fails", index=i + 1, type=kind)
    return TodaSolution(phi=full[:h], kind=kind, full=full)


def symmetry_holds(full: Sequence[TruncSeries]) -> bool:
    n = len(full)
    return all((full[n - 1 - i] * full[i].star()).agrees_with(full[i].one_like()) for i in range(n))


def liouville_solve(eta: TruncSeries, psi: TruncSeries, a: AlgebraElement) -> TruncSeries:
    """
    phi = eta(v) (a^-1 + P(v) a^* Q(u)) psi(u) with
    P = ∫ eta^-1 (eta^*)^-1 dv and Q = ∫ (psi^*)^-1 psi^-1 du.
    """
    if eta.constant_term() != a or psi.constant_term() != a:
        raise DegenerateData("eta(0) = psi(0) = a is required")
    orders = (psi.orders[0], eta.orders[0])
    a_inv = a.inverse()
    P = (eta.inverse() * eta.star().inverse()).integrate(V)
    Q = (psi.star().inverse() * psi.inverse()).integrate(U)
    middle = _lift(P, orders) * a.star() * _lift(Q, orders)
    middle = middle + TruncSeries.constant(a_inv, UV, middle.orders)
    return _lift(eta, orders) * middle * _lift(psi, orders)


def liouville_psi_one(eta: TruncSeries, u_order: int) -> TruncSeries:
    """phi = eta(v) (1 + u ∫ eta^-1 (eta^*)^-1 dv), the psi = 1 case"""
    orders = (u_order, eta.orders[0])
    P = _lift((eta.inverse() * eta.star().inverse()).integrate(V), orders)
    u = TruncSeries.variable(U, UV, orders, eta.dim)
    return _lift(eta, orders) * (P.one_like() + u * P)


def mixed_wronski(f: TruncSeries, i: int) -> NCMatrix:
    """Y_i(f) = v-Wronskian of f, df/du, ..., d^(i-1)f/du^(i-1)"""
    cols = [f]
    for _ in range(1, i):
        cols.append(cols[-1].derive(U))
    return wronski(cols, V)


def toda_infinite_steps(f: TruncSeries, count: int) -> List[TruncSeries]:
    """phi_i = |Y_i(f)|_ii for i = 1..count; Y_i(f) is the leading block of Y_count(f)"""
    try:
        return leading_quasidets(mixed_wronski(f, count))
    except NotDefined as e:
        i = e.context["i"]
        raise DegenerateData(f"Y_{i - 1}(f) is not invertible", index=i) from e


def toda_infinite_step(f: TruncSeries, i: int) -> TruncSeries:
    """phi_i = |Y_i(f)|_ii"""
    return toda_infinite_steps(f, i)[-1]


def kernel_rank_check(f: TruncSeries, n: int, top: Optional[TruncSeries] = None) -> bool:
    """
    True iff |Y_(n+1)(f)|_(n+1,n+1) vanishes on its reliable coefficients.

    Y_1..Y_n are tested for invertibility on their constant terms. `top`
    is a precomputed |Y_(n+1)(f)|_(n+1,n+1).

    Raises:
        DegenerateData: one of Y_1..Y_n is not invertible
    """
    at_origin = mixed_wronski(f, n).constant_term()
    for i in range(1, n + 1):
        if not at_origin.leading(i).is_invertible():
            raise DegenerateData(f"Y_{i}(f) is not invertible", index=i)
    q = toda_infinite_step(f, n + 1) if top is None else top
    if not q.is_reliable():
        raise DegenerateData("no reliable coefficient left in |Y_(n+1)|", rank=n, orders=list(f.orders))
    return q.is_zero()


def rank_kernel(ps: Sequence[TruncSeries], qs: Sequence[TruncSeries], orders: Tuple[int, int]) -> TruncSeries:
    """sum_i q_i(v) p_i(u); the v-factor stands on the left"""
    total = _lift(qs[0], orders) * _lift(ps[0], orders)
    for p, q in zip(ps[1:], qs[1:]):
        total = total + _lift(q, orders) * _lift(p, orders)
    return total


def rs_decomposition(init: TodaInitial) -> Tuple[List[TruncSeries], List[TruncSeries]]:
    """p_i(u) = Delta_i1(u) and q_i(v) = f_i(v) with phi_1 = sum_i q_i p_i"""
    gs = [e * e.constant_term().inverse() for e in init.eta]
    qs = kernel_from_factorization(gs, V)
    delta = toda_delta(init.psi).Delta
    ps = [delta[i, 0] for i in range(init.n)]
    return ps, qs


def lax_operators(phi: Sequence[TruncSeries]) -> List[DiffOp]:
    """L_0 = 1 and L_i = (D - b_i)...(D - b_1) with b_i = (D phi_i) phi_i^-1, D = d/dv"""
    ops = [DiffOp.identity(phi[0], V)]
    for p in phi:
        ops.append(DiffOp.linear(log_derivative(p, V), V).compose(ops[-1]))
    return ops


def toda_lax_residual(phi: Sequence[TruncSeries]) -> List[DiffOp]:
    """dL_i/du + phi_(i+1) phi_i^-1 L_(i-1) for i < n, and dL_n/du"""
    n = len(phi)
    ops = lax_operators(phi)
    out = []
    for i in range(1, n + 1):
        r = ops[i].derive_coeffs(U)
        if i < n:
            r = r + ops[i - 1].left_multiply(phi[i] * phi[i - 1].inverse())
        out.append(r)
    return out


@dataclass(frozen=True)
class FlowFactorization:
    solution: TodaSolution
    recomposed: DiffOp
    kernel_operator: DiffOp
    b: List[TruncSeries] = field(default_factory=list)

    def u_independent(self) -> bool:
        return all(c.is_constant_in(U) for c in self.recomposed.coeffs)

    def matches_kernel_operator(self) -> bool:
        orders = self.solution.phi[0].orders
        lifted = DiffOp([_lift(c, orders) for c in self.kernel_operator.coeffs], V)
        return self.recomposed.agrees_with(lifted)

    def initial_slice_is_one(self) -> bool:
        return all(p.restrict(V).agrees_with(p.restrict(V).one_like()) for p in self.solution.phi)


def toda_flow_factorization(kernel: Sequence[TruncSeries], u_order: int) -> FlowFactorization:
    """
    Toda flow with phi(u, 0) = 1 as a flow on factorizations of the kernel operator.

    eta_i = W_i W_i(0)^-1 from the factorization of the kernel and psi_i = 1.

    Raises:
        DegeneratePrefix: the kernel flag is degenerate
    """
    fac = factorize(kernel, V)
    eta = [w * w.constant_term().inverse() for w in fac.quasideterminants]
    dim = kernel[0].dim
    psi = [TruncSeries.one((U,), (u_order,), dim) for _ in kernel]
    solution = toda_solve_A(TodaInitial(eta=eta, psi=psi))
    bs = [log_derivative(p, V) for p in solution.phi]
    recomposed = DiffOp.linear(bs[0], V)
    for b in bs[1:]:
        recomposed = DiffOp.linear(b, V).compose(recomposed)
    return FlowFactorization(solution=solution, recomposed=recomposed, kernel_operator=from_kernel(kernel, V), b=bs)


def random_initial(
    rng: np.random.Generator, n: int, dim: int, degree: int, orders: Tuple[int, int], bound: int = 3
) -> TodaInitial:
    """Polynomial initial data with shared invertible constant terms"""
    eta, psi = [], []
    for _ in range(n):
        c = random_invertible(rng, dim, bound)
        psi.append(TruncSeries.random_polynomial(rng, (U,), (orders[0],), degree, dim, bound, constant=c))
        eta.append(TruncSeries.random_polynomial(rng, (V,), (orders[1],), degree, dim, bound, constant=c))
    return TodaInitial(eta=eta, psi=psi)


def cayley_orthogonal(s: TruncSeries) -> TruncSeries:
    """(1 - s)(1 + s)^-1, star-unitary whenever s^* = -s"""
    one = s.one_like()
    return (one - s) * (one + s).inverse()


def random_middle(
    rng: np.random.Generator, dim: int, degree: int, orders: Tuple[int, int], bound: int = 2
) -> Tuple[TruncSeries, TruncSeries]:
    """Star-unitary eta(v), psi(u) sharing their constant term"""
    s0 = random_skew(rng, dim, bound)
    sides = []
    for var, order in ((V, orders[1]), (U, orders[0])):
        coeffs = {(k,): random_skew(rng, dim, bound) for k in range(1, degree + 1)}
        coeffs[(0,)] = s0
        sides.append(cayley_orthogonal(TruncSeries((var,), (order,), dim, coeffs)))
    return sides[0], sides[1]


def random_symmetric_initial(
    rng: np.random.Generator, kind: TodaType, k: int, dim: int, degree: int, orders: Tuple[int, int]
) -> TodaInitial:
    """Data for phi_1..phi_k (type C) or phi_1..phi_(k+1) (type B)"""
    base = random_initial(rng, k, dim, degree, orders)
    if kind == "C":
        return base
    eta_m, psi_m = random_middle(rng, dim, degree, orders)
    return TodaInitial(eta=base.eta + [eta_m], psi=base.psi + [psi_m])
