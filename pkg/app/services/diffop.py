"""
Differential operators a_0 D^n + a_1 D^(n-1) + ... + a_n with series coefficients.

Covers construction from a kernel basis, factorization into first-order
factors from a kernel flag, the kernel of a given factorization and the
noncommutative Vieta relations between roots and coefficients.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Dict, List, Sequence

import numpy as np
import structlog

from app.services.algebra import AlgebraElement, element_from_rng
from app.services.ncmatrix import is_unit_lower_triangular, leading_quasidets, quasidet, solve_left, vandermonde, wronski
from app.services.series import TruncSeries
from app.utils.error_handlers import (
    ConstantTermNotOne,
    DegenerateKernel,
    DegeneratePrefix,
    NotDefined,
    NotInvertible,
    ShapeError,
)

logger = structlog.get_logger()


class DiffOp:
    """Polynomial in the derivation d/d`var`; coefficients are written on the left"""

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Sequence[TruncSeries], var: str):
        if not coeffs:
            raise ShapeError("operator needs at least one coefficient")
        self.coeffs = tuple(coeffs)
        self.var = var

    @classmethod
    def identity(cls, template: TruncSeries, var: str) -> "DiffOp":
        return cls([template.one_like()], var)

    @classmethod
    def monomial(cls, k: int, template: TruncSeries, var: str) -> "DiffOp":
        """D^k"""
        return cls([template.one_like()] + [template.zero_like()] * k, var)

    @classmethod
    def linear(cls, b: TruncSeries, var: str) -> "DiffOp":
        """D - b"""
        return cls([b.one_like(), -b], var)

    @classmethod
    def from_powers(cls, powers: Dict[int, TruncSeries], template: TruncSeries, var: str) -> "DiffOp":
        top = max((k for k, c in powers.items()), default=0)
        return cls([powers.get(top - i, template.zero_like()) for i in range(top + 1)], var)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def coeff_of(self, k: int) -> TruncSeries:
        """Coefficient of D^k"""
        if not 0 <= k <= self.order:
            return self.coeffs[0].zero_like()
        return self.coeffs[self.order - k]

    def powers(self) -> Dict[int, TruncSeries]:
        return {self.order - i: c for i, c in enumerate(self.coeffs)}

    def is_monic(self) -> bool:
        return self.coeffs[0].agrees_with(self.coeffs[0].one_like())

    def _check(self, other: "DiffOp") -> None:
        if other.var != self.var:
            raise ShapeError("operators act through different derivations", left=self.var, right=other.var)

    def __add__(self, other: "DiffOp") -> "DiffOp":
        self._check(other)
        p, q = self.powers(), other.powers()
        template = self.coeffs[0]
        keys = set(p) | set(q)
        return DiffOp.from_powers(
            {k: p.get(k, template.zero_like()) + q.get(k, template.zero_like()) for k in keys}, template, self.var
        )

    def __neg__(self) -> "DiffOp":
        return DiffOp([-c for c in self.coeffs], self.var)

    def __sub__(self, other: "DiffOp") -> "DiffOp":
        return self + (-other)

    def __mul__(self, other: "DiffOp") -> "DiffOp":
        return self.compose(other)

    def apply(self, f: TruncSeries) -> TruncSeries:
        """sum_i a_i D^(n-i) f"""
        derivs = [f]
        for _ in range(self.order):
            derivs.append(derivs[-1].derive(self.var))
        total = None
        for i, a in enumerate(self.coeffs):
            term = a * derivs[self.order - i]
            total = term if total is None else total + term
        return total

    def compose(self, other: "DiffOp") -> "DiffOp":
        """
        Composition self∘other using D^k∘q = sum_l C(k,l) (D^l q) D^(k-l).
        """
        self._check(other)
        out: Dict[int, TruncSeries] = {}
        for k, a in self.powers().items():
            for m, b in other.powers().items():
                db = b
                for l in range(k + 1):
                    term = a * db * comb(k, l)
                    p = k - l + m
                    out[p] = out[p] + term if p in out else term
                    if l < k:
                        db = db.derive(self.var)
        return DiffOp.from_powers(out, self.coeffs[0], self.var)

    def left_multiply(self, s: TruncSeries) -> "DiffOp":
        """s∘L, i.e. every coefficient multiplied by s from the left"""
        return DiffOp([s * c for c in self.coeffs], self.var)

    def derive_coeffs(self, var: str) -> "DiffOp":
        """Coefficientwise partial derivative in another variable"""
        return DiffOp([c.derive(var) for c in self.coeffs], self.var)

    def agrees_with(self, other: "DiffOp") -> bool:
        p, q = self.powers(), other.powers()
        template = self.coeffs[0]
        return all(
            p.get(k, template.zero_like()).agrees_with(q.get(k, template.zero_like())) for k in set(p) | set(q)
        )

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def is_reliable(self) -> bool:
        return all(c.is_reliable() for c in self.coeffs)

    def to_dump(self) -> str:
        return f"order={self.order}\n" + "".join(c.to_dump() for c in self.coeffs)


@dataclass(frozen=True)
class Factorization:
    """b_1..b_n with the operator equal to (D - b_n)...(D - b_1)"""
    b: List[TruncSeries]
    quasideterminants: List[TruncSeries]
    var: str

    def recompose(self) -> DiffOp:
        op = DiffOp.linear(self.b[0], self.var)
        for b in self.b[1:]:
            op = DiffOp.linear(b, self.var).compose(op)
        return op


def from_kernel(fs: Sequence[TruncSeries], var: str) -> DiffOp:
    """
    Monic operator of order n annihilating f_1..f_n.

    Args:
        fs: Kernel basis
        var: Variable of the derivation

    Returns:
        DiffOp with (a_n, ..., a_1) = -(D^n f_1, ..., D^n f_n) W^-1

    Raises:
        DegenerateKernel: the Wronski matrix is not invertible
    """
    n = len(fs)
    W = wronski(fs, var)
    top = [f.derive(var) for f in W.row(n - 1)]
    try:
        ys = solve_left(W, [-t for t in top])
    except NotInvertible as e:
        raise DegenerateKernel("Wronski matrix of the kernel is not invertible", size=n) from e
    return DiffOp([fs[0].one_like()] + ys[::-1], var)


def solve_coefficients(fs: Sequence[TruncSeries], var: str) -> DiffOp:
    """
    Same operator as `from_kernel`, solved by column elimination on the
    augmented system c·W = -D^n f without forming W^-1.
    """
    n = len(fs)
    W = wronski(fs, var)
    rhs = [-f.derive(var) for f in W.row(n - 1)]
    cols = [list(W.col(j)) + [rhs[j]] for j in range(n)]
    for k in range(n):
        pivot = next((c for c in range(k, n) if cols[c][k].is_invertible()), None)
        if pivot is None:
            raise DegenerateKernel("Wronski matrix of the kernel is not invertible", size=n, row=k + 1)
        cols[k], cols[pivot] = cols[pivot], cols[k]
        p_inv = cols[k][k].inverse()
        cols[k] = [x * p_inv for x in cols[k]]
        for c in range(n):
            if c != k and not cols[c][k].is_zero():
                factor = cols[c][k]
                cols[c] = [x - y * factor for x, y in zip(cols[c], cols[k])]
    ys = [cols[k][n] for k in range(n)]
    return DiffOp([fs[0].one_like()] + ys[::-1], var)


def kernel_quasidet_form(fs: Sequence[TruncSeries], f: TruncSeries, var: str) -> TruncSeries:
    """|W(f_1, ..., f_n, f)|_(n+1,n+1), the value of the kernel operator on f"""
    n = len(fs)
    return quasidet(wronski(list(fs) + [f], var), n + 1, n + 1)


def factorize(fs: Sequence[TruncSeries], var: str) -> Factorization:
    """
    Factor the kernel operator as (D - b_n)...(D - b_1).

    b_i = (D W_i) W_i^-1 with W_i = |W(f_1..f_i)|_ii.

    Raises:
        DegeneratePrefix: names the first prefix f_1..f_m whose Wronskian is singular
    """
    try:
        ws = leading_quasidets(wronski(fs, var)) if fs else []
    except NotDefined as e:
        raise DegeneratePrefix(e.context["i"] - 1) from e
    bs = []
    for i, w in enumerate(ws, start=1):
        try:
            w_inv = w.inverse()
        except NotInvertible as e:
            raise DegeneratePrefix(i) from e
        bs.append(w.derive(var) * w_inv)
    logger.debug("Factorized kernel operator", order=len(fs), var=var)
    return Factorization(b=bs, quasideterminants=ws, var=var)


def kernel_from_factorization(gs: Sequence[TruncSeries], var: str) -> List[TruncSeries]:
    """
    Kernel basis of (D - b_n)...(D - b_1) with b_i = (D g_i) g_i^-1.

    f_1 = g_1 and f_j = g_1 ∫ g_1^-1 h_(j-1), where h is the kernel built from
    g_2..g_n.

    Raises:
        ConstantTermNotOne: some g_i(0) differs from 1
    """
    for i, g in enumerate(gs, start=1):
        if not g.constant_term().is_identity():
            raise ConstantTermNotOne(f"g_{i}(0) must be 1", index=i)
    return _kernel(list(gs), var)


def _kernel(gs: List[TruncSeries], var: str) -> List[TruncSeries]:
    g1 = gs[0]
    if len(gs) == 1:
        return [g1]
    g1_inv = g1.inverse()
    return [g1] + [g1 * (g1_inv * h).integrate(var) for h in _kernel(gs[1:], var)]


def factors_of(gs: Sequence[TruncSeries], var: str) -> Factorization:
    """b_i = (D g_i) g_i^-1"""
    return Factorization(b=[g.derive(var) * g.inverse() for g in gs], quasideterminants=list(gs), var=var)


def wronskian_at_zero_is_unit_lower(fs: Sequence[TruncSeries], var: str) -> bool:
    return is_unit_lower_triangular(wronski(fs, var).constant_term())


@dataclass(frozen=True)
class VietaResult:
    coefficients: List[AlgebraElement]
    ys: List[AlgebraElement]


def vieta(xs: Sequence[AlgebraElement]) -> VietaResult:
    """
    Coefficients a_1..a_n of the monic polynomial with left roots x_1..x_n.

    y_i = q_i x_i q_i^-1 with q_i = |V(x_1..x_i)|_ii, and
    a_r = (-1)^r sum_(i_1<...<i_r) y_(i_r)...y_(i_1).

    Raises:
        DegeneratePrefix: V(x_1..x_i) is singular for the named i
    """
    ys = []
    for i in range(1, len(xs) + 1):
        try:
            q = quasidet(vandermonde(xs[:i]), i, i)
        except NotDefined as e:
            raise DegeneratePrefix(i - 1) from e
        try:
            q_inv = q.inverse()
        except NotInvertible as e:
            raise DegeneratePrefix(i) from e
        ys.append(q * xs[i - 1] * q_inv)
    n = len(xs)
    coefficients = []
    for r in range(1, n + 1):
        total = xs[0].zero_like()
        for combo in itertools.combinations(range(n), r):
            term = ys[combo[-1]]
            for idx in reversed(combo[:-1]):
                term = term * ys[idx]
            total = total + term
        coefficients.append(total if r % 2 == 0 else -total)
    return VietaResult(coefficients=coefficients, ys=ys)


def vieta_residual(coefficients: Sequence[AlgebraElement], x: AlgebraElement) -> AlgebraElement:
    """x^n + a_1 x^(n-1) + ... + a_n with coefficients on the left"""
    n = len(coefficients)
    total = x ** n
    for r, a in enumerate(coefficients, start=1):
        total = total + a * x ** (n - r)
    return total


def exponential_kernel(xs: Sequence[AlgebraElement], var: str, order: int) -> List[TruncSeries]:
    """f_i = exp(var · x_i)"""
    t = TruncSeries.variable(var, (var,), (order,), xs[0].dim)
    return [(t * x).exp() for x in xs]


def vieta_via_factorization(xs: Sequence[AlgebraElement], order: int, var: str = "t") -> List[TruncSeries]:
    """Factor the operator with kernel exp(t x_i); each b_i is the constant y_i"""
    fs = exponential_kernel(xs, var, max(order, len(xs) + 1))
    return factorize(fs, var).b


MAX_DRAWS = 100


def random_kernel(
    rng: np.random.Generator, n: int, dim: int, order: int, degree: int, bound: int, var: str = "x"
) -> List[TruncSeries]:
    """
    Polynomial kernel basis f_1..f_n whose Wronskian prefixes are invertible at 0.

    Raises:
        DegenerateKernel: no generic basis turned up in MAX_DRAWS draws
    """
    for _ in range(MAX_DRAWS):
        fs = [TruncSeries.random_polynomial(rng, (var,), (order,), degree, dim, bound) for _ in range(n)]
        W0 = wronski(fs, var).constant_term()
        if all(W0.leading(i).is_invertible() for i in range(1, n + 1)):
            return fs
    raise DegenerateKernel("could not draw a generic kernel", n=n, degree=degree, draws=MAX_DRAWS)


def random_normalized_factors(
    rng: np.random.Generator, n: int, dim: int, order: int, degree: int, bound: int, var: str = "x"
) -> List[TruncSeries]:
    """g_1..g_n with g_i(0) = 1"""
    one = AlgebraElement.identity(dim)
    return [
        TruncSeries.random_polynomial(rng, (var,), (order,), degree, dim, bound, constant=one)
        for _ in range(n)
    ]


def random_roots(rng: np.random.Generator, n: int, dim: int, bound: int) -> List[AlgebraElement]:
    """
    x_1..x_n with every Vandermonde prefix nondegenerate.

    Raises:
        DegeneratePrefix: no generic family turned up in MAX_DRAWS draws
    """
    for _ in range(MAX_DRAWS):
        xs = [element_from_rng(rng, dim, bound) for _ in range(n)]
        try:
            vieta(xs)
        except DegeneratePrefix:
            continue
        return xs
    raise DegeneratePrefix(n, "could not draw generic roots", draws=MAX_DRAWS)
