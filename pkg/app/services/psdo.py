"""
Formal pseudodifferential operators sum_k a_k ∂^k with series coefficients.

Coefficients sit on the left of the powers of ∂. An operator either is exact
(`floor is None`: finitely many terms, nothing dropped) or carries a floor f:
the coefficients of ∂^k are known for k >= f and everything below was cut off.

`units` lists the powers whose coefficient is the constant 1 exactly (the
leading term of ∂, of monic operators and of their products). Their
derivatives vanish identically, so composing with them costs no truncation
order.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import numpy as np
import structlog

from app.services.diffop import DiffOp
from app.services.series import TruncSeries
from app.utils.error_handlers import FloorTooShallow, ShapeError, TangencyViolation, TruncationExhausted

logger = structlog.get_logger()


def binomial(k: int, i: int) -> Fraction:
    """Generalized binomial coefficient k(k-1)...(k-i+1)/i! for any integer k"""
    num = 1
    for r in range(i):
        num *= k - r
    return Fraction(num, factorial(i))


def _max_floor(*floors: Optional[int]) -> Optional[int]:
    known = [f for f in floors if f is not None]
    return max(known) if known else None


class PsDO:
    """Pseudodifferential operator in ∂ = d/d`var`"""

    __slots__ = ("coeffs", "var", "template", "floor", "units")

    def __init__(
        self,
        coeffs: Dict[int, TruncSeries],
        var: str,
        template: TruncSeries,
        floor: Optional[int] = None,
        units: Iterable[int] = (),
    ):
        self.var = var
        self.template = template.zero_like()
        self.floor = floor
        self.coeffs = {k: c for k, c in coeffs.items() if floor is None or k >= floor}
        self.units: FrozenSet[int] = frozenset(k for k in units if k in self.coeffs)

    # -- constructors -------------------------------------------------------

    @classmethod
    def partial(cls, template: TruncSeries, var: str, k: int = 1) -> "PsDO":
        """∂^k"""
        return cls({k: template.one_like()}, var, template, units=(k,))

    @classmethod
    def identity(cls, template: TruncSeries, var: str) -> "PsDO":
        return cls.partial(template, var, 0)

    @classmethod
    def from_diffop(cls, op: DiffOp) -> "PsDO":
        lead = op.coeffs[0]
        units = (op.order,) if lead == lead.one_like() else ()
        return cls(op.powers(), op.var, lead, units=units)

    @classmethod
    def kp_operator(cls, ws: List[TruncSeries], var: str, floor: Optional[int] = None) -> "PsDO":
        """∂ + w_0 ∂^-1 + w_1 ∂^-2 + ..."""
        coeffs = {1: ws[0].one_like()}
        coeffs.update({-1 - i: w for i, w in enumerate(ws)})
        return cls(coeffs, var, ws[0], floor, units=(1,))

    # -- structure ----------------------------------------------------------

    @property
    def kmax(self) -> int:
        nonzero = [k for k, c in self.coeffs.items() if not c.is_zero()]
        if nonzero:
            return max(nonzero)
        return max(self.coeffs, default=self.floor if self.floor is not None else 0)

    @property
    def kmin(self) -> int:
        if self.floor is not None:
            return self.floor
        return min(self.coeffs, default=0)

    @property
    def is_exact(self) -> bool:
        return self.floor is None

    def coeff(self, k: int) -> TruncSeries:
        """Coefficient of ∂^k; raises TruncationExhausted below the floor"""
        if self.floor is not None and k < self.floor:
            raise TruncationExhausted("coefficient below the operator floor", power=k, floor=self.floor)
        return self.coeffs.get(k, self.template)

    def known_powers(self) -> List[int]:
        return list(range(self.kmax, self.kmin - 1, -1))

    def known_coefficients(self) -> List[TruncSeries]:
        return [self.coeff(k) for k in self.known_powers()]

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs.values())

    def _check(self, other: "PsDO") -> None:
        if other.var != self.var:
            raise ShapeError("operators act through different derivations", left=self.var, right=other.var)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "PsDO") -> "PsDO":
        self._check(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out[k] + c if k in out else c
        units = (self.units - set(other.coeffs)) | (other.units - set(self.coeffs))
        return PsDO(out, self.var, self.template, _max_floor(self.floor, other.floor), units)

    def __neg__(self) -> "PsDO":
        return PsDO({k: -c for k, c in self.coeffs.items()}, self.var, self.template, self.floor)

    def __sub__(self, other: "PsDO") -> "PsDO":
        return self + (-other)

    def __mul__(self, other: "PsDO") -> "PsDO":
        return self.compose(other)

    def compose(self, other: "PsDO", floor: Optional[int] = None) -> "PsDO":
        """
        Composition self∘other with ∂^k∘b = sum_i C(k,i) (∂^i b) ∂^(k-i).

        The result floor is max(f_self + kmax_other, f_other + kmax_self),
        raised to `floor` when given.

        Raises:
            ShapeError: an infinite expansion is needed but no floor applies
        """
        self._check(other)
        kmax_p, kmax_q = self.kmax, other.kmax
        result_floor = _max_floor(
            None if self.floor is None else self.floor + kmax_q,
            None if other.floor is None else other.floor + kmax_p,
            floor,
        )
        out: Dict[int, TruncSeries] = {}
        for j, b in other.coeffs.items():
            derivs = [b]
            for k, a in self.coeffs.items():
                if j in other.units:
                    i_max: Optional[int] = 0
                elif k >= 0:
                    i_max = k
                else:
                    i_max = None
                if result_floor is not None:
                    cut = k + j - result_floor
                    i_max = cut if i_max is None else min(i_max, cut)
                if i_max is None:
                    raise ShapeError("composition with negative powers needs a floor", power=k)
                for i in range(i_max + 1):
                    while len(derivs) <= i:
                        derivs.append(derivs[-1].derive(self.var))
                    term = a * derivs[i] * binomial(k, i)
                    power = k - i + j
                    out[power] = out[power] + term if power in out else term
        units = ()
        if kmax_p in self.units and kmax_q in other.units:
            units = (kmax_p + kmax_q,)
        return PsDO(out, self.var, self.template, result_floor, units)

    def power(self, m: int, floor: Optional[int] = None) -> "PsDO":
        """L^m for m >= 1 by repeated composition"""
        if m < 1:
            raise ShapeError("power needs m >= 1", m=m)
        result = self
        step = self.kmax
        for s in range(1, m):
            step_floor = None if floor is None else floor - (m - s - 1) * step
            result = result.compose(self, floor=step_floor)
        return result

    def commutator(self, other: "PsDO", floor: Optional[int] = None) -> "PsDO":
        return self.compose(other, floor=floor) - other.compose(self, floor=floor)

    def split(self) -> Tuple["PsDO", "PsDO"]:
        """(P_+, P_-): the parts with nonnegative and negative powers"""
        plus = {k: c for k, c in self.coeffs.items() if k >= 0}
        minus = {k: c for k, c in self.coeffs.items() if k < 0}
        plus_floor = self.floor if self.floor is not None and self.floor > 0 else None
        return (
            PsDO(plus, self.var, self.template, plus_floor, self.units),
            PsDO(minus, self.var, self.template, self.floor, self.units),
        )

    def plus(self) -> "PsDO":
        """Differential part; every nonnegative coefficient must be known"""
        if self.floor is not None and self.floor > 0:
            raise FloorTooShallow("differential part is not fully known", floor=self.floor)
        return self.split()[0]

    def derive_coeffs(self, var: str) -> "PsDO":
        return PsDO({k: c.derive(var) for k, c in self.coeffs.items()}, self.var, self.template, self.floor)

    def truncate(self, floor: int) -> "PsDO":
        return PsDO(self.coeffs, self.var, self.template, _max_floor(self.floor, floor), self.units)

    def agrees_with(self, other: "PsDO") -> bool:
        """Coefficientwise agreement down to the shallower floor"""
        lo = _max_floor(self.floor, other.floor)
        keys = {k for k in set(self.coeffs) | set(other.coeffs) if lo is None or k >= lo}
        return all(self.coeffs.get(k, self.template).agrees_with(other.coeffs.get(k, other.template)) for k in keys)

    def to_diffop(self) -> DiffOp:
        if any(k < 0 and not c.is_zero() for k, c in self.coeffs.items()):
            raise ShapeError("operator has negative powers")
        top = max(self.kmax, 0)
        return DiffOp([self.coeffs.get(top - i, self.template) for i in range(top + 1)], self.var)

    def to_dump(self) -> str:
        kmin = self.kmin if self.floor is not None else "exact"
        blocks = [f"kmax={self.kmax} kmin={kmin}\n"]
        blocks += [f"order {k}:\n{self.coeff(k).to_dump()}" for k in self.known_powers()]
        return "".join(blocks)


def check_kp_shape(L: PsDO) -> None:
    """coeff(1) = 1 and coeff(0) = 0"""
    lead, zero_term = L.coeff(1), L.coeff(0)
    if L.kmax != 1 or not lead.agrees_with(lead.one_like()) or not zero_term.is_zero():
        raise ShapeError("operator is not of the form ∂ + w_0 ∂^-1 + ...", kmax=L.kmax)


def check_root_shape(M: PsDO) -> int:
    """M = ∂^n + u_2 ∂^(n-2) + ... + u_n; returns n"""
    n = M.kmax
    if n < 1 or not M.is_exact or any(k < 0 and not c.is_zero() for k, c in M.coeffs.items()):
        raise ShapeError("expected a differential operator of positive order")
    lead = M.coeff(n)
    if not lead.agrees_with(lead.one_like()) or not M.coeff(n - 1).is_zero():
        raise ShapeError("expected a monic operator without ∂^(n-1) term", order=n)
    return n


def nth_root(M: PsDO, floor: int) -> PsDO:
    """
    L = ∂ + w_0 ∂^-1 + ... with L^n = M, solved one coefficient at a time.

    Each w_k = (M_(n-2-k) - (L^n)_(n-2-k)) / n with the operator built so far.

    Args:
        M: Operator of the form ∂^n + u_2 ∂^(n-2) + ... + u_n
        floor: Lowest power of ∂ kept in L
    """
    n = check_root_shape(M)
    L = PsDO.partial(M.template, M.var)
    for k in range(0, -floor):
        target = n - 2 - k
        tentative = L.power(n, floor=target)
        w = (M.coeff(target) - tentative.coeff(target)) * Fraction(1, n)
        coeffs = dict(L.coeffs)
        coeffs[-1 - k] = w
        L = PsDO(coeffs, M.var, M.template, units=(1,))
    logger.debug("Extracted operator root", order=n, floor=floor)
    return L.truncate(floor)


def kp_rhs(L: PsDO, m: int, floor: Optional[int] = None) -> PsDO:
    """
    [B_m, L] with B_m = (L^m)_+, the right-hand side of the m-th flow.

    Raises:
        ShapeError: L is not of the form ∂ + w_0 ∂^-1 + ...
        TangencyViolation: a coefficient at a nonnegative power is nonzero
    """
    if m < 1:
        raise ShapeError("flows are indexed by m >= 1", m=m)
    check_kp_shape(L)
    B = L.power(m).plus()
    rhs = B.commutator(L, floor=floor)
    _assert_order_at_most(rhs, -1)
    return rhs


def nkdv_rhs(M: PsDO, m: int, floor: Optional[int] = None) -> PsDO:
    """
    [(M^(m/n))_+, M] for M = ∂^n + u_2 ∂^(n-2) + ... + u_n.

    Flows with m a multiple of n are trivial and return zero.

    Raises:
        ShapeError: M has the wrong form
        TangencyViolation: the result reaches order n-1
    """
    n = check_root_shape(M)
    if m < 1:
        raise ShapeError("flows are indexed by m >= 1", m=m)
    if m % n == 0:
        logger.debug("Flow index is a multiple of the order", n=n, m=m)
    root_floor = min(floor if floor is not None else -1, 1 - m, -1)
    L = nth_root(M, root_floor)
    B = L.power(m).plus()
    rhs = B.commutator(M)
    _assert_order_at_most(rhs, n - 2)
    return rhs


def _assert_order_at_most(P: PsDO, top: int) -> None:
    for k, c in P.coeffs.items():
        if k > top and not c.is_zero():
            raise TangencyViolation(f"coefficient of ∂^{k} is nonzero", power=k, limit=top)


def inverse_monic(op: PsDO, floor: int) -> PsDO:
    """
    Formal inverse of an exact monic operator of order N down to ∂^floor.

    X = ∂^-N + c_1 ∂^(-N-1) + ..., with c_k = -(op∘X)_(-k) for the X built so far.
    """
    N = op.kmax
    if not op.is_exact or N not in op.units:
        raise ShapeError("inverse_monic needs an exact monic operator", order=N)
    coeffs = {-N: op.template.one_like()}
    for k in range(1, -N - floor + 1):
        X = PsDO(coeffs, op.var, op.template, units=(-N,))
        c = op.compose(X, floor=-k).coeff(-k)
        coeffs[-N - k] = -c
    return PsDO(coeffs, op.var, op.template, floor, units=(-N,))


def random_psdo(
    rng: np.random.Generator,
    var: str,
    kmax: int,
    floor: int,
    dim: int,
    order: int,
    degree: int = 2,
    bound: int = 2,
) -> PsDO:
    """Monic ∂^kmax + a_(kmax-1) ∂^(kmax-1) + ... down to ∂^floor with polynomial coefficients"""
    template = TruncSeries.zeros((var,), (order,), dim)
    coeffs = {kmax: template.one_like()}
    for k in range(kmax - 1, floor - 1, -1):
        coeffs[k] = TruncSeries.random_polynomial(rng, (var,), (order,), degree, dim, bound)
    return PsDO(coeffs, var, template, floor if floor < 0 else None, units=(kmax,))


def random_root_operator(
    rng: np.random.Generator, var: str, n: int, dim: int, order: int, degree: int = 2, bound: int = 2
) -> PsDO:
    """∂^n + u_2 ∂^(n-2) + ... + u_n"""
    template = TruncSeries.zeros((var,), (order,), dim)
    coeffs = {n: template.one_like()}
    for k in range(n - 2, -1, -1):
        coeffs[k] = TruncSeries.random_polynomial(rng, (var,), (order,), degree, dim, bound)
    return PsDO(coeffs, var, template, units=(n,))


def random_kp_operator(
    rng: np.random.Generator, var: str, floor: int, dim: int, order: int, degree: int = 2, bound: int = 2
) -> PsDO:
    """∂ + w_0 ∂^-1 + ... down to ∂^floor"""
    ws = [TruncSeries.random_polynomial(rng, (var,), (order,), degree, dim, bound) for _ in range(-floor)]
    return PsDO.kp_operator(ws, var, floor)
