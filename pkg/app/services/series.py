"""
Truncated formal power series over A in one or two variables.

`orders` holds, per variable, the highest degree whose coefficient is exact.
An order of -1 means no coefficient in that direction is known (the result of
differentiating an order-0 series); such a series is "unreliable" and carries
no coefficients at all.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple

import numpy as np

from app.config.settings import settings
from app.services.algebra import AlgebraElement, RingElement, element_from_rng
from app.utils.error_handlers import (
    IdentityViolation,
    NonzeroConstantTerm,
    NotInvertible,
    ShapeError,
    TruncationExhausted,
    VariableMismatch,
)

Index = Tuple[int, ...]


class TruncSeries(RingElement):
    """Sparse truncated series: index tuple -> nonzero AlgebraElement"""

    __slots__ = ("vars", "orders", "dim", "_coeffs")

    def __init__(
        self,
        vars: Sequence[str],
        orders: Sequence[int],
        dim: int,
        coeffs: Optional[Mapping[Index, AlgebraElement]] = None,
    ):
        vars, orders = tuple(vars), tuple(max(int(o), -1) for o in orders)
        if len(vars) not in (1, 2) or len(orders) != len(vars) or len(set(vars)) != len(vars):
            raise ShapeError("series need one or two distinct variables with one order each", vars=list(vars))
        self.vars = vars
        self.orders = orders
        self.dim = dim
        kept: Dict[Index, AlgebraElement] = {}
        for idx, value in (coeffs or {}).items():
            idx = tuple(idx)
            if value.dim != dim:
                raise ShapeError("coefficient dimension mismatch", expected=dim, got=value.dim)
            if all(0 <= k <= o for k, o in zip(idx, orders)) and not value.is_zero():
                kept[idx] = value
        self._coeffs = kept

    @classmethod
    def _raw(cls, vars, orders, dim, coeffs) -> "TruncSeries":
        obj = object.__new__(cls)
        obj.vars, obj.orders, obj.dim, obj._coeffs = vars, orders, dim, coeffs
        return obj

    # -- constructors -------------------------------------------------------

    @classmethod
    def zeros(cls, vars: Sequence[str], orders: Sequence[int], dim: int) -> "TruncSeries":
        return cls(vars, orders, dim)

    @classmethod
    def constant(cls, value: AlgebraElement, vars: Sequence[str], orders: Sequence[int]) -> "TruncSeries":
        return cls(vars, orders, value.dim, {(0,) * len(tuple(vars)): value})

    @classmethod
    def one(cls, vars: Sequence[str], orders: Sequence[int], dim: int) -> "TruncSeries":
        return cls.constant(AlgebraElement.identity(dim), vars, orders)

    @classmethod
    def monomial(
        cls, value: AlgebraElement, exponents: Sequence[int], vars: Sequence[str], orders: Sequence[int]
    ) -> "TruncSeries":
        return cls(vars, orders, value.dim, {tuple(exponents): value})

    @classmethod
    def variable(cls, var: str, vars: Sequence[str], orders: Sequence[int], dim: int) -> "TruncSeries":
        """The series `var` itself (times the identity)"""
        vars = tuple(vars)
        exponents = tuple(1 if v == var else 0 for v in vars)
        return cls.monomial(AlgebraElement.identity(dim), exponents, vars, orders)

    @classmethod
    def random_polynomial(
        cls,
        rng: np.random.Generator,
        vars: Sequence[str],
        orders: Sequence[int],
        degree: int,
        dim: int,
        bound: int,
        constant: Optional[AlgebraElement] = None,
    ) -> "TruncSeries":
        """
        Polynomial with random integer coefficients of degree <= `degree` in each variable.

        Args:
            rng: Seeded numpy generator
            vars: Variable names
            orders: Truncation orders
            degree: Maximum degree per variable
            dim: Size of the coefficient matrices
            bound: Coefficient entries lie in [-bound, bound]
            constant: Fixed constant term; drawn at random when omitted
        """
        vars = tuple(vars)
        coeffs = {}
        for idx in itertools.product(range(degree + 1), repeat=len(vars)):
            coeffs[idx] = element_from_rng(rng, dim, bound)
        if constant is not None:
            coeffs[(0,) * len(vars)] = constant
        return cls(vars, orders, dim, coeffs)

    # -- structure ----------------------------------------------------------

    @property
    def arity(self) -> int:
        return len(self.vars)

    def axis(self, var: str) -> int:
        try:
            return self.vars.index(var)
        except ValueError:
            raise VariableMismatch(f"series has no variable {var!r}", vars=list(self.vars)) from None

    def items(self) -> Iterator[Tuple[Index, AlgebraElement]]:
        return iter(sorted(self._coeffs.items()))

    def coeff(self, *idx: int) -> AlgebraElement:
        """Coefficient at a multi-index; raises TruncationExhausted beyond the orders"""
        if len(idx) != self.arity or any(k < 0 or k > o for k, o in zip(idx, self.orders)):
            raise TruncationExhausted("coefficient beyond the reliable orders", index=list(idx), orders=list(self.orders))
        return self._coeffs.get(tuple(idx)) or AlgebraElement.zero(self.dim)

    def constant_term(self) -> AlgebraElement:
        return self.coeff(*(0,) * self.arity)

    def is_reliable(self) -> bool:
        return all(o >= 0 for o in self.orders)

    def is_zero(self) -> bool:
        return not self._coeffs

    def is_constant_in(self, var: str) -> bool:
        axis = self.axis(var)
        return all(idx[axis] == 0 for idx in self._coeffs)

    def max_numerator_digits(self) -> int:
        return max(
            (len(str(abs(x.numerator))) for c in self._coeffs.values() for row in c.rows for x in row),
            default=0,
        )

    def zero_like(self) -> "TruncSeries":
        return TruncSeries._raw(self.vars, self.orders, self.dim, {})

    def one_like(self) -> "TruncSeries":
        if not self.is_reliable():
            return self.zero_like()
        return TruncSeries._raw(self.vars, self.orders, self.dim, {(0,) * self.arity: AlgebraElement.identity(self.dim)})

    def _check_compat(self, other: "TruncSeries") -> Tuple[int, ...]:
        if other.vars != self.vars:
            raise VariableMismatch("series variables differ", left=list(self.vars), right=list(other.vars))
        if other.dim != self.dim:
            raise ShapeError("series dimensions differ", left=self.dim, right=other.dim)
        return tuple(min(a, b) for a, b in zip(self.orders, other.orders))

    def truncate(self, orders: Sequence[int]) -> "TruncSeries":
        orders = tuple(min(a, int(b)) for a, b in zip(self.orders, orders))
        return TruncSeries(self.vars, orders, self.dim, self._coeffs)

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        orders = self._check_compat(other)
        out = {idx: c for idx, c in self._coeffs.items() if _inside(idx, orders)}
        for idx, c in other._coeffs.items():
            if _inside(idx, orders):
                out[idx] = out[idx] + c if idx in out else c
        return TruncSeries._raw(self.vars, orders, self.dim, _nonzero(out))

    def __neg__(self) -> "TruncSeries":
        return TruncSeries._raw(self.vars, self.orders, self.dim, {k: -c for k, c in self._coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, TruncSeries):
            orders = self._check_compat(other)
            out: Dict[Index, AlgebraElement] = {}
            for ia, a in self._coeffs.items():
                for ib, b in other._coeffs.items():
                    idx = tuple(x + y for x, y in zip(ia, ib))
                    if _inside(idx, orders):
                        p = a * b
                        out[idx] = out[idx] + p if idx in out else p
            return TruncSeries._raw(self.vars, orders, self.dim, _nonzero(out))
        if isinstance(other, (AlgebraElement, Rational)):
            return TruncSeries._raw(
                self.vars, self.orders, self.dim, _nonzero({k: c * other for k, c in self._coeffs.items()})
            )
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (AlgebraElement, Rational)):
            return TruncSeries._raw(
                self.vars, self.orders, self.dim, _nonzero({k: other * c for k, c in self._coeffs.items()})
            )
        return NotImplemented

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (self.vars, self.orders, self.dim, self._coeffs) == (other.vars, other.orders, other.dim, other._coeffs)

    __hash__ = None

    def __repr__(self) -> str:
        return f"TruncSeries(vars={self.vars}, orders={self.orders}, dim={self.dim}, terms={len(self._coeffs)})"

    def agrees_with(self, other) -> bool:
        """Equality of every coefficient both series know exactly"""
        if isinstance(other, AlgebraElement):
            other = TruncSeries.constant(other, self.vars, self.orders)
        orders = self._check_compat(other)
        keys = {k for k in itertools.chain(self._coeffs, other._coeffs) if _inside(k, orders)}
        zero = AlgebraElement.zero(self.dim)
        return all(self._coeffs.get(k, zero) == other._coeffs.get(k, zero) for k in keys)

    # -- calculus -----------------------------------------------------------

    def derive(self, var: str) -> "TruncSeries":
        """Partial derivative; the order in `var` drops by one"""
        axis = self.axis(var)
        orders = tuple(o - 1 if i == axis else o for i, o in enumerate(self.orders))
        if orders[axis] < 0:
            return TruncSeries._raw(self.vars, orders, self.dim, {})
        out = {}
        for idx, c in self._coeffs.items():
            k = idx[axis]
            if k >= 1:
                out[idx[:axis] + (k - 1,) + idx[axis + 1:]] = c * k
        return TruncSeries._raw(self.vars, orders, self.dim, out)

    def integrate(self, var: str) -> "TruncSeries":
        """Definite integral from 0; the order in `var` rises by one up to the configured cap"""
        axis = self.axis(var)
        cap = max(settings.series_max_order, self.orders[axis])
        new_order = min(self.orders[axis] + 1, cap)
        orders = tuple(new_order if i == axis else o for i, o in enumerate(self.orders))
        if any(o < 0 for o in orders):
            return TruncSeries._raw(self.vars, orders, self.dim, {})
        out = {}
        for idx, c in self._coeffs.items():
            k = idx[axis] + 1
            if k <= new_order:
                out[idx[:axis] + (k,) + idx[axis + 1:]] = c * Fraction(1, k)
        return TruncSeries._raw(self.vars, orders, self.dim, out)

    def is_invertible(self) -> bool:
        return self.is_reliable() and self.constant_term().is_invertible()

    def inverse(self) -> "TruncSeries":
        """
        Multiplicative inverse by the right-sided recurrence
        g_m = c0^-1 (delta_m - sum_{k != 0} f_k g_{m-k}) in lexicographic index
        order, followed by a two-sided check.

        Raises:
            NotInvertible: constant term not invertible in A
        """
        try:
            c0_inv = self.constant_term().inverse()
        except NotInvertible as e:
            raise NotInvertible("series constant term is not invertible", vars=list(self.vars)) from e
        zero_idx = (0,) * self.arity
        tail = [(k, c) for k, c in self._coeffs.items() if k != zero_idx]
        g: Dict[Index, AlgebraElement] = {zero_idx: c0_inv}
        for idx in itertools.product(*(range(o + 1) for o in self.orders)):
            if idx == zero_idx:
                continue
            acc = None
            for k, c in tail:
                rest = tuple(a - b for a, b in zip(idx, k))
                if min(rest) < 0 or rest not in g:
                    continue
                p = c * g[rest]
                acc = p if acc is None else acc + p
            if acc is not None and not acc.is_zero():
                g[idx] = -(c0_inv * acc)
        result = TruncSeries._raw(self.vars, self.orders, self.dim, g)
        if not (result * self).agrees_with(self.one_like()):
            raise IdentityViolation("series inverse is not two-sided", vars=list(self.vars))
        return result

    def exp(self) -> "TruncSeries":
        """sum p^k / k!; needs a zero constant term"""
        if not self.constant_term().is_zero():
            raise NonzeroConstantTerm("exp needs a series with zero constant term", vars=list(self.vars))
        result = self.one_like()
        term = self.one_like()
        k = 1
        while k <= sum(self.orders):
            term = (term * self) * Fraction(1, k)
            if term.is_zero():
                break
            result = result + term
            k += 1
        return result

    def star(self) -> "TruncSeries":
        return TruncSeries._raw(self.vars, self.orders, self.dim, {k: c.star() for k, c in self._coeffs.items()})

    # -- change of variables ------------------------------------------------

    def restrict(self, var: str, value=0) -> "TruncSeries":
        """Set `var` to zero: keep the degree-0 slice in that variable"""
        if value != 0:
            raise ValueError("series can only be restricted at 0")
        if self.arity == 1:
            raise ShapeError("cannot restrict a one-variable series", vars=list(self.vars))
        axis = self.axis(var)
        vars = self.vars[:axis] + self.vars[axis + 1:]
        orders = self.orders[:axis] + self.orders[axis + 1:]
        if self.orders[axis] < 0:
            return TruncSeries._raw(vars, orders, self.dim, {})
        out = {k[:axis] + k[axis + 1:]: c for k, c in self._coeffs.items() if k[axis] == 0}
        return TruncSeries._raw(vars, orders, self.dim, out)

    def lift(self, vars: Sequence[str], orders: Sequence[int]) -> "TruncSeries":
        """Embed a one-variable series into `vars`, constant in the new variable"""
        vars, orders = tuple(vars), tuple(orders)
        if self.arity != 1 or self.vars[0] not in vars or len(vars) != 2:
            raise VariableMismatch("lift needs a one-variable series and a target pair containing it",
                                   vars=list(self.vars), target=list(vars))
        axis = vars.index(self.vars[0])
        new_orders = tuple(min(self.orders[0], orders[i]) if i == axis else orders[i] for i in range(2))
        out = {}
        for (k,), c in self._coeffs.items():
            idx = (k, 0) if axis == 0 else (0, k)
            if _inside(idx, new_orders):
                out[idx] = c
        return TruncSeries._raw(vars, new_orders, self.dim, out)

    def map_coeffs(self, fn) -> "TruncSeries":
        return TruncSeries(self.vars, self.orders, self.dim, {k: fn(c) for k, c in self._coeffs.items()})

    # -- numerics and text --------------------------------------------------

    def to_array(self) -> np.ndarray:
        shape = tuple(o + 1 for o in self.orders) + (self.dim, self.dim)
        arr = np.zeros(tuple(max(s, 0) for s in shape), dtype=float)
        for idx, c in self._coeffs.items():
            arr[idx] = c.to_float()
        return arr

    def eval_float(self, point: Sequence[float]) -> np.ndarray:
        """Approximate value at `point` by nested Horner evaluation in double precision"""
        if len(point) != self.arity:
            raise ShapeError("point needs one value per variable", vars=list(self.vars), point=list(point))
        acc = self.to_array()
        for axis in reversed(range(self.arity)):
            out = np.zeros(acc.shape[:axis] + acc.shape[axis + 1:])
            for k in reversed(range(acc.shape[axis])):
                out = out * point[axis] + np.take(acc, k, axis=axis)
            acc = out
        return acc

    def to_dump(self) -> str:
        header = f"vars={','.join(self.vars)} orders={','.join(str(o) for o in self.orders)} dim={self.dim}"
        lines = [header] + [f"{' '.join(str(k) for k in idx)} : {c.to_literal()}" for idx, c in self.items()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dump(cls, text: str) -> "TruncSeries":
        lines = [line for line in text.strip().splitlines() if line.strip()]
        try:
            fields = dict(part.split("=", 1) for part in lines[0].split())
            vars = fields["vars"].split(",")
            orders = [int(o) for o in fields["orders"].split(",")]
            dim = int(fields["dim"])
        except (IndexError, KeyError, ValueError) as e:
            raise ShapeError("malformed series dump header", header=lines[0] if lines else "") from e
        coeffs = {}
        for line in lines[1:]:
            idx, literal = line.split(":", 1)
            coeffs[tuple(int(k) for k in idx.split())] = AlgebraElement.from_literal(literal)
        return cls(vars, orders, dim, coeffs)


def _inside(idx: Index, orders: Tuple[int, ...]) -> bool:
    return all(k <= o for k, o in zip(idx, orders))


def _nonzero(coeffs: Dict[Index, AlgebraElement]) -> Dict[Index, AlgebraElement]:
    return {k: c for k, c in coeffs.items() if not c.is_zero()}


def series_sum(terms: Iterable[TruncSeries], start: TruncSeries) -> TruncSeries:
    total = start
    for t in terms:
        total = total + t
    return total
