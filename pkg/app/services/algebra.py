"""
Exact scalar arithmetic and the noncommutative star-algebra A.

A is the algebra of d×d matrices over the rationals with transposition as
its involution. Everything above this module (series, matrices over rings,
operators) only relies on the `RingElement` contract, so the concrete
algebra could be swapped without touching them.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Tuple

import numpy as np

from app.utils.error_handlers import NotInvertible, ShapeError

Row = Tuple[Fraction, ...]


class RingElement(ABC):
    """
    Ring contract the generic modules are written against.

    Required: addition, negation, multiplication, zero/one of the same ring,
    zero test and equality up to truncation. Optional capabilities raise
    NotImplementedError unless the ring provides them.
    """

    @abstractmethod
    def __add__(self, other): ...

    @abstractmethod
    def __neg__(self): ...

    @abstractmethod
    def __mul__(self, other): ...

    @abstractmethod
    def zero_like(self): ...

    @abstractmethod
    def one_like(self): ...

    @abstractmethod
    def is_zero(self) -> bool: ...

    @abstractmethod
    def agrees_with(self, other) -> bool: ...

    def is_invertible(self) -> bool:
        raise NotImplementedError

    def inverse(self):
        raise NotImplementedError

    def star(self):
        raise NotImplementedError

    def __sub__(self, other):
        return self + (-other)

    def __pow__(self, exp: int):
        if exp < 0:
            return self.inverse() ** (-exp)
        result = self.one_like()
        base = self
        while exp > 0:
            if exp & 1:
                result = result * base
            base = base * base
            exp >>= 1
        return result


class AlgebraElement(RingElement):
    """A d×d matrix of exact rationals; immutable"""

    __slots__ = ("dim", "_rows")

    def __init__(self, rows: Iterable[Iterable]):
        converted = tuple(tuple(Fraction(x) for x in row) for row in rows)
        dim = len(converted)
        if dim == 0 or any(len(row) != dim for row in converted):
            raise ShapeError("algebra elements are nonempty square matrices", rows=len(converted))
        self.dim = dim
        self._rows = converted

    @classmethod
    def _raw(cls, rows: Tuple[Row, ...]) -> "AlgebraElement":
        obj = object.__new__(cls)
        obj.dim = len(rows)
        obj._rows = rows
        return obj

    @classmethod
    def identity(cls, dim: int) -> "AlgebraElement":
        return cls.scalar(1, dim)

    @classmethod
    def zero(cls, dim: int) -> "AlgebraElement":
        return cls.scalar(0, dim)

    @classmethod
    def scalar(cls, value, dim: int) -> "AlgebraElement":
        c = Fraction(value)
        zero = Fraction(0)
        return cls._raw(tuple(tuple(c if i == j else zero for j in range(dim)) for i in range(dim)))

    @property
    def rows(self) -> Tuple[Row, ...]:
        return self._rows

    def __getitem__(self, index: Tuple[int, int]) -> Fraction:
        i, j = index
        return self._rows[i][j]

    def zero_like(self) -> "AlgebraElement":
        return AlgebraElement.zero(self.dim)

    def one_like(self) -> "AlgebraElement":
        return AlgebraElement.identity(self.dim)

    def _check_dim(self, other: "AlgebraElement") -> None:
        if other.dim != self.dim:
            raise ShapeError("dimension mismatch", left=self.dim, right=other.dim)

    def __add__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        self._check_dim(other)
        return AlgebraElement._raw(tuple(
            tuple(x + y for x, y in zip(r, s)) for r, s in zip(self._rows, other._rows)
        ))

    def __sub__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        self._check_dim(other)
        return AlgebraElement._raw(tuple(
            tuple(x - y for x, y in zip(r, s)) for r, s in zip(self._rows, other._rows)
        ))

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement._raw(tuple(tuple(-x for x in r) for r in self._rows))

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            self._check_dim(other)
            if self.dim == 1:
                return AlgebraElement._raw(((self._rows[0][0] * other._rows[0][0],),))
            cols = tuple(zip(*other._rows))
            return AlgebraElement._raw(tuple(
                tuple(sum(x * y for x, y in zip(r, c)) for c in cols) for r in self._rows
            ))
        if isinstance(other, Rational):
            c = Fraction(other)
            return AlgebraElement._raw(tuple(tuple(x * c for x in r) for r in self._rows))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Rational):
            return self * other
        return NotImplemented

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self._rows == other._rows

    def __hash__(self) -> int:
        return hash(self._rows)

    def __repr__(self) -> str:
        return f"AlgebraElement({self.to_literal()!r})"

    def agrees_with(self, other) -> bool:
        return self == other

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._rows for x in r)

    def is_identity(self) -> bool:
        return self == AlgebraElement.identity(self.dim)

    def trace(self) -> Fraction:
        return sum((self._rows[i][i] for i in range(self.dim)), Fraction(0))

    def det(self) -> Fraction:
        """Exact determinant by fraction-valued Gaussian elimination"""
        a = [list(r) for r in self._rows]
        n = self.dim
        det = Fraction(1)
        for col in range(n):
            pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
            if pivot is None:
                return Fraction(0)
            if pivot != col:
                a[col], a[pivot] = a[pivot], a[col]
                det = -det
            p = a[col][col]
            det *= p
            for r in range(col + 1, n):
                if a[r][col] != 0:
                    f = a[r][col] / p
                    a[r] = [x - f * y for x, y in zip(a[r], a[col])]
        return det

    def is_invertible(self) -> bool:
        return self.det() != 0

    def inverse(self) -> "AlgebraElement":
        """Gauss-Jordan inverse; raises NotInvertible on a zero determinant"""
        n = self.dim
        if n == 1:
            x = self._rows[0][0]
            if x == 0:
                raise NotInvertible("zero is not invertible", dim=1)
            return AlgebraElement._raw(((1 / x,),))
        one, zero = Fraction(1), Fraction(0)
        a = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(self._rows)]
        for col in range(n):
            pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
            if pivot is None:
                raise NotInvertible("matrix is singular", dim=n)
            a[col], a[pivot] = a[pivot], a[col]
            p = a[col][col]
            a[col] = [x / p for x in a[col]]
            for r in range(n):
                if r != col and a[r][col] != 0:
                    f = a[r][col]
                    a[r] = [x - f * y for x, y in zip(a[r], a[col])]
        return AlgebraElement._raw(tuple(tuple(row[n:]) for row in a))

    def star(self) -> "AlgebraElement":
        """The involution of A: transposition"""
        return AlgebraElement._raw(tuple(zip(*self._rows)))

    def to_float(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self._rows], dtype=float)

    def to_literal(self) -> str:
        """Matrix literal `d; r11 r12 ; r21 r22 ;`"""
        body = " ; ".join(" ".join(str(x) for x in r) for r in self._rows)
        return f"{self.dim}; {body} ;"

    @classmethod
    def from_literal(cls, text: str) -> "AlgebraElement":
        parts = [p.strip() for p in text.strip().split(";")]
        try:
            dim = int(parts[0])
        except ValueError as e:
            raise ShapeError("matrix literal must start with its dimension", literal=text) from e
        rows = parts[1:1 + dim]
        if len(rows) != dim or any(parts[1 + dim:]):
            raise ShapeError("matrix literal has the wrong number of rows", literal=text)
        return cls(tuple(Fraction(tok) for tok in row.split()) for row in rows)


def element_from_rng(rng: np.random.Generator, dim: int, bound: int) -> AlgebraElement:
    """Integer-entry element with entries in [-bound, bound]"""
    if bound < 0:
        raise ValueError("bound must be non-negative")
    entries = rng.integers(-bound, bound, size=(dim, dim), endpoint=True)
    return AlgebraElement([[int(x) for x in row] for row in entries])


def random_element(seed: int, dim: int, bound: int) -> AlgebraElement:
    """Deterministic random element for a fixed seed"""
    return element_from_rng(np.random.default_rng(seed), dim, bound)


def random_invertible(rng: np.random.Generator, dim: int, bound: int) -> AlgebraElement:
    if bound < 1:
        raise ValueError("bound must be at least 1 to draw invertible elements")
    while True:
        x = element_from_rng(rng, dim, bound)
        if x.is_invertible():
            return x


def random_skew(rng: np.random.Generator, dim: int, bound: int) -> AlgebraElement:
    """Skew-symmetric element s with star(s) = -s"""
    x = element_from_rng(rng, dim, bound)
    return x - x.star()


def elements_from_literals(literals: Sequence[str]) -> list:
    return [AlgebraElement.from_literal(lit) for lit in literals]
