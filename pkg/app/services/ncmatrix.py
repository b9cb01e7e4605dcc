"""
Matrices over a noncommutative ring.

Entries only need the `RingElement` contract, so the same code handles
matrices over A and over series rings. Inversion is Gauss-Jordan elimination
with left row operations; the quasideterminant follows the direct formula
x_ij - r (X^ij)^-1 c with one submatrix inversion; `leading_quasidets`
returns the quasideterminants of all leading blocks from a single
elimination pass.
"""
from __future__ import annotations

import itertools
from typing import Callable, List, Optional, Sequence, Tuple

from app.services.algebra import AlgebraElement, RingElement
from app.utils.error_handlers import NotDefined, NotInvertible, ShapeError


class NCMatrix:
    """Rectangular, immutable matrix of ring elements"""

    __slots__ = ("rows", "cols", "_entries")

    def __init__(self, entries: Sequence[Sequence[RingElement]]):
        grid = tuple(tuple(row) for row in entries)
        if not grid or not grid[0] or any(len(row) != len(grid[0]) for row in grid):
            raise ShapeError("matrix must be a nonempty rectangle")
        self.rows = len(grid)
        self.cols = len(grid[0])
        self._entries = grid

    @classmethod
    def identity(cls, n: int, template: RingElement) -> "NCMatrix":
        one, zero = template.one_like(), template.zero_like()
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, m: int, n: int, template: RingElement) -> "NCMatrix":
        zero = template.zero_like()
        return cls([[zero] * n for _ in range(m)])

    @classmethod
    def diagonal(cls, items: Sequence[RingElement]) -> "NCMatrix":
        zero = items[0].zero_like()
        return cls([[items[i] if i == j else zero for j in range(len(items))] for i in range(len(items))])

    def __getitem__(self, index: Tuple[int, int]) -> RingElement:
        i, j = index
        return self._entries[i][j]

    def row(self, i: int) -> Tuple[RingElement, ...]:
        return self._entries[i]

    def col(self, j: int) -> Tuple[RingElement, ...]:
        return tuple(row[j] for row in self._entries)

    @property
    def entries(self) -> Tuple[Tuple[RingElement, ...], ...]:
        return self._entries

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def map(self, fn: Callable[[RingElement], RingElement]) -> "NCMatrix":
        return NCMatrix([[fn(x) for x in row] for row in self._entries])

    def constant_term(self) -> "NCMatrix":
        return self.map(lambda x: x.constant_term() if hasattr(x, "constant_term") else x)

    def submatrix(self, drop_row: int, drop_col: int) -> "NCMatrix":
        """Remove one row and one column (0-based)"""
        return NCMatrix([
            [x for c, x in enumerate(row) if c != drop_col]
            for r, row in enumerate(self._entries) if r != drop_row
        ])

    def leading(self, k: int) -> "NCMatrix":
        """Top-left k×k block"""
        return NCMatrix([row[:k] for row in self._entries[:k]])

    def _check_shape(self, other: "NCMatrix") -> None:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeError("matrix shapes differ", left=[self.rows, self.cols], right=[other.rows, other.cols])

    def __add__(self, other: "NCMatrix") -> "NCMatrix":
        self._check_shape(other)
        return NCMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self._entries, other._entries)])

    def __sub__(self, other: "NCMatrix") -> "NCMatrix":
        self._check_shape(other)
        return NCMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self._entries, other._entries)])

    def __neg__(self) -> "NCMatrix":
        return self.map(lambda x: -x)

    def __mul__(self, other: "NCMatrix") -> "NCMatrix":
        if not isinstance(other, NCMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ShapeError("inner dimensions differ", left=self.cols, right=other.rows)
        cols = [other.col(j) for j in range(other.cols)]
        return NCMatrix([[_dot(row, col) for col in cols] for row in self._entries])

    def agrees_with(self, other: "NCMatrix") -> bool:
        if (self.rows, self.cols) != (other.rows, other.cols):
            return False
        return all(a.agrees_with(b) for r, s in zip(self._entries, other._entries) for a, b in zip(r, s))

    def is_zero(self) -> bool:
        return all(x.is_zero() for row in self._entries for x in row)

    def inverse(self) -> "NCMatrix":
        """
        Gauss-Jordan inverse over a noncommutative ring.

        The pivot of each column is the first remaining row whose entry is
        invertible; every row operation multiplies from the left.

        Raises:
            NotInvertible: some column has no invertible pivot
        """
        if not self.is_square:
            raise ShapeError("only square matrices have inverses", rows=self.rows, cols=self.cols)
        n = self.rows
        template = self._entries[0][0]
        one, zero = template.one_like(), template.zero_like()
        work: List[List[RingElement]] = [
            list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(self._entries)
        ]
        for col in range(n):
            pivot = next((r for r in range(col, n) if work[r][col].is_invertible()), None)
            if pivot is None:
                raise NotInvertible("no invertible pivot", column=col + 1, size=n)
            work[col], work[pivot] = work[pivot], work[col]
            p_inv = work[col][col].inverse()
            work[col] = [p_inv * x for x in work[col]]
            for r in range(n):
                if r == col or work[r][col].is_zero():
                    continue
                factor = work[r][col]
                work[r] = [x - factor * y for x, y in zip(work[r], work[col])]
        return NCMatrix([row[n:] for row in work])

    def is_invertible(self) -> bool:
        try:
            self.inverse()
        except NotInvertible:
            return False
        return True

    def to_dump(self) -> str:
        blocks = []
        for r, row in enumerate(self._entries):
            for c, x in enumerate(row):
                body = x.to_dump() if hasattr(x, "to_dump") else x.to_literal() + "\n"
                blocks.append(f"entry ({r + 1},{c + 1}):\n{body}")
        return "".join(blocks)


def _dot(row: Sequence[RingElement], col: Sequence[RingElement]) -> RingElement:
    total = row[0] * col[0]
    for a, b in zip(row[1:], col[1:]):
        total = total + a * b
    return total


def quasidet(X: NCMatrix, i: int, j: int) -> RingElement:
    """
    Quasideterminant |X|_ij (1-based indices).

    Args:
        X: Square matrix
        i: Row index, 1..m
        j: Column index, 1..m

    Returns:
        x_ij - r_i^(j) (X^ij)^-1 c_j^(i)

    Raises:
        NotDefined: the complementary submatrix X^ij is not invertible
    """
    if not X.is_square or not (1 <= i <= X.rows and 1 <= j <= X.cols):
        raise ShapeError("quasideterminant needs a square matrix and indices in range", size=X.rows, i=i, j=j)
    r0, c0 = i - 1, j - 1
    if X.rows == 1:
        return X[0, 0]
    try:
        sub_inv = X.submatrix(r0, c0).inverse()
    except NotInvertible as e:
        raise NotDefined(f"|X|_{i}{j} is not defined", i=i, j=j, size=X.rows) from e
    r = [x for c, x in enumerate(X.row(r0)) if c != c0]
    c = [x for rr, x in enumerate(X.col(c0)) if rr != r0]
    r_inv = [_dot(r, sub_inv.col(k)) for k in range(sub_inv.cols)]
    return X[r0, c0] - _dot(r_inv, c)


def leading_quasidets(X: NCMatrix, count: Optional[int] = None) -> List[RingElement]:
    """
    |X_k|_kk for the leading k×k blocks X_k, k = 1..count, in one elimination pass.

    The k-th pivot of elimination without row exchanges is the Schur
    complement of X_(k-1) in X_k, which is |X_k|_kk.

    Raises:
        NotDefined: X_(k-1) is not invertible for some requested k
    """
    if not X.is_square:
        raise ShapeError("leading quasideterminants need a square matrix", rows=X.rows, cols=X.cols)
    count = X.rows if count is None else count
    if not 1 <= count <= X.rows:
        raise ShapeError("count out of range", size=X.rows, count=count)
    work = [list(row[:count]) for row in X.entries[:count]]
    pivots = []
    for k in range(count):
        pivots.append(work[k][k])
        if k + 1 == count:
            break
        try:
            p_inv = work[k][k].inverse()
        except NotInvertible as e:
            raise NotDefined(f"|X_{k + 2}|_{k + 2}{k + 2} is not defined", i=k + 2, j=k + 2, size=X.rows) from e
        left = [work[r][k] * p_inv for r in range(k + 1, count)]
        for r, factor in zip(range(k + 1, count), left):
            work[r] = work[r][: k + 1] + [x - factor * y for x, y in zip(work[r][k + 1:], work[k][k + 1:])]
    return pivots


def wronski(fs: Sequence[RingElement], var: str) -> NCMatrix:
    """Wronski matrix: row r holds the r-th derivatives of f_1..f_m in `var`"""
    if not fs:
        raise ShapeError("Wronski matrix of an empty family")
    rows = [list(fs)]
    for _ in range(1, len(fs)):
        rows.append([f.derive(var) for f in rows[-1]])
    return NCMatrix(rows)


def vandermonde(xs: Sequence[AlgebraElement]) -> NCMatrix:
    """V_ij = x_j^(i-1)"""
    if not xs:
        raise ShapeError("Vandermonde matrix of an empty family")
    rows = [[x.one_like() for x in xs]]
    for _ in range(1, len(xs)):
        rows.append([p * x for p, x in zip(rows[-1], xs)])
    return NCMatrix(rows)


def commutative_det(X: NCMatrix) -> RingElement:
    """Classical determinant by permutation expansion; entries must commute (d = 1)"""
    if not X.is_square:
        raise ShapeError("determinant of a non-square matrix", rows=X.rows, cols=X.cols)
    if X[0, 0].dim != 1:
        raise ShapeError("classical determinant needs commutative entries", dim=X[0, 0].dim)
    n = X.rows
    total = X[0, 0].zero_like()
    for perm in itertools.permutations(range(n)):
        term = X[0, perm[0]]
        for r in range(1, n):
            term = term * X[r, perm[r]]
        inversions = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
        total = total - term if inversions % 2 else total + term
    return total


def solve_left(X: NCMatrix, b: Sequence[RingElement]) -> List[RingElement]:
    """Row vector y with y·X = b"""
    if len(b) != X.rows:
        raise ShapeError("right-hand side length differs from the matrix size", size=X.rows, length=len(b))
    inv = X.inverse()
    return [_dot(list(b), inv.col(k)) for k in range(inv.cols)]


def is_unit_lower_triangular(X: NCMatrix) -> bool:
    for i in range(X.rows):
        for j in range(X.cols):
            x = X[i, j]
            if i == j and not x.is_identity():
                return False
            if j > i and not x.is_zero():
                return False
    return True
