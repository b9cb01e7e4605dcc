"""Tests for matrices over noncommutative rings and quasideterminants"""
import itertools

import pytest
import sympy

from app.services.algebra import AlgebraElement, element_from_rng, random_invertible
from app.services.ncmatrix import (
    NCMatrix,
    commutative_det,
    is_unit_lower_triangular,
    leading_quasidets,
    quasidet,
    solve_left,
    vandermonde,
    wronski,
)
from app.services.series import TruncSeries
from app.utils.error_handlers import NotDefined, NotInvertible, ShapeError


def scalar_matrix(values):
    return NCMatrix([[AlgebraElement([[v]]) for v in row] for row in values])


def random_matrix(rng, m, dim, bound=3):
    return NCMatrix([[element_from_rng(rng, dim, bound) for _ in range(m)] for _ in range(m)])


def test_one_by_one_quasideterminant():
    x = AlgebraElement([[1, 2], [3, 4]])
    assert quasidet(NCMatrix([[x]]), 1, 1) == x


def test_commutative_quasideterminant_is_determinant_ratio(rngs):
    """|X|_ij = (-1)^(i+j) det X / det X^ij when entries commute"""
    checked = 0
    for size, rng in itertools.product((2, 3, 4), rngs):
        values = [[int(v) for v in row] for row in rng.integers(-4, 4, size=(size, size), endpoint=True)]
        M = sympy.Matrix(values)
        X = scalar_matrix(values)
        for i in range(1, size + 1):
            for j in range(1, size + 1):
                minor = M.minor_submatrix(i - 1, j - 1).det()
                if minor == 0:
                    with pytest.raises(NotDefined):
                        quasidet(X, i, j)
                    continue
                expected = sympy.Rational((-1) ** (i + j)) * M.det() / minor
                q = quasidet(X, i, j)[0, 0]
                assert sympy.Rational(q.numerator, q.denominator) == expected
                checked += 1
    assert checked > 0


def test_inverse_of_quasideterminant_is_entry_of_inverse(rngs):
    """|X|_ij^-1 = (X^-1)_ji"""
    for rng in rngs:
        X = random_matrix(rng, 3, 2)
        try:
            inv = X.inverse()
        except NotInvertible:
            continue
        for i in range(1, 4):
            for j in range(1, 4):
                try:
                    q = quasidet(X, i, j)
                except NotDefined:
                    continue
                if q.is_invertible():
                    assert q.inverse() == inv[j - 1, i - 1]


def test_block_inverse(rngs):
    for rng in rngs:
        X = NCMatrix([[random_invertible(rng, 2, 2), element_from_rng(rng, 2, 2)],
                      [element_from_rng(rng, 2, 2), random_invertible(rng, 2, 2)]])
        try:
            inv = X.inverse()
        except NotInvertible:
            continue
        identity = NCMatrix.identity(2, X[0, 0])
        assert (X * inv).agrees_with(identity)
        assert (inv * X).agrees_with(identity)


def test_singular_submatrix_is_not_defined():
    X = scalar_matrix([[1, 2], [3, 0]])
    with pytest.raises(NotDefined):
        quasidet(X, 1, 1)
    assert quasidet(X, 2, 2)[0, 0] == -6


def test_leading_quasidets_match_direct_formula(rngs):
    checked = 0
    for rng in rngs:
        X = random_matrix(rng, 4, 2)
        try:
            pivots = leading_quasidets(X)
        except NotDefined:
            continue
        assert len(pivots) == 4
        for k, pivot in enumerate(pivots, start=1):
            assert pivot == quasidet(X.leading(k), k, k)
        checked += 1
    assert checked > 0


def test_leading_quasidets_over_series():
    t = TruncSeries.variable("t", ("t",), (6,), 1)
    one = t.one_like()
    W = wronski([one, one + t, one + t * t], "t")
    pivots = leading_quasidets(W, 2)
    assert len(pivots) == 2
    assert pivots[1].agrees_with(quasidet(W.leading(2), 2, 2))


def test_leading_quasidets_stop_at_singular_block():
    X = scalar_matrix([[1, 2, 0], [2, 4, 1], [0, 1, 1]])
    assert leading_quasidets(X, 2)[1][0, 0] == 0
    with pytest.raises(NotDefined) as exc:
        leading_quasidets(X)
    assert exc.value.context["i"] == 3
    with pytest.raises(ShapeError):
        leading_quasidets(X, 4)


def test_bad_indices():
    X = scalar_matrix([[1, 2], [3, 4]])
    with pytest.raises(ShapeError):
        quasidet(X, 0, 1)
    with pytest.raises(ShapeError):
        quasidet(NCMatrix([[AlgebraElement([[1]]), AlgebraElement([[2]])]]), 1, 1)


def test_commutative_det_matches_sympy(rng):
    values = [[int(v) for v in row] for row in rng.integers(-5, 5, size=(4, 4), endpoint=True)]
    assert commutative_det(scalar_matrix(values))[0, 0] == int(sympy.Matrix(values).det())
    with pytest.raises(ShapeError):
        commutative_det(NCMatrix([[AlgebraElement.identity(2)]]))


def test_solve_left(rng):
    X = random_matrix(rng, 2, 2)
    while not X.is_invertible():
        X = random_matrix(rng, 2, 2)
    b = [element_from_rng(rng, 2, 3) for _ in range(2)]
    y = solve_left(X, b)
    for k in range(2):
        assert y[0] * X[0, k] + y[1] * X[1, k] == b[k]


def test_vandermonde_and_wronski():
    x1, x2 = AlgebraElement([[2]]), AlgebraElement([[5]])
    V = vandermonde([x1, x2])
    assert V[0, 0] == AlgebraElement([[1]])
    assert V[1, 1] == x2
    assert quasidet(V, 2, 2) == x2 - x1

    t = TruncSeries.variable("t", ("t",), (4,), 1)
    W = wronski([t.one_like(), t, t * t], "t")
    assert W.rows == 3
    assert W[2, 2].constant_term() == AlgebraElement([[2]])
    assert is_unit_lower_triangular(wronski([t.one_like(), t], "t").constant_term())
    assert not is_unit_lower_triangular(W.constant_term())
