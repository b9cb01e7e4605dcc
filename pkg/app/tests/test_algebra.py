"""Tests for exact matrix algebra elements"""
from fractions import Fraction

import pytest
import sympy

from app.services.algebra import (
    AlgebraElement,
    element_from_rng,
    random_element,
    random_invertible,
    random_skew,
)
from app.utils.error_handlers import NotInvertible, ShapeError


def test_products_do_not_commute(nilpotent_pair):
    a, b = nilpotent_pair
    assert a * b == AlgebraElement([[1, 0], [0, 0]])
    assert b * a == AlgebraElement([[0, 0], [0, 1]])


def test_inverse_and_negative_power():
    x = AlgebraElement([[2, 1], [1, 1]])
    assert x.inverse() == AlgebraElement([[1, -1], [-1, 2]])
    assert x ** -2 == x.inverse() * x.inverse()
    assert x ** 0 == AlgebraElement.identity(2)


def test_singular_element_is_not_invertible():
    x = AlgebraElement([[1, 2], [2, 4]])
    assert not x.is_invertible()
    with pytest.raises(NotInvertible):
        x.inverse()
    with pytest.raises(NotInvertible):
        AlgebraElement.zero(1).inverse()


def test_rational_scaling_is_exact():
    x = AlgebraElement([[1, 3], [0, 2]])
    assert x * Fraction(1, 3) == AlgebraElement([[Fraction(1, 3), 1], [0, Fraction(2, 3)]])
    assert 2 * x == x + x


def test_dimension_mismatch():
    with pytest.raises(ShapeError):
        AlgebraElement.identity(2) + AlgebraElement.identity(3)
    with pytest.raises(ShapeError):
        AlgebraElement([[1, 2]])


def test_determinant_matches_sympy(rngs):
    for rng in rngs:
        x = element_from_rng(rng, 3, 4)
        assert x.det() == int(sympy.Matrix(3, 3, [int(v) for row in x.rows for v in row]).det())


def test_trace_and_star():
    x = AlgebraElement([[1, 2], [3, 4]])
    assert x.trace() == 5
    assert x.star() == AlgebraElement([[1, 3], [2, 4]])
    assert (x * x.star()).star() == x * x.star()


def test_literal_format():
    x = AlgebraElement([[1, Fraction(1, 2)], [0, -3]])
    assert x.to_literal() == "2; 1 1/2 ; 0 -3 ;"
    assert AlgebraElement.from_literal("2; 1 1/2 ; 0 -3 ;") == x
    with pytest.raises(ShapeError):
        AlgebraElement.from_literal("2; 1 0 ;")


def test_random_helpers_are_deterministic(rng):
    assert random_element(5, 2, 3) == random_element(5, 2, 3)
    assert random_invertible(rng, 2, 2).is_invertible()
    s = random_skew(rng, 3, 2)
    assert s.star() == -s
    with pytest.raises(ValueError):
        random_invertible(rng, 2, 0)
