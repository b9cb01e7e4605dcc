"""Tests for truncated series arithmetic"""
import math
from fractions import Fraction

import numpy as np
import pytest

from app.config.settings import settings
from app.services.algebra import AlgebraElement, random_invertible
from app.services.series import TruncSeries
from app.utils.error_handlers import (
    NonzeroConstantTerm,
    NotInvertible,
    ShapeError,
    TruncationExhausted,
    VariableMismatch,
)

X = ("x",)
UV = ("u", "v")


def test_geometric_series_inverse():
    one = TruncSeries.one(X, (5,), 1)
    x = TruncSeries.variable("x", X, (5,), 1)
    inv = (one - x).inverse()
    for k in range(6):
        assert inv.coeff(k) == AlgebraElement.identity(1)


def test_inverse_is_two_sided(rngs):
    for rng in rngs:
        c = random_invertible(rng, 2, 2)
        f = TruncSeries.random_polynomial(rng, UV, (3, 3), 2, 2, 2, constant=c)
        inv = f.inverse()
        assert (f * inv).agrees_with(f.one_like())
        assert (inv * f).agrees_with(f.one_like())


def test_product_keeps_coefficient_order(nilpotent_pair):
    a, b = nilpotent_pair
    x = TruncSeries.variable("x", X, (3,), 2)
    left, right = x * a, x * b
    assert (left * right).coeff(2) == a * b
    assert (right * left).coeff(2) == b * a
    assert (a * x).coeff(1) == a


def test_non_invertible_constant_term():
    f = TruncSeries.variable("x", X, (4,), 2)
    with pytest.raises(NotInvertible):
        f.inverse()


def test_derivative_watermark():
    f = TruncSeries.constant(AlgebraElement.identity(1), X, (0,))
    df = f.derive("x")
    assert df.orders == (-1,)
    assert not df.is_reliable()
    with pytest.raises(TruncationExhausted):
        df.constant_term()


def test_integrate_then_derive():
    f = TruncSeries.random_polynomial(np.random.default_rng(3), UV, (4, 4), 3, 2, 3)
    g = f.integrate("u")
    assert g.orders == (5, 4)
    assert g.restrict("u").is_zero()
    assert g.derive("u").agrees_with(f)


def test_integration_respects_cap(monkeypatch):
    monkeypatch.setattr(settings, "series_max_order", 3)
    x = TruncSeries.variable("x", X, (2,), 1)
    assert x.integrate("x").orders == (3,)
    twice = x.integrate("x").integrate("x")
    assert twice.orders == (3,)
    assert twice.coeff(3) == AlgebraElement([[Fraction(1, 6)]])
    assert twice.integrate("x").is_zero()


def test_exp_coefficients():
    a = AlgebraElement([[1, 2], [0, 3]])
    e = (TruncSeries.variable("t", ("t",), (5,), 2) * a).exp()
    for k in range(6):
        assert e.coeff(k) == a ** k * Fraction(1, math.factorial(k))
    inverse = (TruncSeries.variable("t", ("t",), (5,), 2) * -a).exp()
    assert (e * inverse).agrees_with(e.one_like())


def test_exp_needs_zero_constant_term():
    with pytest.raises(NonzeroConstantTerm):
        TruncSeries.one(X, (3,), 1).exp()


def test_mismatched_variables():
    f = TruncSeries.one(X, (3,), 1)
    g = TruncSeries.one(("y",), (3,), 1)
    with pytest.raises(VariableMismatch):
        f + g
    with pytest.raises(ShapeError):
        f + TruncSeries.one(X, (3,), 2)


def test_coefficient_beyond_order():
    f = TruncSeries.one(UV, (2, 1), 1)
    assert f.coeff(2, 1).is_zero()
    with pytest.raises(TruncationExhausted):
        f.coeff(3, 0)


def test_agreement_uses_common_orders():
    x = TruncSeries.variable("x", X, (4,), 1)
    long = TruncSeries.one(X, (4,), 1) + x + x * x * x
    short = (TruncSeries.one(X, (1,), 1) + TruncSeries.variable("x", X, (1,), 1))
    assert long.agrees_with(short)
    assert not long.agrees_with(TruncSeries.one(X, (4,), 1))


def test_restrict_and_lift():
    u = TruncSeries.variable("u", UV, (3, 3), 1)
    v = TruncSeries.variable("v", UV, (3, 3), 1)
    f = TruncSeries.one(UV, (3, 3), 1) + u * v + v
    assert f.restrict("u").agrees_with(TruncSeries.one(("v",), (3,), 1) + TruncSeries.variable("v", ("v",), (3,), 1))
    lifted = TruncSeries.variable("v", ("v",), (2,), 1).lift(UV, (3, 3))
    assert lifted.orders == (3, 2)
    assert lifted.is_constant_in("u")
    with pytest.raises(ShapeError):
        TruncSeries.one(X, (2,), 1).restrict("x")


def test_eval_float_horner():
    x = TruncSeries.variable("x", X, (2,), 1)
    f = TruncSeries.one(X, (2,), 1) + x + x * x
    assert f.eval_float([0.5])[0, 0] == pytest.approx(1.75)
    u = TruncSeries.variable("u", UV, (2, 2), 1)
    v = TruncSeries.variable("v", UV, (2, 2), 1)
    assert (u * v * 3).eval_float([2.0, 0.5])[0, 0] == pytest.approx(3.0)


def test_star_reverses_products(nilpotent_pair):
    a, b = nilpotent_pair
    x = TruncSeries.variable("x", X, (2,), 2)
    f, g = x * a + x.one_like(), x * b + x.one_like()
    assert (f * g).star() == g.star() * f.star()


def test_dump_format():
    u = TruncSeries.variable("u", UV, (1, 1), 1)
    f = TruncSeries.one(UV, (1, 1), 1) + u * Fraction(1, 2)
    assert f.to_dump() == "vars=u,v orders=1,1 dim=1\n0 0 : 1; 1 ;\n1 0 : 1; 1/2 ;\n"
    assert TruncSeries.from_dump(f.to_dump()) == f
