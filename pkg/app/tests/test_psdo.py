"""Tests for pseudodifferential operator calculus and the KP flows"""
from fractions import Fraction

import numpy as np
import pytest

from app.commands.kp.service import expected_kdv_hierarchy
from app.services.algebra import AlgebraElement
from app.services.psdo import (
    PsDO,
    binomial,
    check_root_shape,
    inverse_monic,
    kp_rhs,
    nkdv_rhs,
    nth_root,
    random_kp_operator,
    random_psdo,
    random_root_operator,
)
from app.services.series import TruncSeries
from app.utils.error_handlers import FloorTooShallow, ShapeError

X = ("x",)


@pytest.fixture
def template():
    return TruncSeries.zeros(X, (8,), 2)


def test_generalized_binomial():
    assert binomial(5, 2) == 10
    assert binomial(-1, 3) == -1
    assert binomial(-2, 2) == 3
    assert binomial(3, 0) == 1


def test_inverse_partial_is_exact(template):
    d, d_inv = PsDO.partial(template, "x"), PsDO.partial(template, "x", -1)
    one = PsDO.identity(template, "x")
    assert (d_inv * d).is_exact
    assert (d_inv * d).agrees_with(one)
    assert (d * d_inv).agrees_with(one)


def test_leibniz_rule():
    x = TruncSeries.variable("x", X, (6,), 1)
    f = x * x + x
    d = PsDO.partial(f, "x")
    left = d * PsDO({0: f}, "x", f)
    assert left.coeff(1).agrees_with(f)
    assert left.coeff(0).agrees_with(f.derive("x"))


def test_negative_powers_need_a_floor():
    x = TruncSeries.variable("x", X, (6,), 1)
    f = x * x * x
    d_inv = PsDO.partial(f, "x", -1)
    multiplier = PsDO({0: f}, "x", f)
    with pytest.raises(ShapeError):
        d_inv.compose(multiplier)
    out = d_inv.compose(multiplier, floor=-3)
    assert out.floor == -3
    assert out.coeff(-1).agrees_with(f)
    assert out.coeff(-2).agrees_with(-f.derive("x"))
    assert out.coeff(-3).agrees_with(f.derive("x").derive("x"))


def test_composition_is_associative(rngs):
    for rng in rngs[:3]:
        P, Q, R = (random_psdo(rng, "x", kmax, -4, 2, 8) for kmax in (1, 2, 1))
        assert ((P * Q) * R).agrees_with(P * (Q * R))


def test_inverse_of_monic_operator(rng):
    M = random_root_operator(rng, "x", 2, 2, 8)
    inv = inverse_monic(M, -5)
    one = PsDO.identity(M.template, "x")
    assert inv.floor == -5
    assert M.compose(inv).agrees_with(one)
    assert inv.compose(M).agrees_with(one)


def test_root_of_differential_operator(rngs):
    for n in (2, 3):
        M = random_root_operator(rngs[n], "x", n, 2, 8)
        L = nth_root(M, -4)
        assert L.coeff(1).agrees_with(L.template.one_like())
        assert L.coeff(0).is_zero()
        power = L.power(n)
        assert power.agrees_with(M)
        assert power.split()[1].is_zero()


def test_root_shape_is_checked(template):
    one = template.one_like()
    with pytest.raises(ShapeError):
        check_root_shape(PsDO({2: one, 1: one}, "x", template, units=(2,)))
    with pytest.raises(ShapeError):
        check_root_shape(PsDO({2: one, -1: one}, "x", template, units=(2,)))


def test_kp_flows_are_tangent(rng):
    L = random_kp_operator(rng, "x", -5, 2, 8)
    for m in (1, 2, 3):
        rhs = kp_rhs(L, m)
        assert all(c.is_zero() for k, c in rhs.coeffs.items() if k >= 0)


def test_first_kp_flow_is_x_derivative(rng):
    L = random_kp_operator(rng, "x", -4, 2, 8)
    rhs = kp_rhs(L, 1)
    for k in (-1, -2):
        assert rhs.coeff(k).agrees_with(L.coeff(k).derive("x"))


def test_kp_rhs_rejects_constant_term(template):
    one = template.one_like()
    L = PsDO({1: one, 0: one, -1: one}, "x", template, floor=-3, units=(1,))
    with pytest.raises(ShapeError):
        kp_rhs(L, 1)


def test_kdv_hierarchy(rng):
    M = random_root_operator(rng, "x", 2, 2, 8)
    u = M.coeff(0)
    for m in (1, 2, 3):
        rhs = nkdv_rhs(M, m)
        assert rhs.coeff(0).agrees_with(expected_kdv_hierarchy(u, m))
        assert all(c.is_zero() for k, c in rhs.coeffs.items() if k != 0)


def test_scalar_kdv_flow():
    """u = x^2 gives u_t = (3 u_x u + 3 u u_x)/4 = 3 x^3"""
    x = TruncSeries.variable("x", X, (6,), 1)
    u = x * x
    M = PsDO({2: u.one_like(), 0: u}, "x", u, units=(2,))
    rhs = nkdv_rhs(M, 3)
    assert rhs.coeff(0).agrees_with(x * x * x * 3)


def test_differential_part_needs_known_coefficients(template):
    P = PsDO({3: template.one_like(), 2: template.one_like()}, "x", template, floor=2)
    with pytest.raises(FloorTooShallow):
        P.plus()


def test_split_into_parts():
    x = TruncSeries.variable("x", X, (4,), 1)
    P = PsDO({1: x.one_like(), 0: x, -1: x * Fraction(1, 2)}, "x", x, floor=-2)
    plus, minus = P.split()
    assert set(plus.coeffs) == {0, 1}
    assert set(minus.coeffs) == {-1}
    assert plus.is_exact
    assert (plus + minus).agrees_with(P)


def test_random_operators_are_monic():
    rng = np.random.default_rng(0)
    P = random_psdo(rng, "x", 2, -3, 1, 5)
    assert P.kmax == 2
    assert 2 in P.units
    assert P.floor == -3
    assert P.coeff(2).constant_term() == AlgebraElement.identity(1)
