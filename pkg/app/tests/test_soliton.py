"""Tests for the dressing method and KdV solitons"""
from fractions import Fraction

import numpy as np
import pytest

from app.services.algebra import AlgebraElement
from app.services.soliton import (
    SolitonSpec,
    classical_sech_check,
    commutative_tau_check,
    dressed_L,
    dressing_identity_residual,
    dressing_operator,
    flow_certificate,
    kdv_residual,
    kdv_u,
    random_spec,
    sample_grid,
    sech_grid,
    soliton_generators,
    wronskian_at_origin,
)
from app.utils.error_handlers import DegenerateGenerators, FloorTooShallow, ShapeError


def scalar(v):
    return AlgebraElement([[v]])


@pytest.fixture(scope="module")
def two_solitons():
    spec = random_spec(np.random.default_rng(3), 2, 2, (8, 4))
    return spec, dressed_L(spec, -4), kdv_u(spec)


def test_dressing_operator_annihilates_generators(two_solitons):
    spec, _, _ = two_solitons
    phi = dressing_operator(spec)
    assert phi.order == 2
    for y in soliton_generators(spec):
        residual = phi.apply(y)
        assert residual.is_reliable()
        assert residual.is_zero()


def test_dressed_operator_satisfies_flow(two_solitons):
    spec, dressed, _ = two_solitons
    assert dressed.L.floor is not None
    assert flow_certificate(spec, dressed.L)


def test_square_of_dressed_operator_is_schrodinger(two_solitons):
    _, dressed, solution = two_solitons
    square = dressed.L.power(2)
    assert square.split()[1].is_zero()
    assert square.coeff(1).is_zero()
    assert square.coeff(0).agrees_with(solution.u)


def test_potential_formulas_agree(two_solitons):
    _, _, solution = two_solitons
    assert len(solution.b) == 2
    assert solution.formulas_agree()


def test_potential_solves_kdv(two_solitons):
    _, _, solution = two_solitons
    residual = kdv_residual(solution.u)
    assert residual.is_reliable()
    assert residual.is_zero()


def test_dressing_identity(two_solitons):
    spec, _, solution = two_solitons
    residual = dressing_identity_residual(dressing_operator(spec), solution.u)
    assert residual.is_zero()


def test_determinant_form_in_commutative_case():
    for N in (1, 2):
        alphas = [scalar(s + 1) for s in range(N)]
        amps = [scalar(s + 2) for s in range(N)]
        equal, u_tau, u = commutative_tau_check(SolitonSpec.kdv(alphas, amps, (8, 4)))
        assert equal
        assert u_tau.agrees_with(u)


def test_determinant_form_needs_scalars(two_solitons):
    spec, _, _ = two_solitons
    with pytest.raises(ShapeError):
        commutative_tau_check(spec)


def test_one_soliton_matches_sech():
    report = classical_sech_check(Fraction(1), Fraction(1))
    assert report.passed
    assert report.max_deviation < 1e-9
    assert report.grid.shape == (121, 2)
    assert report.half_width == 0.25
    assert abs(report.grid).max() == 0.25
    assert report.u_series.constant_term() == scalar(2)


def test_sech_check_needs_positive_amplitude():
    with pytest.raises(ShapeError):
        classical_sech_check(Fraction(1), Fraction(-1))
    with pytest.raises(ShapeError):
        classical_sech_check(Fraction(1), Fraction(0))


def test_sech_grid_layout():
    grid = sech_grid(0.5, 3)
    assert grid.shape == (9, 2)
    assert grid[0].tolist() == [-0.5, -0.5]
    assert grid[1].tolist() == [-0.5, 0.0]
    assert grid[3].tolist() == [0.0, -0.5]
    assert sech_grid(1.0, 0).shape == (0, 2)


def test_sample_grid_columns(two_solitons):
    _, _, solution = two_solitons
    samples = sample_grid(solution.u, sech_grid(0.1, 2))
    assert samples.shape == (4, 6)
    assert samples[0, :2].tolist() == [-0.1, -0.1]


def test_zero_solitons():
    spec = SolitonSpec.kdv([], [], (4, 4), dim=2)
    assert spec.N == 0
    assert dressing_operator(spec).order == 0
    assert kdv_u(spec).u.is_zero()
    dressed = dressed_L(spec, -3)
    assert dressed.L.kmax == 1
    assert flow_certificate(spec, dressed.L)


def test_kdv_potential_needs_opposite_exponents():
    spec = SolitonSpec([scalar(1)], [scalar(2)], [scalar(1)], (6, 4), 1)
    with pytest.raises(ShapeError):
        kdv_u(spec)


def test_general_generators_still_dress():
    spec = SolitonSpec([scalar(1)], [scalar(2)], [scalar(1)], (8, 4), 1)
    assert not spec.is_kdv()
    assert flow_certificate(spec, dressed_L(spec, -4).L)


def test_degenerate_generators():
    """alpha_1 = alpha_2 makes the second Wronskian prefix singular"""
    spec = SolitonSpec.kdv([scalar(1), scalar(1)], [scalar(1), scalar(1)], (6, 4))
    assert wronskian_at_origin(spec)[1, 0] == scalar(0)
    with pytest.raises(DegenerateGenerators) as exc:
        dressing_operator(spec)
    assert exc.value.context["prefix"] == 2


def test_floor_must_reach_second_tail_coefficient(two_solitons):
    spec, _, _ = two_solitons
    with pytest.raises(FloorTooShallow):
        dressed_L(spec, -1)
