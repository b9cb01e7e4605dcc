"""Tests for the Toda and Liouville solvers"""
from fractions import Fraction

import numpy as np
import pytest

from app.services.algebra import AlgebraElement
from app.services.diffop import random_kernel
from app.services.series import TruncSeries
from app.services.toda import (
    U,
    UV,
    V,
    TodaInitial,
    kernel_rank_check,
    liouville_psi_one,
    liouville_residual,
    liouville_solve,
    nilpotent_exponential,
    random_initial,
    random_symmetric_initial,
    rank_kernel,
    residual_table,
    rs_decomposition,
    symmetry_holds,
    toda_delta,
    toda_flow_factorization,
    toda_infinite_step,
    toda_infinite_steps,
    toda_lax_residual,
    toda_residual_A,
    toda_residual_B,
    toda_residual_C,
    toda_solve_A,
    toda_solve_sym,
)
from app.utils.error_handlers import DegenerateData, SymmetryViolated


@pytest.fixture
def type_a():
    init = random_initial(np.random.default_rng(42), 2, 2, 2, (6, 6), 2)
    return init, toda_solve_A(init)


def test_type_a_solution_satisfies_system(type_a):
    _, solution = type_a
    residuals = toda_residual_A(solution.phi)
    assert len(residuals) == 2
    for r in residuals:
        assert r.is_reliable()
        assert r.is_zero()


def test_type_a_lax_form(type_a):
    _, solution = type_a
    for r in toda_lax_residual(solution.phi):
        assert r.is_reliable()
        assert r.is_zero()


def test_type_a_initial_slices(type_a):
    init, solution = type_a
    for phi, eta, psi in zip(solution.phi, init.eta, init.psi):
        assert phi.restrict(V).agrees_with(psi)
        assert phi.restrict(U).agrees_with(eta)


def test_single_equation_is_product_of_data():
    rng = np.random.default_rng(7)
    init = random_initial(rng, 1, 1, 2, (5, 5), 2)
    phi = toda_solve_A(init).phi[0]
    assert toda_residual_A([phi])[0].is_zero()
    c_inv = init.eta[0].constant_term().inverse()
    expected = init.eta[0].lift(UV, (5, 5)) * c_inv * init.psi[0].lift(UV, (5, 5))
    assert phi.agrees_with(expected)


def test_infinite_toda_recursion(type_a):
    _, solution = type_a
    f = solution.phi[0]
    for i in (1, 2):
        assert toda_infinite_step(f, i).agrees_with(solution.phi[i - 1])


def test_kernel_rank_is_exactly_n(type_a):
    _, solution = type_a
    assert kernel_rank_check(solution.phi[0], 2)
    assert not kernel_rank_check(solution.phi[0], 1)


def test_random_rank_three_kernel():
    """f = sum_i q_i(v) p_i(u) with three random terms has rank exactly 3"""
    checked = 0
    for seed in range(7, 12):
        rng = np.random.default_rng(seed)
        ps = [TruncSeries.random_polynomial(rng, (U,), (6,), 4, 2, 2) for _ in range(3)]
        qs = [TruncSeries.random_polynomial(rng, (V,), (6,), 4, 2, 2) for _ in range(3)]
        f = rank_kernel(ps, qs, (6, 6))
        try:
            at_three = kernel_rank_check(f, 3)
            at_two = kernel_rank_check(f, 2)
        except DegenerateData:
            continue
        assert at_three
        assert not at_two
        checked += 1
    assert checked > 0


def test_rank_check_reuses_precomputed_quasideterminant(type_a):
    _, solution = type_a
    f = solution.phi[0]
    steps = toda_infinite_steps(f, 3)
    assert len(steps) == 3
    assert steps[1].agrees_with(toda_infinite_step(f, 2))
    assert kernel_rank_check(f, 2, top=steps[2])
    assert not kernel_rank_check(f, 1, top=steps[1])


def test_rank_check_rejects_singular_origin():
    """Y_2(f) is singular at the origin for the rank one kernel f = (1 + u)(1 + v)"""
    one = TruncSeries.one(UV, (4, 4), 1)
    f = (one + TruncSeries.variable(U, UV, (4, 4), 1)) * (one + TruncSeries.variable(V, UV, (4, 4), 1))
    with pytest.raises(DegenerateData) as exc:
        kernel_rank_check(f, 2)
    assert exc.value.context["index"] == 2


def test_rank_kernel_reproduces_first_unknown(type_a):
    init, solution = type_a
    ps, qs = rs_decomposition(init)
    assert rank_kernel(ps, qs, solution.phi[0].orders).agrees_with(solution.phi[0])


def test_mismatched_corner_values_are_rejected():
    one_u = TruncSeries.one((U,), (3,), 1)
    two_v = TruncSeries.constant(AlgebraElement([[2]]), (V,), (3,))
    with pytest.raises(DegenerateData):
        toda_solve_A(TodaInitial(eta=[two_v], psi=[one_u]))


def test_type_c_symmetry_and_liouville():
    rng = np.random.default_rng(5)
    init = random_symmetric_initial(rng, "C", 1, 2, 2, (5, 5))
    solution = toda_solve_sym(init, "C")
    assert len(solution.full) == 2
    assert symmetry_holds(solution.full)
    for r in toda_residual_C(solution.phi):
        assert r.is_zero()
    liouville = liouville_solve(init.eta[0], init.psi[0], init.eta[0].constant_term())
    assert liouville.agrees_with(solution.phi[0])


def test_type_b_with_star_unitary_middle():
    rng = np.random.default_rng(9)
    init = random_symmetric_initial(rng, "B", 1, 2, 1, (4, 4))
    solution = toda_solve_sym(init, "B")
    assert len(solution.full) == 3
    assert symmetry_holds(solution.full)
    for r in toda_residual_B(solution.phi):
        assert r.is_zero()


def test_type_b_rejects_non_unitary_middle():
    rng = np.random.default_rng(9)
    base = random_initial(rng, 2, 1, 1, (4, 4), 2)
    two = AlgebraElement([[2]])
    eta = base.eta[:1] + [TruncSeries.constant(two, (V,), (4,))]
    psi = base.psi[:1] + [TruncSeries.constant(two, (U,), (4,))]
    with pytest.raises(SymmetryViolated):
        toda_solve_sym(TodaInitial(eta=eta, psi=psi), "B")


def test_liouville_from_initial_data(rng):
    init = random_initial(rng, 1, 2, 2, (5, 5), 2)
    phi = liouville_solve(init.eta[0], init.psi[0], init.eta[0].constant_term())
    assert liouville_residual(phi).is_zero()
    assert phi.restrict(V).agrees_with(init.psi[0])
    assert phi.restrict(U).agrees_with(init.eta[0])


def test_liouville_trivial_data():
    """eta = psi = 1 gives 1 + uv"""
    one = AlgebraElement.identity(1)
    phi = liouville_solve(TruncSeries.one((V,), (4,), 1), TruncSeries.one((U,), (4,), 1), one)
    expected = TruncSeries.one(UV, (4, 4), 1) + TruncSeries.monomial(one, (1, 1), UV, (4, 4))
    assert phi.agrees_with(expected)


def test_liouville_psi_one_form(rng):
    init = random_initial(rng, 1, 2, 2, (5, 5), 2)
    eta = init.eta[0] * init.eta[0].constant_term().inverse()
    one_u = TruncSeries.one((U,), (5,), 2)
    assert liouville_psi_one(eta, 5).agrees_with(liouville_solve(eta, one_u, AlgebraElement.identity(2)))


def test_flow_on_factorizations(rng):
    kernel = random_kernel(rng, 2, 2, 6, 2, 2, V)
    flow = toda_flow_factorization(kernel, 5)
    assert flow.u_independent()
    assert flow.matches_kernel_operator()
    assert flow.initial_slice_is_one()
    for r in toda_residual_A(flow.solution.phi):
        assert r.is_zero()


def test_delta_for_unit_data_is_nilpotent_exponential():
    ones = [TruncSeries.one((U,), (5,), 1) for _ in range(3)]
    delta = toda_delta(ones).Delta
    assert delta.agrees_with(nilpotent_exponential(3, 5, 1))
    assert delta[2, 0].coeff(2) == AlgebraElement([[Fraction(1, 2)]])
    assert delta[0, 2].is_zero()


def test_residual_table_flags_every_coefficient(type_a):
    _, solution = type_a
    residuals = toda_residual_A(solution.phi)
    lines = residual_table(residuals).splitlines()
    assert lines[0] == "eq index digits zero"
    expected_rows = sum((r.orders[0] + 1) * (r.orders[1] + 1) for r in residuals)
    assert len(lines) == 1 + expected_rows
    assert all(line.endswith(" 1") for line in lines[1:])
