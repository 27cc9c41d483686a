from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdhweno import models
from rdhweno.driver import RunConfig, run_to_steady
from rdhweno.harness import run_errors
from rdhweno.rd1d import (
    DIRICHLET,
    OUTFLOW,
    Boundary,
    NodalSolution1D,
    advance_1d,
    compute_dt_1d,
    derivative_sweep_1d,
    distribute_scalar_1d,
    distribute_system_1d,
    euler_step_1d,
    interval_residuals,
    interval_total_residual,
    l1_residue_1d,
    nodal_residuals,
    roe_alpha,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def sine_state(x):
    return np.sin(x), np.cos(x)


def sine_solution(n: int, dtype=np.float64) -> NodalSolution1D:
    bc = Boundary(DIRICHLET, sine_state)
    return NodalSolution1D.from_functions(0.0, np.pi, n, sine_state, bc, bc, dtype)


def order(errors):
    return [math.log2(a / b) for a, b in zip(errors, errors[1:])]


# {{{ roe ramp


def test_roe_alpha_branch_values():
    d = 0.3
    assert roe_alpha(2 * d, d) == 1.0
    assert roe_alpha(-2 * d, d) == 0.0
    assert roe_alpha(0.0, d) == pytest.approx(0.5, abs=1e-15)
    assert roe_alpha(d, d) == pytest.approx(1.0, abs=1e-15)
    assert roe_alpha(-d, d) == pytest.approx(0.0, abs=1e-15)


def test_roe_alpha_c1_at_ramp_ends():
    d, h = 0.2, 1e-6
    for edge in (-d, d):
        left = (roe_alpha(edge, d) - roe_alpha(edge - h, d)) / h
        right = (roe_alpha(edge + h, d) - roe_alpha(edge, d)) / h
        assert abs(left) < 1e-4 and abs(right) < 1e-4


def test_roe_alpha_rejects_nonpositive_delta():
    with pytest.raises(ValueError):
        roe_alpha(0.0, 0.0)


@given(st.floats(1e-6, 10.0), st.lists(st.floats(-20, 20), min_size=2, max_size=40))
def test_roe_alpha_monotone_and_bounded(delta, lams):
    lams = np.sort(np.array(lams))
    a = roe_alpha(lams, delta)
    assert np.all((a >= 0) & (a <= 1))
    assert np.all(np.diff(a) >= -1e-15)


# }}}


# {{{ distribution


def test_distribute_scalar_examples():
    assert distribute_scalar_1d(3.0, 1.0) == (0.0, 3.0)
    assert distribute_scalar_1d(2.0, 0.5) == (1.0, 1.0)


@settings(max_examples=300)
@given(finite, st.floats(0, 1))
def test_scalar_split_conserves(phi, alpha):
    p1, p2 = distribute_scalar_1d(phi, alpha)
    assert p1 + p2 == pytest.approx(phi, rel=1e-12, abs=1e-300)
    assert abs(p1) <= abs(phi) and abs(p2) <= abs(phi)


def test_system_reduces_to_scalar():
    model = models.burgers_smooth_1d()
    phi = np.array([[1.5], [-0.7]])
    ubar = np.array([[0.2], [-0.4]])
    got = distribute_system_1d(phi, ubar, model, 0.3)
    want = distribute_scalar_1d(phi, roe_alpha(ubar, 0.3))
    np.testing.assert_array_equal(got[0], want[0])
    np.testing.assert_array_equal(got[1], want[1])


def test_supersonic_shallow_water_sends_everything_right():
    model = models.shallow_water_model(9.812)
    ubar = np.array([1.0, 10.0])
    assert np.all(model.eigenvalues(ubar) > 0)
    phi = np.array([0.3, -1.7])
    p1, p2 = distribute_system_1d(phi, ubar, model, 1e-15)
    np.testing.assert_allclose(p1, 0.0, atol=1e-12)
    np.testing.assert_allclose(p2, phi, rtol=1e-12)


@st.composite
def swe_draw(draw):
    h = draw(st.floats(0.1, 5.0))
    vel = draw(st.floats(-12.0, 12.0))
    phi = [draw(finite), draw(finite)]
    return np.array([h, h * vel]), np.array(phi)


@settings(max_examples=500)
@given(swe_draw(), st.floats(1e-15, 2.0))
def test_system_split_conserves(draw, delta):
    ubar, phi = draw
    model = models.shallow_water_model()
    p1, p2 = distribute_system_1d(phi, ubar, model, delta)
    scale = max(np.abs(phi).max(), 1e-12)
    assert np.abs(p1 + p2 - phi).max() <= 1e-12 * scale * 10


@settings(max_examples=300)
@given(swe_draw(), st.floats(1e-15, 2.0))
def test_system_split_bounded_in_characteristic_basis(draw, delta):
    ubar, phi = draw
    model = models.shallow_water_model()
    _, L, _ = model.eigensystem(ubar)
    psi = L @ phi
    p1, p2 = distribute_system_1d(phi, ubar, model, delta)
    tol = 1e-10 * (np.abs(psi).max() + 1e-12)
    assert np.all(np.abs(L @ p1) <= np.abs(psi) + tol)
    assert np.all(np.abs(L @ p2) <= np.abs(psi) + tol)


# }}}


# {{{ interval residuals


def test_interval_residual_flux_examples():
    model = models.burgers_free_1d()
    bc = Boundary(DIRICHLET, lambda x: (np.zeros_like(x), np.zeros_like(x)))
    flat = NodalSolution1D.from_functions(0.0, 1.0, 8, lambda x: (np.ones_like(x), 0 * x),
                                          Boundary(OUTFLOW), Boundary(OUTFLOW))
    assert np.all(interval_total_residual(flat, 3, model) == 0.0)
    sol = NodalSolution1D.from_functions(0.0, 1.0, 8, lambda x: (0 * x, 0 * x), bc, bc)
    sol.u[1 + 4] = 1.0  # node 4
    assert interval_total_residual(sol, 3, model)[0] == pytest.approx(0.5)


def test_interval_residual_index_check():
    sol = sine_solution(10)
    with pytest.raises(IndexError):
        interval_total_residual(sol, 10, models.burgers_smooth_1d())


def test_interval_residual_matches_vectorized():
    sol = sine_solution(12)
    model = models.burgers_smooth_1d()
    whole = interval_residuals(sol, model)
    for i in range(sol.n):
        np.testing.assert_allclose(interval_total_residual(sol, i, model), whole[i],
                                   rtol=1e-13, atol=1e-16)


def test_interval_residual_order_on_exact_data():
    model = models.burgers_smooth_1d()
    errs = []
    for n in (10, 20, 40, 80):
        sol = sine_solution(n, np.longdouble)
        errs.append(float(np.abs(interval_residuals(sol, model)).max()))
    assert min(order(errs)) >= 6.5


# }}}


# {{{ derivative sweep


def test_derivative_sweep_linear_data():
    line = lambda x: (2.0 + 3.0 * x, 3.0 + 0 * x)  # noqa: E731
    bc = Boundary(OUTFLOW)
    sol = NodalSolution1D.from_functions(0.0, 1.0, 16, line, bc, bc)
    np.testing.assert_allclose(derivative_sweep_1d(sol), 3.0, rtol=1e-12)


def test_derivative_sweep_order():
    errs = []
    for n in (10, 20, 40, 80):
        sol = sine_solution(n)
        errs.append(np.abs(derivative_sweep_1d(sol)[:, 0] - np.cos(sol.x)).max())
    assert min(order(errs)) >= 3.5


def test_derivative_sweep_survives_one_bad_side():
    n = 40
    sol = sine_solution(n)
    v_old = sol.v.copy()
    v_old[: n // 2 + 1] += 5.0  # derivatives left of the middle are garbage
    i = n // 2 + 1
    v_new = derivative_sweep_1d(sol, v_old)
    assert abs(v_new[i, 0] - np.cos(sol.x[i])) < 10 * sol.dx**2


def test_outflow_boundary_uses_one_sided_difference():
    bc = Boundary(OUTFLOW)
    cubic = lambda x: (x**3, 3 * x**2)  # noqa: E731
    sol = NodalSolution1D.from_functions(0.0, 1.0, 10, cubic, bc, bc)
    v = derivative_sweep_1d(sol)
    assert v[0, 0] == pytest.approx(0.0, abs=1e-12)
    assert v[-1, 0] == pytest.approx(3.0, rel=1e-12)


# }}}


# {{{ update and residue


def test_zero_residual_is_a_fixed_point():
    model = models.burgers_free_1d()
    const = lambda x: (0.7 + 0 * x, 0 * x)  # noqa: E731
    bc = Boundary(DIRICHLET, const)
    sol = NodalSolution1D.from_functions(0.0, 1.0, 12, const, bc, bc)
    new, residue = advance_1d(sol, model, 0.01, 1e-15)
    assert residue == 0.0
    np.testing.assert_array_equal(new.u, sol.u)
    assert l1_residue_1d(sol, model) == 0.0


def test_single_residual_goes_to_right_node():
    model = models.burgers_free_1d()
    const = lambda x: (1.0 + 0 * x, 0 * x)  # noqa: E731
    bc = Boundary(OUTFLOW)
    sol = NodalSolution1D.from_functions(0.0, 1.0, 12, const, bc, bc)
    sol.u[1 + 6] = 1.2  # one raised node: two nonzero intervals, both lambda > 0
    rhs = nodal_residuals(sol, model, 1e-15)
    nz = np.flatnonzero(rhs[:, 0])
    np.testing.assert_array_equal(nz, [6, 7])
    phi = interval_residuals(sol, model)[:, 0]
    assert rhs[6, 0] == phi[5] and rhs[7, 0] == phi[6]


def test_dirichlet_nodes_stay_fixed():
    model = models.burgers_smooth_1d()
    bc = Boundary(DIRICHLET, sine_state)
    sol = NodalSolution1D.from_functions(0.0, np.pi, 20, lambda x: (2 * np.sin(x), 2 * np.cos(x)),
                                         bc, bc)
    new = euler_step_1d(sol, model, compute_dt_1d(sol, model, 0.6))
    assert new.nodes[0, 0] == 0.0
    assert new.nodes[-1, 0] == pytest.approx(0.0, abs=1e-15)
    assert np.any(new.nodes[1:-1] != sol.nodes[1:-1])


def test_residue_is_homogeneous():
    model = models.burgers_free_1d()
    rng = np.random.default_rng(3)
    data = rng.uniform(1.0, 2.0, 17)
    bc = Boundary(OUTFLOW)
    sol = NodalSolution1D.from_functions(0.0, 1.0, 16, lambda x: (data, 0 * x), bc, bc)
    base = l1_residue_1d(sol, model)
    # Burgers flux is homogeneous of degree two and the ramp is scale invariant
    scaled = NodalSolution1D.from_functions(0.0, 1.0, 16, lambda x: (3 * data, 0 * x), bc, bc)
    assert l1_residue_1d(scaled, model) == pytest.approx(9 * base, rel=1e-12)


def test_dt_example():
    model = models.burgers_free_1d()
    bc = Boundary(OUTFLOW)
    sol = NodalSolution1D.from_functions(0.0, 1.0, 20, lambda x: (2.0 + 0 * x, 0 * x), bc, bc)
    assert compute_dt_1d(sol, model, 0.6) == pytest.approx(0.6 * 0.05 / 2.0)


def test_smooth_problem_n20_error_near_reference():
    report = run_to_steady(RunConfig("burgers1d-smooth", n=20))
    assert report.termination in ("converged", "stagnated")
    l1 = run_errors(report)[0]
    assert 4.69e-7 / 5 <= l1 <= 4.69e-7 * 5


# }}}
