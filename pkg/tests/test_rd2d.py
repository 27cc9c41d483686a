from __future__ import annotations

import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from rdhweno import models
from rdhweno.problems import get_problem
from rdhweno.rd1d import DIRICHLET, OUTFLOW, Boundary, NodalSolution1D, distribute_1d, interval_residuals
from rdhweno.rd2d import (
    NodalSolution2D,
    advance_2d,
    cell_residuals,
    cell_total_residual,
    compute_dt_2d,
    derivative_sweep_2d,
    dissipation_residuals,
    distribute_2d,
    distribute_scalar_2d,
    distribute_system_2d,
    edge_flux_integral,
    euler_step_2d,
    gather_2d,
    source_double_integral,
)

SQ2 = math.sqrt(2.0)
diag_exact = get_problem("burgers2d-smooth").setup().exact


def order(errors):
    return [math.log2(a / b) for a, b in zip(errors, errors[1:])]


def exact_square(n: int, dtype=np.float64, side=np.pi / SQ2) -> NodalSolution2D:
    bc = Boundary(DIRICHLET, diag_exact)
    return NodalSolution2D.from_functions((0.0, side, 0.0, side), n, n, diag_exact,
                                          bc, bc, bc, bc, dtype)


def constant_square(value, model_m: int = 1, n: int = 8, bc_kind=OUTFLOW):
    value = np.asarray(value, dtype=float)

    def state(X, Y):
        u = np.broadcast_to(value, X.shape + value.shape) if model_m > 1 else value + 0 * X
        zero = np.zeros_like(u)
        return u, zero, zero, zero

    bc = Boundary(bc_kind, state if bc_kind == DIRICHLET else None)
    return NodalSolution2D.from_functions((0.0, 1.0, 0.0, 1.0), n, n, state, bc, bc, bc, bc)


# {{{ sympy oracles for the smooth diagonal problem

_x, _y = sp.symbols("x y", real=True)
_xi = (_x + _y) / sp.sqrt(2)
_x0, _x1, _y0, _y1 = sp.symbols("x0 x1 y0 y1", real=True)
_edge_x = sp.lambdify((_x, _y0, _y1), sp.integrate(sp.sin(_xi) ** 2 / (2 * sp.sqrt(2)),
                                                    (_y, _y0, _y1)), "mpmath")
_cell_src = sp.lambdify((_x0, _x1, _y0, _y1),
                        sp.integrate(sp.sin(_xi) * sp.cos(_xi), (_x, _x0, _x1), (_y, _y0, _y1)),
                        "mpmath")

# }}}


# {{{ edge and source integrals


def test_edge_integral_constant_state():
    model = models.burgers_diagonal_2d(None)
    sol = constant_square(0.8)
    f = model.flux_x(np.array([0.8]), 0, 0)[0]
    assert edge_flux_integral(sol, 3, 2, model, "x")[0] == pytest.approx(f * sol.dy, rel=1e-14)
    assert edge_flux_integral(sol, 3, 2, model, "y")[0] == pytest.approx(f * sol.dx, rel=1e-14)


def test_edge_integral_y_independent_data():
    model = models.burgers_diagonal_2d(None)
    prof = lambda X, Y: (np.sin(X) + 2, np.cos(X), 0 * X, 0 * X)  # noqa: E731
    bc = Boundary(DIRICHLET, prof)
    sol = NodalSolution2D.from_functions((0, 1, 0, 1), 10, 10, prof, bc, bc, bc, bc)
    got = edge_flux_integral(sol, 4, 5, model, "x")[0]
    u = np.sin(sol.x[4]) + 2
    assert got == pytest.approx(u * u / (2 * SQ2) * sol.dy, rel=1e-13)


def test_edge_integral_bad_direction():
    sol = constant_square(1.0)
    with pytest.raises(ValueError):
        edge_flux_integral(sol, 0, 0, models.burgers_diagonal_2d(None), "z")


def test_edge_integral_order():
    model = models.burgers_diagonal_2d(None)
    errs = []
    for n in (8, 16, 32, 64):
        sol = exact_square(n, np.longdouble)
        i, j = n // 2, n // 4
        got = edge_flux_integral(sol, i, j, model, "x")[0]
        want = _edge_x(float(sol.x[i]), float(sol.y[j]), float(sol.y[j + 1]))
        errs.append(abs(float(got - np.longdouble(str(want)))))
    assert min(order(errs)) >= 6.5


def test_source_integral_constant():
    const = lambda u, x, y: (3.0 + 0 * u,) + tuple(0 * u for _ in range(7))  # noqa: E731
    model = models.ScalarLaw2D(models._burgers_f, models._identity,
                               models._burgers_f, models._identity, const)
    sol = constant_square(0.4)
    assert source_double_integral(sol, 2, 5, model)[0] == pytest.approx(3 * sol.dx * sol.dy,
                                                                        rel=1e-14)
    assert source_double_integral(sol, 2, 5, models.burgers_diagonal_2d(None))[0] == 0.0


def test_source_integral_order():
    model = models.burgers_diagonal_2d("sincos")
    errs = []
    for n in (8, 16, 32, 64):
        sol = exact_square(n, np.longdouble)
        i, j = n // 3, n // 2
        got = source_double_integral(sol, i, j, model)[0]
        want = _cell_src(*(float(t) for t in (sol.x[i], sol.x[i + 1], sol.y[j], sol.y[j + 1])))
        errs.append(abs(float(got - np.longdouble(str(want)))))
    assert min(order(errs)) >= 6.5


def test_cell_residual_zero_for_constant_state():
    sol = constant_square(1.3)
    assert np.all(cell_residuals(sol, models.burgers_shear_2d()) == 0.0)


def test_cell_residual_order_on_exact_data():
    model = models.burgers_diagonal_2d("sincos")
    errs = []
    for n in (10, 20, 40, 80):
        sol = exact_square(n, np.longdouble)
        errs.append(float(np.abs(cell_residuals(sol, model)).max()))
    assert min(order(errs)) >= 6.5


def test_single_cell_matches_vectorized():
    sol = exact_square(12)
    sol.u[1:-1, 1:-1] *= 1.1
    model = models.burgers_diagonal_2d("sincos")
    whole = cell_residuals(sol, model)
    for i, j in ((0, 0), (5, 7), (11, 11)):
        np.testing.assert_allclose(cell_total_residual(sol, i, j, model), whole[i, j],
                                   rtol=1e-13, atol=1e-17)
    with pytest.raises(IndexError):
        cell_total_residual(sol, 12, 0, model)


# }}}


# {{{ distribution and dissipation


def _ramped(alpha, beta):
    # a model whose x and y speeds are the requested ramps' arguments
    lam = lambda a: {1.0: 1.0, 0.0: -1.0}[a]  # noqa: E731
    return models.ScalarLaw2D(lambda u: lam(alpha) * u, lambda u: lam(alpha) + 0 * u,
                              lambda u: lam(beta) * u, lambda u: lam(beta) + 0 * u)


def test_scalar_split_examples():
    phi = 2.5
    assert distribute_scalar_2d(phi, 0.0, _ramped(1.0, 1.0), 1e-15) == (0, 0, 0, phi)
    assert distribute_scalar_2d(phi, 0.0, _ramped(1.0, 0.0), 1e-15) == (0, phi, 0, 0)


@settings(max_examples=300)
@given(st.floats(-100, 100), st.floats(-3, 3), st.floats(1e-3, 2.0))
def test_scalar_split_conserves(phi, ubar, delta):
    parts = distribute_scalar_2d(phi, ubar, models.burgers_shear_2d(), delta)
    assert sum(parts) == pytest.approx(phi, rel=1e-12, abs=1e-300)


def test_dissipation_example():
    parts = dissipation_residuals(0.0, 1.0, 0.0, 1.0, sigma=2.0, dx=1.0, dy=1.0)
    assert parts == (-1.0, 1.0, -1.0, 1.0)
    assert dissipation_residuals(2.0, 2.0, 2.0, 2.0, 5.0, 0.1, 0.2) == (0, 0, 0, 0)


@settings(max_examples=300)
@given(st.lists(st.floats(-1e3, 1e3), min_size=4, max_size=4),
       st.floats(0, 10), st.floats(1e-3, 1), st.floats(1e-3, 1))
def test_dissipation_sums_to_zero(corners, sigma, dx, dy):
    parts = dissipation_residuals(*np.array(corners), sigma, dx, dy)
    scale = max(abs(p) for p in parts) + 1e-300
    assert abs(sum(parts)) <= 1e-14 * scale * 4


def test_system_split_reduces_to_scalar():
    model = models.burgers_shear_2d()
    phi = np.array([[0.7], [-1.1]])
    ubar = np.array([[0.3], [-0.2]])
    got = distribute_system_2d(phi, ubar, model, 0.2)
    want = distribute_scalar_2d(phi, ubar, model, 0.2)
    for g, w in zip(got, want):
        np.testing.assert_allclose(g, w, rtol=1e-15)


def test_supersonic_euler_sends_everything_ne():
    model = models.euler2d_model()
    ubar = models.euler_conserved(1.0, 3.0, 3.0, 1.0 / 1.4)
    phi = np.array([0.1, -0.4, 0.25, 1.3])
    parts = distribute_system_2d(phi, ubar, model, 0.1)
    for p in parts[:3]:
        np.testing.assert_allclose(p, 0.0, atol=1e-12)
    np.testing.assert_allclose(parts[3], phi, rtol=1e-12)


@settings(max_examples=300)
@given(st.lists(st.floats(-10, 10), min_size=4, max_size=4), st.floats(1e-3, 1.0))
def test_euler_inflow_split_conserves(phi, delta):
    model = models.euler2d_model()
    ubar = models.euler_conserved(1.0, 2.9, 0.0, 1.0 / 1.4)
    phi = np.array(phi)
    parts = distribute_system_2d(phi, ubar, model, delta)
    scale = max(np.abs(phi).max(), 1e-12)
    assert np.abs(sum(parts) - phi).max() <= 1e-12 * scale * 10


@settings(max_examples=200)
@given(st.floats(0.5, 3), st.floats(-2, 2), st.floats(-2, 2), st.floats(0.3, 3),
       st.lists(st.floats(-10, 10), min_size=4, max_size=4))
def test_euler_random_split_conserves(rho, vx, vy, p, phi):
    model = models.euler2d_model()
    ubar = models.euler_conserved(rho, vx, vy, p)
    phi = np.array(phi)
    parts = distribute_system_2d(phi, ubar, model, 0.1)
    scale = max(np.abs(phi).max(), 1e-12) * max(1.0, np.abs(ubar).max())
    assert np.abs(sum(parts) - phi).max() <= 1e-11 * scale


def test_gather_pattern():
    parts = [np.zeros((2, 2, 1)) for _ in range(4)]
    for k, p in enumerate(parts):
        p[0, 0] = k + 1
    rhs = gather_2d(parts, (3, 3, 1))[..., 0]
    # cell (0, 0): SW to node (0,0), SE to (1,0), NW to (0,1), NE to (1,1)
    assert rhs[0, 0] == 1 and rhs[1, 0] == 2 and rhs[0, 1] == 3 and rhs[1, 1] == 4
    assert rhs.sum() == 10


# }}}


# {{{ derivative sweep


def test_derivative_sweep_bilinear():
    bil = lambda X, Y: (1 + 2 * X + 3 * Y + 4 * X * Y, 2 + 4 * Y, 3 + 4 * X, 4 + 0 * X)  # noqa: E731
    bc = Boundary(OUTFLOW)
    sol = NodalSolution2D.from_functions((0, 1, 0, 2), 10, 12, bil, bc, bc, bc, bc)
    v, w, z = derivative_sweep_2d(sol)
    X, Y = sol.mesh()
    _, v0, w0, z0 = bil(X, Y)
    np.testing.assert_allclose(v[..., 0], v0, rtol=1e-11)
    np.testing.assert_allclose(w[..., 0], w0, rtol=1e-11)
    np.testing.assert_allclose(z[..., 0], z0, rtol=1e-11)


def test_derivative_sweep_constant():
    sol = constant_square(2.0)
    for field in derivative_sweep_2d(sol):
        np.testing.assert_allclose(field, 0.0, atol=1e-12)


def test_derivative_sweep_order():
    errs = {"v": [], "w": [], "z": []}
    for n in (10, 20, 40, 80):
        sol = exact_square(n)
        X, Y = sol.mesh()
        _, v0, w0, z0 = diag_exact(X, Y)
        inner = (slice(1, -1), slice(1, -1), 0)
        for key, got, want in zip("vwz", derivative_sweep_2d(sol), (v0, w0, z0)):
            errs[key].append(np.abs(got[inner] - want[1:-1, 1:-1]).max())
    for key, e in errs.items():
        assert min(order(e)) >= 3.5, key


# }}}


# {{{ update


def test_uniform_state_is_fixed_point():
    sol = constant_square(0.6)
    model = models.burgers_shear_2d()
    new, residue = advance_2d(sol, model, 0.01, 1e-15, sigma=2.0)
    assert residue == 0.0
    np.testing.assert_array_equal(new.u, sol.u)


def test_uniform_euler_state_is_fixed_point():
    state = models.euler_conserved(1.0, 2.9, 0.0, 1.0 / 1.4)
    sol = constant_square(state, model_m=4)
    new = euler_step_2d(sol, models.euler2d_model(), 1e-3, sigma=8.0, delta=0.1)
    np.testing.assert_allclose(new.u, sol.u, rtol=1e-15)


def test_dt_splits_between_directions():
    model = models.burgers_shear_2d()  # speeds u and 1
    sol = constant_square(1.0, n=10)
    assert compute_dt_2d(sol, model, 0.2) == pytest.approx(0.2 / (1 / 0.1 + 1 / 0.1))


# }}}


# {{{ reduction to one dimension


def _slab_models():
    def src2(u, x, y):
        z = 0 * u
        return (np.sin(x) * np.cos(x) + z, z, np.cos(2 * x) + z, z, z, z, z, z)

    m2 = models.ScalarLaw2D(models._burgers_f, models._identity,
                            lambda u: 0 * u, lambda u: 0 * u, src2)
    return models.burgers_smooth_1d(), m2


def test_y_constant_data_reproduces_1d_residuals():
    prof1 = lambda x: (1.3 * np.sin(x) + 0.2, 1.3 * np.cos(x))  # noqa: E731
    prof2 = lambda X, Y: prof1(X) + (0 * X, 0 * X)  # noqa: E731
    m1, m2 = _slab_models()
    n, ny = 24, 10
    bc1 = Boundary(DIRICHLET, prof1)
    bc2 = Boundary(DIRICHLET, prof2)
    s1 = NodalSolution1D.from_functions(0.0, np.pi, n, prof1, bc1, bc1)
    s2 = NodalSolution2D.from_functions((0.0, np.pi, 0.0, 0.5), n, ny, prof2, bc2, bc2, bc2, bc2)
    phi1 = interval_residuals(s1, m1)[:, 0]
    phi2 = cell_residuals(s2, m2)[..., 0]
    for j in range(ny):
        np.testing.assert_allclose(phi2[:, j], phi1 * s2.dy, rtol=1e-12, atol=1e-15)

    # with g' = 0 the y ramp sits at its midpoint, halving the 1D split
    left, right = distribute_1d(phi1[:, None], s1, m1, 1e-15)
    sw, se, nw, ne = distribute_2d(cell_residuals(s2, m2), s2, m2, 1e-15)
    np.testing.assert_allclose(sw[:, 0, 0] + nw[:, 0, 0], left[:, 0] * s2.dy, rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(se[:, 0, 0], ne[:, 0, 0], rtol=1e-15)
    np.testing.assert_allclose(se[:, 0, 0] * 2, right[:, 0] * s2.dy, rtol=1e-12, atol=1e-15)


# }}}
