"""Registry of the benchmark steady-state problems.

Every entry knows its model, domain, initial data (with closed-form
derivatives), boundary treatment per edge, exact steady solution where one
exists, and default solver parameters.  Problems take a small parameter
dict (e.g. ``beta`` for the smooth Burgers case) so variants stay one
registry entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from rdhweno import models
from rdhweno.rd1d import DIRICHLET, OUTFLOW, Boundary, NodalSolution1D
from rdhweno.rd2d import REFLECT, NodalSolution2D

SQ2 = np.sqrt(2.0)

PRECISIONS = {"double": np.float64, "extended": np.longdouble}


@dataclass
class Setup:
    """A problem instantiated for one parameter set (grid independent)."""

    model: Any
    initial: Callable
    boundaries: tuple[Boundary, ...]
    exact: Callable | None = None
    mask: Callable | None = None
    component: int = 0
    notes: str = ""


@dataclass(frozen=True)
class Section:
    """A line along which the solution is sampled for output."""

    name: str
    axis: str  # "x" (row y = value), "y" (column x = value) or "diagonal"
    value: float = 0.0


@dataclass(frozen=True)
class ProblemSpec:
    id: str
    dimension: int
    title: str
    bounds: tuple[float, ...]
    build: Callable[[dict], Setup]
    params: dict = field(default_factory=dict)
    cfl: float = 0.6
    sigma: float = 0.0
    delta: float = 1e-15
    grids: tuple[int, ...] = ()
    default_n: int = 80
    aspect: float = 1.0  # M = round(aspect * N) for 2D problems
    precision: str = "double"
    residue_tol: float = 1e-13
    stagnation_window: int = 5000
    sections: tuple[Section, ...] = ()
    has_exact: bool = True

    def setup(self, params: dict | None = None) -> Setup:
        merged = dict(self.params)
        unknown = set(params or {}) - set(merged)
        if unknown:
            raise ValueError(f"{self.id}: unknown parameter(s) {sorted(unknown)}")
        merged.update(params or {})
        return self.build(merged)

    def default_m(self, n: int) -> int:
        return max(int(round(self.aspect * n)), 1)

    def solution(self, setup: Setup, n: int, m: int | None = None,
                 precision: str | None = None):
        dtype = PRECISIONS[precision or self.precision]
        if self.dimension == 1:
            a, b = self.bounds
            left, right = setup.boundaries
            return NodalSolution1D.from_functions(a, b, n, setup.initial, left, right, dtype)
        m = self.default_m(n) if m is None else m
        return NodalSolution2D.from_functions(self.bounds, n, m, setup.initial,
                                              *setup.boundaries, dtype=dtype)


def _zeros_like_all(x, k):
    z = np.zeros_like(np.asarray(x))
    return tuple(z for _ in range(k))


# {{{ one-dimensional Burgers


def _burgers_sine_exact(beta: float):
    """Steady solution reached from ``beta sin x``: a branch or a shock."""
    if beta >= 1.0:
        return lambda x: (np.sin(x), np.cos(x))
    if beta <= -1.0:
        return lambda x: (-np.sin(x), -np.cos(x))
    xs = np.pi - np.arcsin(np.sqrt(1.0 - beta * beta))

    def exact(x):
        sign = np.where(np.asarray(x) < xs, 1.0, -1.0)
        return sign * np.sin(x), sign * np.cos(x)

    return exact


def burgers_shock_location(beta: float) -> float:
    """Interior shock position of the sine problem for ``|beta| < 1``."""
    if not abs(beta) < 1.0:
        raise ValueError("the steady state has an interior shock only for |beta| < 1")
    return float(np.pi - np.arcsin(np.sqrt(1.0 - beta * beta)))


def _build_burgers_sine(p: dict) -> Setup:
    beta = float(p["beta"])
    exact = _burgers_sine_exact(beta)
    bc = Boundary(DIRICHLET, exact)
    return Setup(
        model=models.burgers_smooth_1d(),
        initial=lambda x: (beta * np.sin(x), beta * np.cos(x)),
        boundaries=(bc, bc),
        exact=exact,
    )


COUPLED_SHOCK = float(np.arcsin(0.45) / np.pi)


def _coupled_exact(xs: float = COUPLED_SHOCK):
    def exact(x):
        x = np.asarray(x)
        offset = np.where(x < xs, 1.0, -0.1)
        return offset - np.sin(np.pi * x), -np.pi * np.cos(np.pi * x)

    return exact


def _build_burgers_coupled(p: dict) -> Setup:
    exact = _coupled_exact()
    bc = Boundary(DIRICHLET, exact)

    def initial(x):
        x = np.asarray(x)
        return np.where(x < 0.5, 1.0, -0.1) + 0.0 * x, 0.0 * x

    return Setup(
        model=models.burgers_coupled_1d(),
        initial=initial,
        boundaries=(bc, bc),
        exact=exact,
        mask=lambda x: (x >= 0.5) & (x <= 1.0),
    )


# }}}


# {{{ one-dimensional systems


def _build_swe(p: dict) -> Setup:
    model = models.shallow_water_model(float(p["g"]))

    def exact(x):
        x = np.asarray(x)
        h = 10.0 - models.bottom(x)
        return (np.stack([h, 0.0 * x], axis=-1),
                np.stack([-models.bottom_x(x), 0.0 * x], axis=-1))

    bc = Boundary(DIRICHLET, exact)
    return Setup(model=model, initial=exact, boundaries=(bc, bc), exact=exact)


def _build_nozzle(p: dict) -> Setup:
    geometry = models.NozzleGeometry(
        m_in=float(p["m_in"]), m_out=float(p["m_out"]), x_shock=float(p["x_shock"]),
        area_follows_shock=bool(p["area_follows_shock"]),
    )
    model = models.nozzle_euler_model(geometry)
    left = Boundary(DIRICHLET, geometry.state)
    right = Boundary(OUTFLOW)
    return Setup(
        model=model,
        initial=geometry.state,
        boundaries=(left, right),
        exact=None,
        notes="no closed-form steady state; the initial profile is a guess",
    )


# }}}


# {{{ two-dimensional Burgers


def _diag_sine_exact(X, Y):
    xi = (X + Y) / SQ2
    s = np.sin(xi)
    c = np.cos(xi) / SQ2
    return s, c, c, -0.5 * s


def _build_burgers2d_smooth(p: dict) -> Setup:
    beta = float(p["beta"])
    bc = Boundary(DIRICHLET, _diag_sine_exact)

    def initial(X, Y):
        return tuple(beta * f for f in _diag_sine_exact(X, Y))

    return Setup(
        model=models.burgers_diagonal_2d("sincos"),
        initial=initial,
        boundaries=(bc, bc, bc, bc),
        exact=_diag_sine_exact,
    )


def _diag_coupled_exact(X, Y, xs: float = COUPLED_SHOCK):
    xi = (X + Y) / SQ2
    offset = np.where(xi < xs, 1.0, -0.1)
    d = -np.pi * np.cos(np.pi * xi) / SQ2
    return offset - np.sin(np.pi * xi), d, d, 0.5 * np.pi**2 * np.sin(np.pi * xi)


def _build_burgers2d_shock(p: dict) -> Setup:
    bc = Boundary(DIRICHLET, _diag_coupled_exact)

    def initial(X, Y):
        xi = (X + Y) / SQ2
        return (np.where(xi < 0.5, 1.0, -0.1),) + _zeros_like_all(xi, 3)

    return Setup(
        model=models.burgers_diagonal_2d("coupled"),
        initial=initial,
        boundaries=(bc, bc, bc, bc),
        exact=_diag_coupled_exact,
    )


def shear_exact(X, Y):
    """Fan merging into a shock with foot at (3/4, 1/2); derivatives are those
    of the fan where it applies, zero elsewhere."""
    X, Y = np.broadcast_arrays(np.asarray(X, dtype=float), np.asarray(Y, dtype=float))
    below = Y < 0.5
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (X - 0.75) / (Y - 0.5)
        fan = np.clip(ratio, -0.5, 1.5)
        in_fan = below & (ratio > -0.5) & (ratio < 1.5)
        u_x = np.where(in_fan, 1.0 / (Y - 0.5), 0.0)
        u_y = np.where(in_fan, -ratio / (Y - 0.5), 0.0)
        u_xy = np.where(in_fan, -1.0 / (Y - 0.5) ** 2, 0.0)
    upper = np.where(-2.0 * (X - 0.75) + (Y - 0.5) <= 0.0, -0.5, 1.5)
    return np.where(below, fan, upper), u_x, u_y, u_xy


def _build_burgers2d_shear(p: dict) -> Setup:
    def constant(value):
        return lambda X, Y: (value + 0.0 * X,) + _zeros_like_all(X, 3)

    def ramp(X, Y):
        return 1.5 - 2.0 * X + 0.0 * Y, -2.0 + 0.0 * X, 0.0 * X, 0.0 * X

    return Setup(
        model=models.burgers_shear_2d(),
        initial=ramp,
        boundaries=(Boundary(DIRICHLET, constant(1.5)), Boundary(DIRICHLET, constant(-0.5)),
                    Boundary(DIRICHLET, ramp), Boundary(OUTFLOW)),
        exact=shear_exact,
    )


# }}}


# {{{ two-dimensional systems


def cauchy_riemann_exact(X, Y):
    """Piecewise-constant reference field, used for data and initial guess."""
    X, Y = np.broadcast_arrays(np.asarray(X, dtype=float), np.asarray(Y, dtype=float))
    u = np.select(
        [(X > 1) & (Y > 1), (X > 1) & (Y <= 1), (X <= 1) & (Y > 1), (X <= 1) & (Y > -1)],
        [1.0, -1.0, -1.0, 1.5], default=1.0)
    v = np.select(
        [(X > -1) & (Y > 1), (X <= -1) & (Y > 1), (X > -1) & (Y <= 1), (X <= -1) & (Y > -1)],
        [1.0, -1.0, -1.0, 1.5], default=2.0)
    state = np.stack([u, v], axis=-1)
    zero = np.zeros_like(state)
    return state, zero, zero, zero


def _build_cauchy_riemann(p: dict) -> Setup:
    bc = Boundary(DIRICHLET, cauchy_riemann_exact)
    return Setup(
        model=models.cauchy_riemann_model(),
        initial=cauchy_riemann_exact,
        boundaries=(bc, bc, bc, bc),
        exact=None,
        notes="initialised from the reference field rather than the Riemann data",
    )


SHOCK_REFLECTION_INFLOW = (1.0, 2.9, 0.0, 1.0 / models.GAMMA)
SHOCK_REFLECTION_TOP = (1.69997, 2.61934, -0.50632, 1.52819)
# wall parity of (rho, rho u, rho v, E): the normal momentum is odd
WALL_PARITY_Y = (1.0, 1.0, -1.0, 1.0)


def _euler_constant(prim):
    state = models.euler_conserved(*prim)

    def fn(X, Y):
        shape = np.broadcast(np.asarray(X), np.asarray(Y)).shape + (4,)
        u = np.broadcast_to(state, shape)
        zero = np.zeros(shape)
        return u, zero, zero, zero

    return fn


def _build_shock_reflection(p: dict) -> Setup:
    inflow = _euler_constant(SHOCK_REFLECTION_INFLOW)
    top = _euler_constant(SHOCK_REFLECTION_TOP)
    return Setup(
        model=models.euler2d_model(),
        initial=inflow,
        boundaries=(Boundary(DIRICHLET, inflow), Boundary(OUTFLOW),
                    Boundary(REFLECT, parity=WALL_PARITY_Y), Boundary(DIRICHLET, top)),
        exact=None,
    )


# }}}


PROBLEMS: dict[str, ProblemSpec] = {}
ALIASES = {"shock-reflection": "euler2d-shock-reflection"}


def _register(spec: ProblemSpec) -> None:
    PROBLEMS[spec.id] = spec


_register(ProblemSpec(
    "burgers1d-smooth", 1, "Burgers with sin x cos x source, smooth steady state",
    (0.0, np.pi), _build_burgers_sine, params={"beta": 2.0},
    grids=(20, 40, 80, 160, 320), default_n=80, precision="extended",
    residue_tol=1e-16, stagnation_window=2000,
))
_register(ProblemSpec(
    "burgers1d-interior-shock", 1, "Burgers with sin x cos x source, interior shock",
    (0.0, np.pi), _build_burgers_sine, params={"beta": 0.5},
    grids=(100,), default_n=100,
))
_register(ProblemSpec(
    "burgers1d-coupled-source", 1, "Burgers with source -pi cos(pi x) u and a stable shock",
    (0.0, 1.0), _build_burgers_coupled,
    grids=(20, 40, 80, 160, 320), default_n=100, residue_tol=1e-16, stagnation_window=2000,
))
_register(ProblemSpec(
    "swe1d", 1, "Shallow water lake at rest over a Gaussian bump",
    (0.0, 10.0), _build_swe, params={"g": models.GRAVITY},
    grids=(20, 40, 80, 160, 320), default_n=80, residue_tol=1e-16, stagnation_window=2000,
))
_register(ProblemSpec(
    "nozzle1d", 1, "Quasi-1D nozzle flow with a standing shock",
    (0.0, 1.0), _build_nozzle,
    params={"m_in": 0.8, "m_out": 1.8, "x_shock": 0.5, "area_follows_shock": True},
    grids=(101,), default_n=101, has_exact=False,
))
_register(ProblemSpec(
    "burgers2d-smooth", 2, "Diagonal Burgers with smooth steady state",
    (0.0, np.pi / SQ2, 0.0, np.pi / SQ2), _build_burgers2d_smooth, params={"beta": 1.2},
    cfl=0.2, grids=(10, 20, 40, 80, 160), default_n=40, precision="extended",
    residue_tol=1e-16, stagnation_window=2000,
))
_register(ProblemSpec(
    "burgers2d-diagonal-shock", 2, "Diagonal Burgers with a stable oblique shock",
    (0.0, 1.0 / SQ2, 0.0, 1.0 / SQ2), _build_burgers2d_shock,
    cfl=0.2, sigma=4.0, grids=(80,), default_n=80,
    sections=(Section("diagonal", "diagonal"),),
))
_register(ProblemSpec(
    "burgers2d-shear", 2, "Burgers fan merging into a shock",
    (0.0, 1.0, 0.0, 1.0), _build_burgers2d_shear,
    cfl=0.2, sigma=2.0, grids=(80,), default_n=80,
    sections=(Section("y0.25", "x", 0.25), Section("y0.5", "x", 0.5), Section("y0.75", "x", 0.75)),
))
_register(ProblemSpec(
    "cauchy-riemann", 2, "Self-similar Cauchy-Riemann system",
    (-2.0, 2.0, -2.0, 2.0), _build_cauchy_riemann,
    cfl=0.2, sigma=1.0, delta=0.4, grids=(80,), default_n=80, has_exact=False,
))
_register(ProblemSpec(
    "euler2d-shock-reflection", 2, "Euler regular shock reflection",
    (0.0, 4.0, 0.0, 1.0), _build_shock_reflection,
    cfl=0.2, sigma=8.0, delta=0.1, grids=(160,), default_n=160, aspect=0.25,
    has_exact=False,
))


def get_problem(name: str) -> ProblemSpec:
    key = ALIASES.get(name, name)
    try:
        return PROBLEMS[key]
    except KeyError:
        known = ", ".join(sorted(PROBLEMS) + sorted(ALIASES))
        raise KeyError(f"unknown problem {name!r}; known: {known}") from None
