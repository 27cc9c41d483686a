"""Two-dimensional residual distribution on a uniform Cartesian node grid.

Cell ``[x_i, x_{i+1}] x [y_j, y_{j+1}]`` carries

    Phi = int (f(u(x_{i+1}, y)) - f(u(x_i, y))) dy
        + int (g(u(x, y_{j+1})) - g(u(x, y_j))) dx - int int s dx dy,

with every one-dimensional integral done by the sixth-order Hermite WENO
quadrature and the source integrated dimension by dimension (inner x, outer
y).  The residual is split between the four vertices SW, SE, NW, NE by
upwinding in x and y (characteristic fields for systems, y first), a
zero-sum dissipation term is added, and each node relaxes with the four
parts it receives.  Afterwards ``v = u_x`` and ``w = u_y`` are rebuilt by
HWENO reconstruction along rows and columns, and ``z = u_xy`` by a column
reconstruction of the new ``v``.

Arrays are indexed ``[i, j, k]``: x node, y node, component.  One ghost
layer surrounds the grid, so node ``(i, j)`` sits at ``[i + 1, j + 1]``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from rdhweno import stencils
from rdhweno.models import Model2D, average_state_2d
from rdhweno.rd1d import (
    DIRICHLET,
    EXTRAPOLATION_4,
    ONE_SIDED_4,
    OUTFLOW,
    Boundary,
    DivergenceError,
    residue_of,
    roe_alpha,
)

REFLECT = "reflect"
FIELDS = "uvwz"


def _apply(mat, vec):
    return np.einsum("...ij,...j->...i", mat, vec)


@dataclass
class NodalSolution2D:
    """Point values and ``u_x, u_y, u_xy`` on nodes ``(x_i, y_j)``.

    Each field is an ``(nx + 3, ny + 3, m)`` array including one ghost
    layer.  Dirichlet ``state(x, y)`` functions return ``(u, v, w, z)``;
    reflecting edges need ``parity`` (+1 even, -1 odd per component).
    """

    ax: float
    bx: float
    ay: float
    by: float
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    z: np.ndarray
    left: Boundary
    right: Boundary
    bottom: Boundary
    top: Boundary

    def __post_init__(self) -> None:
        if not (self.bx > self.ax and self.by > self.ay):
            raise ValueError("empty domain")
        if self.u.ndim != 3 or any(getattr(self, f).shape != self.u.shape for f in FIELDS):
            raise ValueError("u, v, w, z must all be (nx + 3, ny + 3, m) arrays")
        if min(self.nx, self.ny) < 4:
            raise ValueError("need at least four cells per direction")
        for bc in self.boundaries():
            if bc.kind == REFLECT and bc.parity is None:
                raise ValueError("a reflecting edge needs a parity vector")

    def boundaries(self) -> tuple[Boundary, Boundary, Boundary, Boundary]:
        return self.left, self.right, self.bottom, self.top

    @property
    def nx(self) -> int:
        return self.u.shape[0] - 3

    @property
    def ny(self) -> int:
        return self.u.shape[1] - 3

    @property
    def m(self) -> int:
        return self.u.shape[2]

    @property
    def dtype(self):
        return self.u.dtype

    @property
    def dx(self) -> float:
        return (self.bx - self.ax) / self.nx

    @property
    def dy(self) -> float:
        return (self.by - self.ay) / self.ny

    @property
    def x_ext(self) -> np.ndarray:
        return self.ax + self.dx * np.arange(-1, self.nx + 2, dtype=self.dtype)

    @property
    def y_ext(self) -> np.ndarray:
        return self.ay + self.dy * np.arange(-1, self.ny + 2, dtype=self.dtype)

    @property
    def x(self) -> np.ndarray:
        return self.x_ext[1:-1]

    @property
    def y(self) -> np.ndarray:
        return self.y_ext[1:-1]

    def mesh(self, ghosts: bool = False) -> tuple[np.ndarray, np.ndarray]:
        if ghosts:
            return np.meshgrid(self.x_ext, self.y_ext, indexing="ij")
        return np.meshgrid(self.x, self.y, indexing="ij")

    def nodes(self, field: str = "u") -> np.ndarray:
        return getattr(self, field)[1:-1, 1:-1]

    def copy(self) -> NodalSolution2D:
        return replace(self, **{f: getattr(self, f).copy() for f in FIELDS})

    def updated_mask(self) -> np.ndarray:
        mask = np.ones((self.nx + 1, self.ny + 1), dtype=bool)
        if self.left.kind == DIRICHLET:
            mask[0, :] = False
        if self.right.kind == DIRICHLET:
            mask[-1, :] = False
        if self.bottom.kind == DIRICHLET:
            mask[:, 0] = False
        if self.top.kind == DIRICHLET:
            mask[:, -1] = False
        return mask

    @classmethod
    def from_functions(cls, bounds, nx, ny, initial, left, right, bottom, top,
                       dtype=np.float64):
        """Sample ``initial(x, y) -> (u, v, w, z)`` on the nodes.

        ``bounds`` is ``(ax, bx, ay, by)``.
        """
        ax, bx, ay, by = (dtype(b) for b in bounds)
        x = ax + (bx - ax) / nx * np.arange(nx + 1, dtype=dtype)
        y = ay + (by - ay) / ny * np.arange(ny + 1, dtype=dtype)
        X, Y = np.meshgrid(x, y, indexing="ij")
        fields = [np.asarray(f, dtype=dtype) for f in initial(X, Y)]
        fields = [f[..., None] if f.ndim == 2 else f for f in fields]
        m = fields[0].shape[-1]
        shape = (nx + 3, ny + 3, m)
        arrays = [np.zeros(shape, dtype) for _ in FIELDS]
        for arr, f in zip(arrays, fields):
            arr[1:-1, 1:-1] = np.broadcast_to(f, (nx + 1, ny + 1, m))
        sol = cls(ax, bx, ay, by, *arrays, left, right, bottom, top)
        sol.apply_dirichlet()
        sol.fill_ghosts()
        return sol

    # {{{ boundary handling

    def _state(self, bc: Boundary, x, y) -> list[np.ndarray]:
        x, y = np.broadcast_arrays(np.asarray(x, dtype=self.dtype), np.asarray(y, dtype=self.dtype))
        out = []
        for f in bc.state(x, y):
            f = np.asarray(f, dtype=self.dtype)
            if f.ndim == x.ndim:
                f = f[..., None]
            out.append(np.broadcast_to(f, x.shape + (self.m,)))
        return out

    def _edges(self):
        # x-edges cover node rows only; y-edges then run across the ghost
        # columns too, which also fills the corners
        yield self.left, 0, 0
        yield self.right, 0, -1
        yield self.bottom, 1, 0
        yield self.top, 1, -1

    def _line_coords(self, axis: int, index: int, ghosts: bool):
        if axis == 0:
            return self.x_ext[index], self.y_ext[1:-1]
        return (self.x_ext if ghosts else self.x_ext[1:-1]), self.y_ext[index]

    def _views(self, axis: int, fields: str, ghosts: bool):
        other = slice(None) if (axis == 1 and ghosts) else slice(1, -1)
        return {f: np.swapaxes(getattr(self, f), 0, axis)[:, other] for f in fields}

    def apply_dirichlet(self) -> None:
        for bc, axis, side in self._edges():
            if bc.kind != DIRICHLET:
                continue
            node = 1 if side == 0 else -2
            views = self._views(axis, FIELDS, ghosts=False)
            xs, ys = self._line_coords(axis, node, ghosts=False)
            for f, val in zip(FIELDS, self._state(bc, xs, ys)):
                views[f][node] = val

    def fill_ghosts(self, fields: str = FIELDS) -> None:
        for bc, axis, side in self._edges():
            ghost, inward = (0, 1) if side == 0 else (-1, -1)
            views = self._views(axis, fields, ghosts=True)
            if bc.kind == DIRICHLET:
                xs, ys = self._line_coords(axis, ghost, ghosts=True)
                for f, val in zip(FIELDS, self._state(bc, xs, ys)):
                    if f in views:
                        views[f][ghost] = val
            elif bc.kind == OUTFLOW:
                idx = [ghost + inward * k for k in range(1, 6)]
                for arr in views.values():
                    arr[ghost] = np.einsum("k,k...->...", EXTRAPOLATION_4, arr[idx])
            elif bc.kind == REFLECT:
                parity = np.asarray(bc.parity, dtype=self.dtype)
                normal = "v" if axis == 0 else "w"
                mirror = ghost + 2 * inward
                for f, arr in views.items():
                    odd = f in (normal, "z")
                    arr[ghost] = (-parity if odd else parity) * arr[mirror]
            else:
                raise ValueError(f"unsupported 2D boundary kind: {bc.kind}")

    # }}}


# {{{ residuals


def _block_residuals(u, v, w, z, X, Y, dx, dy, model: Model2D, epsilon):
    """Residuals of every cell whose 4x4 node window fits in the block."""
    F = model.flux_x(u, X, Y)
    dF = _apply(model.jacobian_x(u, X, Y), w)
    ef = stencils.integrate_along(F[1:-1], dF[1:-1], dy, axis=1, epsilon=epsilon)
    G = model.flux_y(u, X, Y)
    dG = _apply(model.jacobian_y(u, X, Y), v)
    eg = stencils.integrate_along(G[:, 1:-1], dG[:, 1:-1], dx, axis=0, epsilon=epsilon)
    phi = ef[1:] - ef[:-1] + eg[:, 1:] - eg[:, :-1]
    if model.has_source:
        phi = phi - _block_source(u, v, w, z, X, Y, dx, dy, model, epsilon)
    return phi


def _block_source(u, v, w, z, X, Y, dx, dy, model: Model2D, epsilon):
    s, s_x, s_y, s_xy = model.source(u, X, Y, v, w, z)
    inner = stencils.integrate_along(s, s_x, dx, axis=0, epsilon=epsilon)
    inner_y = stencils.integrate_along(s_y, s_xy, dx, axis=0, epsilon=epsilon)
    return stencils.integrate_along(inner, inner_y, dy, axis=1, epsilon=epsilon)


def _window(sol: NodalSolution2D, rows: slice, cols: slice):
    X, Y = sol.mesh(ghosts=True)
    return tuple(getattr(sol, f)[rows, cols] for f in FIELDS) + (X[rows, cols], Y[rows, cols])


def _check_cell(sol: NodalSolution2D, i: int, j: int) -> None:
    if not (0 <= i < sol.nx and 0 <= j < sol.ny):
        raise IndexError(f"cell ({i}, {j}) outside the grid")


def cell_residuals(sol: NodalSolution2D, model: Model2D,
                   epsilon: float = stencils.DEFAULT_EPSILON) -> np.ndarray:
    """Total residual of every cell, shape ``(nx, ny, m)``."""
    X, Y = sol.mesh(ghosts=True)
    return _block_residuals(sol.u, sol.v, sol.w, sol.z, X, Y, sol.dx, sol.dy, model, epsilon)


def cell_total_residual(sol: NodalSolution2D, i: int, j: int, model: Model2D,
                        epsilon: float = stencils.DEFAULT_EPSILON) -> np.ndarray:
    _check_cell(sol, i, j)
    block = _window(sol, slice(i, i + 4), slice(j, j + 4))
    return _block_residuals(*block, sol.dx, sol.dy, model, epsilon)[0, 0]


def edge_flux_integral(sol: NodalSolution2D, i: int, j: int, model: Model2D,
                       direction: str, epsilon: float = stencils.DEFAULT_EPSILON):
    """``int f(u(x_i, y)) dy`` over ``[y_j, y_j+1]`` (``direction="x"``) or
    ``int g(u(x, y_j)) dx`` over ``[x_i, x_i+1]`` (``direction="y"``)."""
    X, Y = sol.mesh(ghosts=True)
    if direction == "x":
        if not (0 <= i <= sol.nx and 0 <= j < sol.ny):
            raise IndexError(f"vertical edge ({i}, {j}) outside the grid")
        at = (i + 1, slice(j, j + 4))
        u = sol.u[at]
        vals = model.flux_x(u, X[at], Y[at])
        ders = _apply(model.jacobian_x(u, X[at], Y[at]), sol.w[at])
        return stencils.integrate(vals, ders[1:3], sol.dy, epsilon)
    if direction == "y":
        if not (0 <= i < sol.nx and 0 <= j <= sol.ny):
            raise IndexError(f"horizontal edge ({i}, {j}) outside the grid")
        at = (slice(i, i + 4), j + 1)
        u = sol.u[at]
        vals = model.flux_y(u, X[at], Y[at])
        ders = _apply(model.jacobian_y(u, X[at], Y[at]), sol.v[at])
        return stencils.integrate(vals, ders[1:3], sol.dx, epsilon)
    raise ValueError(f"direction must be 'x' or 'y', got {direction!r}")


def source_double_integral(sol: NodalSolution2D, i: int, j: int, model: Model2D,
                           epsilon: float = stencils.DEFAULT_EPSILON) -> np.ndarray:
    _check_cell(sol, i, j)
    if not model.has_source:
        return np.zeros(sol.m, sol.dtype)
    block = _window(sol, slice(i, i + 4), slice(j, j + 4))
    return _block_source(*block, sol.dx, sol.dy, model, epsilon)[0, 0]


# }}}


# {{{ distribution


def distribute_scalar_2d(phi, ubar, model: Model2D, delta: float, x=None, y=None):
    """Upwind split to (SW, SE, NW, NE) from the x and y ramps."""
    a = roe_alpha(model.eigenvalues_x(ubar, x, y), delta)
    b = roe_alpha(model.eigenvalues_y(ubar, x, y), delta)
    phi = np.asarray(phi)
    return ((1.0 - a) * (1.0 - b) * phi, a * (1.0 - b) * phi,
            (1.0 - a) * b * phi, a * b * phi)


def distribute_system_2d(phi, ubar, model: Model2D, delta: float, x=None, y=None):
    """Characteristic split: y fields first, then x fields of each y part."""
    lam_y, L_y, R_y = model.eigensystem_y(ubar, x, y)
    sig = roe_alpha(lam_y, delta)
    psi = _apply(L_y, phi)
    lower = _apply(R_y, (1.0 - sig) * psi)
    upper = _apply(R_y, sig * psi)
    lam_x, L_x, R_x = model.eigensystem_x(ubar, x, y)
    gam = roe_alpha(lam_x, delta)
    p1 = _apply(L_x, lower)
    p2 = _apply(L_x, upper)
    return (_apply(R_x, (1.0 - gam) * p1), _apply(R_x, gam * p1),
            _apply(R_x, (1.0 - gam) * p2), _apply(R_x, gam * p2))


def dissipation_residuals(u_sw, u_se, u_nw, u_ne, sigma: float, dx: float, dy: float):
    """Zero-sum smoothing parts for (SW, SE, NW, NE)."""
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative: {sigma}")
    c = 0.5 * sigma * max(dx, dy) ** 3
    return (c * ((u_sw - u_se) / dx + (u_sw - u_nw) / dy),
            c * ((u_se - u_sw) / dx + (u_se - u_ne) / dy),
            c * ((u_nw - u_ne) / dx + (u_nw - u_sw) / dy),
            c * ((u_ne - u_nw) / dx + (u_ne - u_se) / dy))


def _corners(sol: NodalSolution2D):
    u = sol.u[1:-1, 1:-1]
    return u[:-1, :-1], u[1:, :-1], u[:-1, 1:], u[1:, 1:]


def distribute_2d(phi, sol: NodalSolution2D, model: Model2D, delta: float):
    corners = _corners(sol)
    ubar = average_state_2d(*corners)
    xc = 0.5 * (sol.x[:-1] + sol.x[1:])
    yc = 0.5 * (sol.y[:-1] + sol.y[1:])
    Xc, Yc = np.meshgrid(xc, yc, indexing="ij")
    split = distribute_scalar_2d if model.m == 1 else distribute_system_2d
    return split(phi, ubar, model, delta, Xc, Yc)


def gather_2d(parts, shape) -> np.ndarray:
    """Sum each node's four incoming parts (SW part of the NE cell, ...)."""
    p1, p2, p3, p4 = parts
    rhs = np.zeros(shape, p1.dtype)
    rhs[:-1, :-1] += p1
    rhs[1:, :-1] += p2
    rhs[:-1, 1:] += p3
    rhs[1:, 1:] += p4
    return rhs


def nodal_residuals_2d(sol: NodalSolution2D, model: Model2D, delta: float, sigma: float = 0.0,
                       epsilon: float = stencils.DEFAULT_EPSILON) -> np.ndarray:
    phi = cell_residuals(sol, model, epsilon)
    parts = distribute_2d(phi, sol, model, delta)
    if sigma:
        diss = dissipation_residuals(*_corners(sol), sigma, sol.dx, sol.dy)
        parts = tuple(p + d for p, d in zip(parts, diss))
    rhs = gather_2d(parts, (sol.nx + 1, sol.ny + 1, sol.m))
    # a wall node also receives the mirror image of its cells' parts
    for bc, axis, side in sol._edges():
        if bc.kind == REFLECT:
            line = np.swapaxes(rhs, 0, axis)[0 if side == 0 else -1]
            line *= 1.0 + np.asarray(bc.parity, dtype=rhs.dtype)
    return rhs


def l1_residue_2d(sol: NodalSolution2D, model: Model2D, delta: float, sigma: float = 0.0,
                  epsilon: float = stencils.DEFAULT_EPSILON) -> float:
    rhs = nodal_residuals_2d(sol, model, delta, sigma, epsilon)
    return residue_of(rhs, sol.updated_mask(), sol.dx * sol.dy)


# }}}


# {{{ update


def _one_sided(arr, axis: int, side: int, h):
    """Fourth-order one-sided derivative at the first/last node along ``axis``."""
    a = np.swapaxes(arr, 0, axis)
    start, sign = (1, 1) if side == 0 else (-2, -1)
    idx = [start + sign * k for k in range(5)]
    return sign * np.einsum("k,k...->...", ONE_SIDED_4, a[idx]) / (12 * h)


def derivative_sweep_2d(sol: NodalSolution2D, v_old=None, w_old=None, z_old=None,
                        epsilon: float = stencils.DEFAULT_EPSILON):
    """New ``(v, w, z)`` on the nodes from ``sol.u`` and old ghosted fields.

    Outflow edges take one-sided normal derivatives; Dirichlet edges are
    left to :meth:`NodalSolution2D.apply_dirichlet`.
    """
    v_old = sol.v if v_old is None else v_old
    w_old = sol.w if w_old is None else w_old
    z_old = sol.z if z_old is None else z_old
    dx, dy = sol.dx, sol.dy
    # v on node columns, all rows including ghosts: (nx + 1, ny + 3, m)
    v_full = stencils.reconstruct_along(sol.u, v_old, dx, axis=0, epsilon=epsilon)
    w_new = stencils.reconstruct_along(sol.u[1:-1], w_old[1:-1], dy, axis=1, epsilon=epsilon)
    for bc, side in ((sol.left, 0), (sol.right, -1)):
        if bc.kind == OUTFLOW:
            v_full[side] = _one_sided(sol.u, 0, side, dx)
    z_new = stencils.reconstruct_along(v_full, z_old[1:-1], dy, axis=1, epsilon=epsilon)
    for bc, side in ((sol.bottom, 0), (sol.top, -1)):
        if bc.kind == OUTFLOW:
            w_new[:, side] = _one_sided(sol.u[1:-1], 1, side, dy)
            z_new[:, side] = _one_sided(v_full, 1, side, dy)
    return v_full[:, 1:-1], w_new, z_new


def advance_2d(sol: NodalSolution2D, model: Model2D, dt: float, delta: float,
               sigma: float = 0.0, epsilon: float = stencils.DEFAULT_EPSILON):
    """One forward-Euler pseudo-time step; returns ``(new_sol, residue)``.

    The residue is measured on the state before the update.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive: {dt}")
    area = sol.dx * sol.dy
    rhs = nodal_residuals_2d(sol, model, delta, sigma, epsilon)
    mask = sol.updated_mask()
    residue = residue_of(rhs, mask, area)

    new = sol.copy()
    new.u[1:-1, 1:-1][mask] -= (dt / area) * rhs[mask]
    if not np.all(np.isfinite(new.u)):
        raise DivergenceError("non-finite state after update")
    new.fill_ghosts("u")
    v, w, z = derivative_sweep_2d(new, sol.v, sol.w, sol.z, epsilon)
    new.v[1:-1, 1:-1] = v
    new.w[1:-1, 1:-1] = w
    new.z[1:-1, 1:-1] = z
    new.apply_dirichlet()
    new.fill_ghosts("vwz")
    return new, residue


def euler_step_2d(sol: NodalSolution2D, model: Model2D, dt: float, sigma: float = 0.0,
                  delta: float = 1e-15, epsilon: float = stencils.DEFAULT_EPSILON):
    return advance_2d(sol, model, dt, delta, sigma, epsilon)[0]


def compute_dt_2d(sol: NodalSolution2D, model: Model2D, cfl: float) -> float:
    X, Y = sol.mesh()
    u = sol.nodes()
    sx = np.max(np.abs(model.eigenvalues_x(u, X, Y)))
    sy = np.max(np.abs(model.eigenvalues_y(u, X, Y)))
    rate = float(sx / sol.dx + sy / sol.dy)
    if not np.isfinite(rate):
        raise DivergenceError("non-finite wave speed")
    return cfl / max(rate, 1e-300)


# }}}
