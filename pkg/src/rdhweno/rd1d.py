"""One-dimensional residual distribution on a uniform node grid.

Each interval ``[x_i, x_{i+1}]`` carries the total residual

    Phi = f(u_{i+1}) - f(u_i) - int s dx

(the source integral by sixth-order Hermite WENO quadrature), which is split
between its two end nodes by upwinding in the characteristic fields of the
interval average state.  Nodes relax in pseudo-time with forward Euler and
their derivatives are then rebuilt from the new values and the old
derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from rdhweno import stencils
from rdhweno.models import Model1D, average_state_1d

DIRICHLET = "dirichlet"
OUTFLOW = "outflow"

# ghost value from a quartic through the five nearest nodes
EXTRAPOLATION_4 = np.array([5.0, -10.0, 10.0, -5.0, 1.0])
# fourth-order one-sided first derivative, boundary node first
# (divide by 12 dx)
ONE_SIDED_4 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0])


class DivergenceError(RuntimeError):
    """The pseudo-time iteration produced a non-finite state."""


@dataclass(frozen=True)
class Boundary:
    """Boundary treatment of one end (1D) or one edge (2D).

    ``state`` maps positions to the prescribed state and its derivatives; it
    is required for Dirichlet ends and is evaluated at ghost points too.
    ``parity`` marks, for reflecting walls, which components are odd.
    """

    kind: str = DIRICHLET
    state: Callable | None = None
    parity: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind == DIRICHLET and self.state is None:
            raise ValueError("a Dirichlet boundary needs a state function")


def roe_alpha(lam, delta: float):
    """Upwind fraction sent downstream: 0 / smooth Roe ramp / 1."""
    if not delta > 0:
        raise ValueError(f"delta must be positive: {delta}")
    lam = np.asarray(lam)
    if not np.issubdtype(lam.dtype, np.floating):
        lam = lam.astype(float)
    ramp = (lam + delta) ** 2 * (2.0 * delta - lam) / (4.0 * delta**3)
    return np.where(lam >= delta, 1.0, np.where(lam <= -delta, 0.0, ramp))


def distribute_scalar_1d(phi, alpha):
    phi = np.asarray(phi)
    return (1.0 - alpha) * phi, alpha * phi


def _apply(mat, vec):
    return np.einsum("...ij,...j->...i", mat, vec)


def distribute_system_1d(phi, ubar, model: Model1D, delta: float):
    """Characteristic upwind split of interval residuals ``phi[..., m]``."""
    lam, L, R = model.eigensystem(np.asarray(ubar))
    sigma = roe_alpha(lam, delta)
    psi = _apply(L, phi)
    return _apply(R, (1.0 - sigma) * psi), _apply(R, sigma * psi)


@dataclass
class NodalSolution1D:
    """Point values ``u`` and derivatives ``v`` on nodes ``x_0 .. x_N``.

    Arrays hold one ghost node on each side: row ``k`` is node ``k - 1``.
    """

    a: float
    b: float
    u: np.ndarray
    v: np.ndarray
    left: Boundary
    right: Boundary

    def __post_init__(self) -> None:
        if not self.b > self.a:
            raise ValueError("empty domain")
        if self.u.shape != self.v.shape or self.u.ndim != 2:
            raise ValueError("u and v must both be (N + 3, m) arrays")
        if self.n < 4:
            raise ValueError("need at least four intervals")

    @property
    def n(self) -> int:
        return self.u.shape[0] - 3

    @property
    def m(self) -> int:
        return self.u.shape[1]

    @property
    def dx(self) -> float:
        return (self.b - self.a) / self.n

    @property
    def dtype(self):
        return self.u.dtype

    @property
    def x(self) -> np.ndarray:
        return self.x_ext[1:-1]

    @property
    def x_ext(self) -> np.ndarray:
        return self.a + self.dx * np.arange(-1, self.n + 2, dtype=self.dtype)

    @property
    def nodes(self) -> np.ndarray:
        return self.u[1:-1]

    @property
    def node_derivs(self) -> np.ndarray:
        return self.v[1:-1]

    def copy(self) -> NodalSolution1D:
        return replace(self, u=self.u.copy(), v=self.v.copy())

    def updated_mask(self) -> np.ndarray:
        mask = np.ones(self.n + 1, dtype=bool)
        mask[0] = self.left.kind != DIRICHLET
        mask[-1] = self.right.kind != DIRICHLET
        return mask

    @classmethod
    def from_functions(cls, a, b, n, initial, left: Boundary, right: Boundary,
                       dtype=np.float64):
        """Sample ``initial(x) -> (u, v)`` and install the boundary policy.

        ``dtype`` sets the working precision (e.g. ``np.longdouble``).
        """
        a, b = dtype(a), dtype(b)
        x = a + (b - a) / n * np.arange(n + 1, dtype=dtype)
        u0, v0 = (np.atleast_2d(np.asarray(f, dtype=dtype).T).T for f in initial(x))
        m = u0.shape[1]
        sol = cls(a, b, np.zeros((n + 3, m), dtype), np.zeros((n + 3, m), dtype), left, right)
        sol.u[1:-1] = u0
        sol.v[1:-1] = v0
        sol.apply_dirichlet()
        sol.fill_ghosts()
        return sol

    def _state(self, bc: Boundary, x):
        u, v = bc.state(np.asarray(x, dtype=self.dtype))
        return (np.reshape(np.asarray(u, dtype=self.dtype), (-1, self.m)),
                np.reshape(np.asarray(v, dtype=self.dtype), (-1, self.m)))

    def apply_dirichlet(self) -> None:
        for bc, node in ((self.left, 1), (self.right, -2)):
            if bc.kind == DIRICHLET:
                xb = self.x_ext[node]
                u, v = self._state(bc, [xb])
                self.u[node] = u[0]
                self.v[node] = v[0]

    def fill_ghosts(self, fields: str = "uv") -> None:
        for bc, ghost, inward in ((self.left, 0, 1), (self.right, -1, -1)):
            xg = self.x_ext[ghost]
            if bc.kind == DIRICHLET:
                u, v = self._state(bc, [xg])
                if "u" in fields:
                    self.u[ghost] = u[0]
                if "v" in fields:
                    self.v[ghost] = v[0]
            elif bc.kind == OUTFLOW:
                idx = [ghost + inward * k for k in range(1, 6)]
                if "u" in fields:
                    self.u[ghost] = EXTRAPOLATION_4 @ self.u[idx]
                if "v" in fields:
                    self.v[ghost] = EXTRAPOLATION_4 @ self.v[idx]
            else:
                raise ValueError(f"unsupported 1D boundary kind: {bc.kind}")


# {{{ residuals


def interval_residuals(sol: NodalSolution1D, model: Model1D,
                       epsilon: float = stencils.DEFAULT_EPSILON) -> np.ndarray:
    """Total residual of every interval, shape ``(N, m)``."""
    f = model.flux(sol.u)
    phi = f[2:-1] - f[1:-2]
    if model.has_source:
        s, ds = model.source(sol.u, sol.x_ext, sol.v)
        phi = phi - stencils.integrate_along(s, ds, sol.dx, axis=0, epsilon=epsilon)
    return phi


def interval_total_residual(sol: NodalSolution1D, i: int, model: Model1D,
                            epsilon: float = stencils.DEFAULT_EPSILON) -> np.ndarray:
    if not 0 <= i < sol.n:
        raise IndexError(f"interval {i} outside 0..{sol.n - 1}")
    window = slice(i, i + 4)
    u = sol.u[window]
    f = model.flux(u[1:3])
    phi = f[1] - f[0]
    if model.has_source:
        s, ds = model.source(u, sol.x_ext[window], sol.v[window])
        phi = phi - stencils.integrate(s, ds[1:3], sol.dx, epsilon)
    return phi


def distribute_1d(phi, sol: NodalSolution1D, model: Model1D, delta: float):
    """Split interval residuals into (left-node, right-node) parts."""
    ubar = average_state_1d(sol.u[1:-2], sol.u[2:-1])
    if model.m == 1:
        alpha = roe_alpha(model.eigenvalues(ubar), delta)
        return distribute_scalar_1d(phi, alpha)
    return distribute_system_1d(phi, ubar, model, delta)


def nodal_residuals(sol: NodalSolution1D, model: Model1D, delta: float,
                    epsilon: float = stencils.DEFAULT_EPSILON) -> np.ndarray:
    """Gathered residual ``Phi^2_{i-1/2} + Phi^1_{i+1/2}`` at each node."""
    phi = interval_residuals(sol, model, epsilon)
    phi1, phi2 = distribute_1d(phi, sol, model, delta)
    rhs = np.zeros((sol.n + 1, sol.m), sol.dtype)
    rhs[:-1] += phi1
    rhs[1:] += phi2
    return rhs


def residue_of(rhs: np.ndarray, mask: np.ndarray, cell_size: float) -> float:
    """Mean over updated nodes of the componentwise-L1 pseudo-time rate."""
    rates = np.abs(rhs[mask]).sum(axis=-1) / cell_size
    return float(rates.mean()) if rates.size else 0.0


def l1_residue_1d(sol: NodalSolution1D, model: Model1D, delta: float = 1e-15,
                  epsilon: float = stencils.DEFAULT_EPSILON) -> float:
    rhs = nodal_residuals(sol, model, delta, epsilon)
    return residue_of(rhs, sol.updated_mask(), sol.dx)


# }}}


# {{{ update


def derivative_sweep_1d(sol: NodalSolution1D, v_old: np.ndarray | None = None,
                        epsilon: float = stencils.DEFAULT_EPSILON) -> np.ndarray:
    """New node derivatives from the current ``sol.u`` and old derivatives.

    ``v_old`` defaults to ``sol.v`` (ghosts included).  Dirichlet ends take
    the prescribed derivative, outflow ends a one-sided difference.
    """
    v_old = sol.v if v_old is None else v_old
    dx = sol.dx
    v_new = stencils.reconstruct_along(sol.u, v_old, dx, axis=0, epsilon=epsilon)
    for bc, node, sign in ((sol.left, 0, 1.0), (sol.right, -1, -1.0)):
        if bc.kind == DIRICHLET:
            xb = sol.x[node]
            v_new[node] = sol._state(bc, [xb])[1][0]
        else:
            start = 1 if node == 0 else -2
            idx = [start + int(sign) * k for k in range(5)]
            v_new[node] = sign * (ONE_SIDED_4 @ sol.u[idx]) / (12 * dx)
    return v_new


def advance_1d(sol: NodalSolution1D, model: Model1D, dt: float, delta: float,
               epsilon: float = stencils.DEFAULT_EPSILON):
    """One forward-Euler pseudo-time step; returns ``(new_sol, residue)``.

    The residue is measured on the state *before* the update.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive: {dt}")
    rhs = nodal_residuals(sol, model, delta, epsilon)
    mask = sol.updated_mask()
    residue = residue_of(rhs, mask, sol.dx)

    new = sol.copy()
    new.u[1:-1][mask] -= (dt / sol.dx) * rhs[mask]
    if not np.all(np.isfinite(new.u)):
        raise DivergenceError("non-finite state after update")
    new.fill_ghosts("u")
    new.v[1:-1] = derivative_sweep_1d(new, sol.v, epsilon)
    new.fill_ghosts("v")
    return new, residue


def euler_step_1d(sol: NodalSolution1D, model: Model1D, dt: float, delta: float = 1e-15,
                  epsilon: float = stencils.DEFAULT_EPSILON) -> NodalSolution1D:
    return advance_1d(sol, model, dt, delta, epsilon)[0]


def compute_dt_1d(sol: NodalSolution1D, model: Model1D, cfl: float) -> float:
    speed = model.max_speed(sol.nodes)
    if not np.isfinite(speed):
        raise DivergenceError("non-finite wave speed")
    return cfl * sol.dx / max(speed, 1e-300)


# }}}
