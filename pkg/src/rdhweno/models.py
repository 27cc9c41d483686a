"""Conservation-law models: fluxes, Jacobians, eigensystems and sources.

All state arrays carry the components on the last axis, ``u[..., m]``; the
leading shape is arbitrary and positions ``x``/``y`` broadcast against it.
Sources return their total spatial derivatives, with the chain rule through
the carried derivative fields applied inside the model.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

Array = np.ndarray


class UnphysicalStateError(ValueError):
    """Raised when a state leaves the hyperbolic region (rho, h or p <= 0)."""


def average_state_1d(u_left: Array, u_right: Array) -> Array:
    return 0.5 * (np.asarray(u_left) + np.asarray(u_right))


def average_state_2d(u_sw: Array, u_se: Array, u_nw: Array, u_ne: Array) -> Array:
    return 0.25 * (
        np.asarray(u_sw) + np.asarray(u_se) + np.asarray(u_nw) + np.asarray(u_ne)
    )


def _scalar_eigensystem(lam: Array) -> tuple[Array, Array, Array]:
    one = np.ones(lam.shape + (1,))
    return lam, one, one


# {{{ interfaces


class Model1D:
    m: int = 1
    has_source: bool = False

    def flux(self, u: Array) -> Array:
        raise NotImplementedError

    def jacobian(self, u: Array) -> Array:
        raise NotImplementedError

    def eigenvalues(self, u: Array) -> Array:
        return self.eigensystem(u)[0]

    def eigensystem(self, u: Array) -> tuple[Array, Array, Array]:
        """Return ``(lam, L, R)`` with ``R @ diag(lam) @ L == jacobian(u)``."""
        raise NotImplementedError

    def source(self, u: Array, x: Array, v: Array) -> tuple[Array, Array]:
        """Return ``(s, ds/dx)``, the latter along the solution with ``u_x = v``."""
        z = np.zeros_like(u)
        return z, z

    def max_speed(self, u: Array) -> float:
        return float(np.max(np.abs(self.eigenvalues(u))))


class Model2D:
    m: int = 1
    has_source: bool = False

    def flux_x(self, u: Array, x: Array, y: Array) -> Array:
        raise NotImplementedError

    def flux_y(self, u: Array, x: Array, y: Array) -> Array:
        raise NotImplementedError

    def jacobian_x(self, u: Array, x: Array, y: Array) -> Array:
        raise NotImplementedError

    def jacobian_y(self, u: Array, x: Array, y: Array) -> Array:
        raise NotImplementedError

    def eigensystem_x(self, u: Array, x: Array, y: Array) -> tuple[Array, Array, Array]:
        raise NotImplementedError

    def eigensystem_y(self, u: Array, x: Array, y: Array) -> tuple[Array, Array, Array]:
        raise NotImplementedError

    def eigenvalues_x(self, u: Array, x: Array, y: Array) -> Array:
        return self.eigensystem_x(u, x, y)[0]

    def eigenvalues_y(self, u: Array, x: Array, y: Array) -> Array:
        return self.eigensystem_y(u, x, y)[0]

    def source(self, u, x, y, v, w, z) -> tuple[Array, Array, Array, Array]:
        """Return ``(s, s_x, s_y, s_xy)`` along the solution (u_x=v, u_y=w, u_xy=z)."""
        zero = np.zeros_like(u)
        return zero, zero, zero, zero


# }}}


# {{{ scalar laws

# a scalar source is given as s(u, x) together with its partials
# (s_u, s_x); for 2D sources see ScalarLaw2D
ScalarSource1D = Callable[[Array, Array], tuple[Array, Array, Array]]


class ScalarLaw1D(Model1D):
    """``f(u)_x = s(u, x)`` with ``s`` linear or independent in ``u``."""

    m = 1

    def __init__(self, f, df, source: ScalarSource1D | None = None, name: str = ""):
        self._f = f
        self._df = df
        self._source = source
        self.has_source = source is not None
        self.name = name

    def flux(self, u):
        return self._f(u)

    def jacobian(self, u):
        return self._df(u)[..., None]

    def eigenvalues(self, u):
        return self._df(u)

    def eigensystem(self, u):
        return _scalar_eigensystem(self._df(u))

    def source(self, u, x, v):
        if self._source is None:
            return super().source(u, x, v)
        x = np.asarray(x)[..., None]
        s, s_u, s_x = self._source(u, x)
        return s, s_u * v + s_x


class ScalarLaw2D(Model2D):
    """``f(u)_x + g(u)_y = s(u, x, y)``.

    ``source(u, x, y)`` must return ``(s, s_u, s_x, s_y, s_uu, s_ux, s_uy, s_xy)``
    where ``s_x``, ``s_y``, ``s_xy`` are the explicit partials.
    """

    m = 1

    def __init__(self, f, df, g, dg, source=None, name: str = ""):
        self._f, self._df = f, df
        self._g, self._dg = g, dg
        self._source = source
        self.has_source = source is not None
        self.name = name

    def flux_x(self, u, x, y):
        return self._f(u)

    def flux_y(self, u, x, y):
        return self._g(u)

    def jacobian_x(self, u, x, y):
        return self._df(u)[..., None]

    def jacobian_y(self, u, x, y):
        return self._dg(u)[..., None]

    def eigenvalues_x(self, u, x, y):
        return self._df(u)

    def eigenvalues_y(self, u, x, y):
        return self._dg(u)

    def eigensystem_x(self, u, x, y):
        return _scalar_eigensystem(self._df(u))

    def eigensystem_y(self, u, x, y):
        return _scalar_eigensystem(self._dg(u))

    def source(self, u, x, y, v, w, z):
        if self._source is None:
            return super().source(u, x, y, v, w, z)
        x = np.asarray(x)[..., None]
        y = np.asarray(y)[..., None]
        s, s_u, s_x, s_y, s_uu, s_ux, s_uy, s_xy = self._source(u, x, y)
        sx_tot = s_u * v + s_x
        sy_tot = s_u * w + s_y
        sxy_tot = s_uu * v * w + s_u * z + s_uy * v + s_ux * w + s_xy
        return s, sx_tot, sy_tot, sxy_tot


def _burgers_f(u):
    return 0.5 * u * u


def _identity(u):
    return u


def _ones(u):
    return np.ones_like(u)


_SQ2 = np.sqrt(2.0)


def _sincos_source_1d(u, x):
    s = np.sin(x) * np.cos(x)
    return s + 0.0 * u, 0.0 * u, np.cos(2.0 * x) + 0.0 * u


def _coupled_source_1d(u, x):
    c = np.cos(np.pi * x)
    return -np.pi * c * u, -np.pi * c + 0.0 * u, np.pi**2 * np.sin(np.pi * x) * u


def _sincos_source_2d(u, x, y):
    xi = (x + y) / _SQ2
    s = 0.5 * np.sin(2.0 * xi) + 0.0 * u
    sx = np.cos(2.0 * xi) / _SQ2 + 0.0 * u
    sxy = -np.sin(2.0 * xi) + 0.0 * u
    zero = 0.0 * u
    return s, zero, sx, sx, zero, zero, zero, sxy


def _coupled_source_2d(u, x, y):
    xi = (x + y) / _SQ2
    c = np.cos(np.pi * xi)
    sn = np.sin(np.pi * xi)
    s = -np.pi * c * u
    s_u = -np.pi * c + 0.0 * u
    s_x = np.pi**2 / _SQ2 * sn * u
    s_ux = np.pi**2 / _SQ2 * sn + 0.0 * u
    s_xy = np.pi**3 / 2.0 * c * u
    return s, s_u, s_x, s_x, 0.0 * u, s_ux, s_ux, s_xy


def burgers_smooth_1d() -> ScalarLaw1D:
    """``(u^2/2)_x = sin x cos x``."""
    return ScalarLaw1D(_burgers_f, _identity, _sincos_source_1d, "burgers-sincos")


def burgers_coupled_1d() -> ScalarLaw1D:
    """``(u^2/2)_x = -pi cos(pi x) u``."""
    return ScalarLaw1D(_burgers_f, _identity, _coupled_source_1d, "burgers-coupled")


def burgers_free_1d() -> ScalarLaw1D:
    return ScalarLaw1D(_burgers_f, _identity, None, "burgers")


def _diag_f(u):
    return u * u / (2.0 * _SQ2)


def _diag_df(u):
    return u / _SQ2


def burgers_diagonal_2d(source: str = "sincos") -> ScalarLaw2D:
    """Burgers flux ``u^2/(2 sqrt 2)`` in both directions, diagonal source."""
    src = {"sincos": _sincos_source_2d, "coupled": _coupled_source_2d, None: None}[source]
    return ScalarLaw2D(_diag_f, _diag_df, _diag_f, _diag_df, src, f"burgers2d-{source}")


def burgers_shear_2d() -> ScalarLaw2D:
    """``(u^2/2)_x + u_y = 0``."""
    return ScalarLaw2D(_burgers_f, _identity, _identity, _ones, None, "burgers2d-shear")


def burgers_models() -> dict[str, Model1D | Model2D]:
    return {
        "smooth-1d": burgers_smooth_1d(),
        "coupled-1d": burgers_coupled_1d(),
        "smooth-2d": burgers_diagonal_2d("sincos"),
        "coupled-2d": burgers_diagonal_2d("coupled"),
        "shear-2d": burgers_shear_2d(),
    }


# }}}


# {{{ shallow water

GRAVITY = 9.812


def bottom(x):
    return 5.0 * np.exp(-0.4 * (x - 5.0) ** 2)


def bottom_x(x):
    return -0.8 * (x - 5.0) * bottom(x)


def bottom_xx(x):
    return (-0.8 + 0.64 * (x - 5.0) ** 2) * bottom(x)


class ShallowWater1D(Model1D):
    """Conserved ``(h, hu)`` over the Gaussian bump ``b(x)``."""

    m = 2
    has_source = True

    def __init__(self, g: float = GRAVITY):
        if not g > 0:
            raise ValueError(f"gravity must be positive: {g}")
        self.g = g

    def _primitive(self, u):
        h = u[..., 0]
        if np.any(h <= 0):
            raise UnphysicalStateError("non-positive water height")
        return h, u[..., 1] / h

    def flux(self, u):
        h, vel = self._primitive(u)
        q = u[..., 1]
        return np.stack([q, q * vel + 0.5 * self.g * h * h], axis=-1)

    def jacobian(self, u):
        h, vel = self._primitive(u)
        jac = np.zeros(u.shape + (2,))
        jac[..., 0, 1] = 1.0
        jac[..., 1, 0] = self.g * h - vel * vel
        jac[..., 1, 1] = 2.0 * vel
        return jac

    def eigenvalues(self, u):
        h, vel = self._primitive(u)
        c = np.sqrt(self.g * h)
        return np.stack([vel - c, vel + c], axis=-1)

    def eigensystem(self, u):
        h, vel = self._primitive(u)
        c = np.sqrt(self.g * h)
        lam = np.stack([vel - c, vel + c], axis=-1)
        R = np.empty(u.shape + (2,))
        R[..., 0, 0] = 1.0
        R[..., 0, 1] = 1.0
        R[..., 1, 0] = vel - c
        R[..., 1, 1] = vel + c
        L = np.empty_like(R)
        inv = 0.5 / c
        L[..., 0, 0] = (vel + c) * inv
        L[..., 0, 1] = -inv
        L[..., 1, 0] = -(vel - c) * inv
        L[..., 1, 1] = inv
        return lam, L, R

    def source(self, u, x, v):
        h = u[..., 0]
        bx = bottom_x(x)
        s = np.zeros_like(u)
        ds = np.zeros_like(u)
        s[..., 1] = -self.g * h * bx
        ds[..., 1] = -self.g * (v[..., 0] * bx + h * bottom_xx(x))
        return s, ds


def shallow_water_model(g: float = GRAVITY) -> ShallowWater1D:
    return ShallowWater1D(g)


# }}}


# {{{ Euler

GAMMA = 1.4


class Euler1D(Model1D):
    """1D Euler in ``(rho, rho u, E)``; optional quasi-1D area source."""

    m = 3

    def __init__(self, gamma: float = GAMMA, area_log_slope=None):
        self.gamma = gamma
        # area_log_slope(x) -> (A'/A, d/dx(A'/A))
        self._area = area_log_slope
        self.has_source = area_log_slope is not None

    def primitive(self, u):
        rho = u[..., 0]
        if np.any(rho <= 0):
            raise UnphysicalStateError("non-positive density")
        vel = u[..., 1] / rho
        p = (self.gamma - 1.0) * (u[..., 2] - 0.5 * rho * vel * vel)
        if np.any(p <= 0):
            raise UnphysicalStateError("non-positive pressure")
        return rho, vel, p

    def flux(self, u):
        rho, vel, p = self.primitive(u)
        return np.stack([u[..., 1], u[..., 1] * vel + p, vel * (u[..., 2] + p)], axis=-1)

    def jacobian(self, u):
        rho, vel, p = self.primitive(u)
        g = self.gamma
        H = (u[..., 2] + p) / rho
        jac = np.zeros(u.shape + (3,))
        jac[..., 0, 1] = 1.0
        jac[..., 1, 0] = 0.5 * (g - 3.0) * vel * vel
        jac[..., 1, 1] = (3.0 - g) * vel
        jac[..., 1, 2] = g - 1.0
        jac[..., 2, 0] = vel * (0.5 * (g - 1.0) * vel * vel - H)
        jac[..., 2, 1] = H - (g - 1.0) * vel * vel
        jac[..., 2, 2] = g * vel
        return jac

    def eigenvalues(self, u):
        rho, vel, p = self.primitive(u)
        c = np.sqrt(self.gamma * p / rho)
        return np.stack([vel - c, vel, vel + c], axis=-1)

    def eigensystem(self, u):
        rho, vel, p = self.primitive(u)
        g = self.gamma
        c = np.sqrt(g * p / rho)
        H = (u[..., 2] + p) / rho
        lam = np.stack([vel - c, vel, vel + c], axis=-1)

        R = np.empty(u.shape + (3,))
        R[..., 0, :] = 1.0
        R[..., 1, 0] = vel - c
        R[..., 1, 1] = vel
        R[..., 1, 2] = vel + c
        R[..., 2, 0] = H - vel * c
        R[..., 2, 1] = 0.5 * vel * vel
        R[..., 2, 2] = H + vel * c

        b1 = (g - 1.0) / (c * c)
        b2 = 0.5 * b1 * vel * vel
        L = np.empty_like(R)
        L[..., 0, 0] = 0.5 * (b2 + vel / c)
        L[..., 0, 1] = -0.5 * (b1 * vel + 1.0 / c)
        L[..., 0, 2] = 0.5 * b1
        L[..., 1, 0] = 1.0 - b2
        L[..., 1, 1] = b1 * vel
        L[..., 1, 2] = -b1
        L[..., 2, 0] = 0.5 * (b2 - vel / c)
        L[..., 2, 1] = -0.5 * (b1 * vel - 1.0 / c)
        L[..., 2, 2] = 0.5 * b1
        return lam, L, R

    def source(self, u, x, v):
        if self._area is None:
            return super().source(u, x, v)
        rho, vel, p = self.primitive(u)
        k, dk = self._area(np.asarray(x))
        # s = -k(x) * q(u), q = flux without the pressure in the momentum row
        q = self.flux(u)
        q[..., 1] -= p
        dq = self.jacobian(u)
        g = self.gamma
        dq[..., 1, 0] -= 0.5 * (g - 1.0) * vel * vel
        dq[..., 1, 1] += (g - 1.0) * vel
        dq[..., 1, 2] -= g - 1.0
        qx = np.einsum("...ij,...j->...i", dq, v)
        s = -k[..., None] * q
        ds = -dk[..., None] * q - k[..., None] * qx
        return s, ds


def area_function(w, gamma: float = GAMMA):
    """``w / (1 + d0 w^2)^p0``: area-Mach relation up to a constant factor."""
    d0 = 0.5 * (gamma - 1.0)
    p0 = 0.5 * (gamma + 1.0) / (gamma - 1.0)
    return w / (1.0 + d0 * w * w) ** p0


def _log_area_slope_dm(w, gamma):
    # d/dM log f(M) and its M-derivative
    d0 = 0.5 * (gamma - 1.0)
    p0 = 0.5 * (gamma + 1.0) / (gamma - 1.0)
    den = 1.0 + d0 * w * w
    g = 1.0 / w - 2.0 * p0 * d0 * w / den
    dg = -1.0 / (w * w) - 2.0 * p0 * d0 * (1.0 - d0 * w * w) / (den * den)
    return g, dg


def normal_shock_mach(m1, gamma: float = GAMMA):
    return np.sqrt((1.0 + 0.5 * (gamma - 1.0) * m1 * m1)
                   / (gamma * m1 * m1 - 0.5 * (gamma - 1.0)))


def normal_shock_total_pressure_ratio(m1, gamma: float = GAMMA):
    """Stagnation pressure ratio p0_2 / p0_1 across a normal shock."""
    g = gamma
    a = ((g + 1.0) * m1 * m1 / ((g - 1.0) * m1 * m1 + 2.0)) ** (g / (g - 1.0))
    b = ((g + 1.0) / (2.0 * g * m1 * m1 - (g - 1.0))) ** (1.0 / (g - 1.0))
    return a * b


class NozzleGeometry:
    """Mach profile with a standing shock and the nozzle area derived from it.

    The Mach number is linear from ``m_in`` at 0 to ``m_out`` at 1, jumps at
    ``x_shock`` to the normal-shock downstream value and runs linearly from
    there to ``m_out``.  The area satisfies ``A f(M) p0 = const``; with
    ``area_follows_shock=False`` it is built from the shock-free linear
    profile instead.
    """

    def __init__(self, m_in=0.8, m_out=1.8, x_shock=0.5, area_follows_shock=True,
                 gamma=GAMMA):
        self.m_in, self.m_out, self.x_shock = m_in, m_out, x_shock
        self.area_follows_shock = area_follows_shock
        self.gamma = gamma
        self.m_pre = m_in + (m_out - m_in) * x_shock
        self.m_post = float(normal_shock_mach(self.m_pre, gamma))
        self.p0_ratio = float(normal_shock_total_pressure_ratio(self.m_pre, gamma))
        self._post_slope = (m_out - self.m_post) / (1.0 - x_shock)

    def _post(self, x):
        return np.asarray(x) >= self.x_shock

    def mach(self, x, shocked: bool = True):
        x = np.asarray(x, dtype=float)
        smooth = self.m_in + (self.m_out - self.m_in) * x
        if not shocked:
            return smooth
        post = self.m_post + self._post_slope * (x - self.x_shock)
        return np.where(self._post(x), post, smooth)

    def mach_x(self, x, shocked: bool = True):
        x = np.asarray(x, dtype=float)
        pre = np.full_like(x, self.m_out - self.m_in)
        if not shocked:
            return pre
        return np.where(self._post(x), self._post_slope, pre)

    def total_pressure(self, x, shocked: bool = True):
        if not shocked:
            return np.ones_like(np.asarray(x, dtype=float))
        return np.where(self._post(x), self.p0_ratio, 1.0)

    def area(self, x):
        sh = self.area_follows_shock
        return 1.0 / (self.total_pressure(x, sh) * area_function(self.mach(x, sh), self.gamma))

    def log_slope(self, x):
        """``A'/A`` and its x-derivative."""
        sh = self.area_follows_shock
        w = self.mach(x, sh)
        wx = self.mach_x(x, sh)
        g, dg = _log_area_slope_dm(w, self.gamma)
        return -g * wx, -dg * wx * wx

    def state(self, x):
        """Conserved state and its x-derivative on the shocked Mach profile."""
        gam = self.gamma
        x = np.asarray(x, dtype=float)
        w = self.mach(x)
        wx = self.mach_x(x)
        p0 = self.total_pressure(x)
        d0 = 0.5 * (gam - 1.0)
        t = 1.0 + d0 * w * w
        tx = 2.0 * d0 * w * wx
        # stagnation temperature is unchanged across the shock: rho0 = p0
        rho = p0 * t ** (-1.0 / (gam - 1.0))
        p = p0 * t ** (-gam / (gam - 1.0))
        rho_x = rho * (-1.0 / (gam - 1.0)) * tx / t
        p_x = p * (-gam / (gam - 1.0)) * tx / t
        c = np.sqrt(gam * p / rho)
        c_x = 0.5 * c * (p_x / p - rho_x / rho)
        vel = w * c
        vel_x = wx * c + w * c_x
        mom = rho * vel
        mom_x = rho_x * vel + rho * vel_x
        E = p / (gam - 1.0) + 0.5 * rho * vel * vel
        E_x = p_x / (gam - 1.0) + 0.5 * rho_x * vel * vel + rho * vel * vel_x
        return np.stack([rho, mom, E], axis=-1), np.stack([rho_x, mom_x, E_x], axis=-1)


def nozzle_euler_model(geometry: NozzleGeometry | None = None) -> Euler1D:
    geometry = geometry or NozzleGeometry()
    model = Euler1D(geometry.gamma, geometry.log_slope)
    model.geometry = geometry
    return model


class Euler2D(Model2D):
    """2D Euler in ``(rho, rho u, rho v, E)``, no source."""

    m = 4

    def __init__(self, gamma: float = GAMMA):
        self.gamma = gamma

    def primitive(self, u):
        rho = u[..., 0]
        if np.any(rho <= 0):
            raise UnphysicalStateError("non-positive density")
        vx = u[..., 1] / rho
        vy = u[..., 2] / rho
        p = (self.gamma - 1.0) * (u[..., 3] - 0.5 * rho * (vx * vx + vy * vy))
        if np.any(p <= 0):
            raise UnphysicalStateError("non-positive pressure")
        return rho, vx, vy, p

    def flux_x(self, u, x=None, y=None):
        rho, vx, vy, p = self.primitive(u)
        return np.stack(
            [u[..., 1], u[..., 1] * vx + p, u[..., 1] * vy, vx * (u[..., 3] + p)], axis=-1
        )

    def flux_y(self, u, x=None, y=None):
        rho, vx, vy, p = self.primitive(u)
        return np.stack(
            [u[..., 2], u[..., 2] * vx, u[..., 2] * vy + p, vy * (u[..., 3] + p)], axis=-1
        )

    def _jacobian(self, u, axis):
        rho, vx, vy, p = self.primitive(u)
        g = self.gamma
        H = (u[..., 3] + p) / rho
        q2 = 0.5 * (g - 1.0) * (vx * vx + vy * vy)
        # n = normal velocity index, t = tangential
        vn, vt = (vx, vy) if axis == 0 else (vy, vx)
        n, t = (1, 2) if axis == 0 else (2, 1)
        jac = np.zeros(u.shape + (4,))
        jac[..., 0, n] = 1.0
        jac[..., n, 0] = q2 - vn * vn
        jac[..., n, n] = (3.0 - g) * vn
        jac[..., n, t] = -(g - 1.0) * vt
        jac[..., n, 3] = g - 1.0
        jac[..., t, 0] = -vn * vt
        jac[..., t, n] = vt
        jac[..., t, t] = vn
        jac[..., 3, 0] = vn * (q2 - H)
        jac[..., 3, n] = H - (g - 1.0) * vn * vn
        jac[..., 3, t] = -(g - 1.0) * vn * vt
        jac[..., 3, 3] = g * vn
        return jac

    def jacobian_x(self, u, x=None, y=None):
        return self._jacobian(u, 0)

    def jacobian_y(self, u, x=None, y=None):
        return self._jacobian(u, 1)

    def _eigenvalues(self, u, axis):
        rho, vx, vy, p = self.primitive(u)
        c = np.sqrt(self.gamma * p / rho)
        vn = vx if axis == 0 else vy
        return np.stack([vn - c, vn, vn, vn + c], axis=-1)

    def eigenvalues_x(self, u, x=None, y=None):
        return self._eigenvalues(u, 0)

    def eigenvalues_y(self, u, x=None, y=None):
        return self._eigenvalues(u, 1)

    def _eigensystem(self, u, axis):
        rho, vx, vy, p = self.primitive(u)
        g = self.gamma
        c = np.sqrt(g * p / rho)
        H = (u[..., 3] + p) / rho
        vn, vt = (vx, vy) if axis == 0 else (vy, vx)
        n, t = (1, 2) if axis == 0 else (2, 1)
        lam = np.stack([vn - c, vn, vn, vn + c], axis=-1)

        R = np.zeros(u.shape + (4,))
        # columns: acoustic -, entropy, shear, acoustic +
        R[..., 0, 0] = 1.0
        R[..., n, 0] = vn - c
        R[..., t, 0] = vt
        R[..., 3, 0] = H - vn * c
        R[..., 0, 1] = 1.0
        R[..., n, 1] = vn
        R[..., t, 1] = vt
        R[..., 3, 1] = 0.5 * (vx * vx + vy * vy)
        R[..., t, 2] = 1.0
        R[..., 3, 2] = vt
        R[..., 0, 3] = 1.0
        R[..., n, 3] = vn + c
        R[..., t, 3] = vt
        R[..., 3, 3] = H + vn * c

        b1 = (g - 1.0) / (c * c)
        b2 = 0.5 * b1 * (vx * vx + vy * vy)
        L = np.zeros_like(R)
        L[..., 0, 0] = 0.5 * (b2 + vn / c)
        L[..., 0, n] = -0.5 * (b1 * vn + 1.0 / c)
        L[..., 0, t] = -0.5 * b1 * vt
        L[..., 0, 3] = 0.5 * b1
        L[..., 1, 0] = 1.0 - b2
        L[..., 1, n] = b1 * vn
        L[..., 1, t] = b1 * vt
        L[..., 1, 3] = -b1
        L[..., 2, 0] = -vt
        L[..., 2, t] = 1.0
        L[..., 3, 0] = 0.5 * (b2 - vn / c)
        L[..., 3, n] = -0.5 * (b1 * vn - 1.0 / c)
        L[..., 3, t] = -0.5 * b1 * vt
        L[..., 3, 3] = 0.5 * b1
        return lam, L, R

    def eigensystem_x(self, u, x=None, y=None):
        return self._eigensystem(u, 0)

    def eigensystem_y(self, u, x=None, y=None):
        return self._eigensystem(u, 1)


def euler2d_model(gamma: float = GAMMA) -> Euler2D:
    return Euler2D(gamma)


def euler_conserved(rho, vx, vy, p, gamma: float = GAMMA):
    rho, vx, vy, p = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (rho, vx, vy, p)))
    E = p / (gamma - 1.0) + 0.5 * rho * (vx * vx + vy * vy)
    return np.stack([rho, rho * vx, rho * vy, E], axis=-1)


# }}}


# {{{ Cauchy-Riemann


class CauchyRiemann2D(Model2D):
    """Self-similar Cauchy-Riemann system: ``((-x I + A) W)_x + ((-y I + B) W)_y = -2 W``."""

    m = 2
    has_source = True
    A = np.array([[1.0, 0.0], [0.0, -1.0]])
    B = np.array([[0.0, 1.0], [1.0, 0.0]])
    _RB = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)

    def _shifted(self, mat, shift):
        shift = np.asarray(shift, dtype=float)
        return mat - shift[..., None, None] * np.eye(2)

    def flux_x(self, u, x, y):
        return u @ self.A.T - np.asarray(x)[..., None] * u

    def flux_y(self, u, x, y):
        return u @ self.B.T - np.asarray(y)[..., None] * u

    def jacobian_x(self, u, x, y):
        return self._shifted(self.A, np.broadcast_to(x, u.shape[:-1]))

    def jacobian_y(self, u, x, y):
        return self._shifted(self.B, np.broadcast_to(y, u.shape[:-1]))

    def eigenvalues_x(self, u, x, y):
        xs = np.broadcast_to(np.asarray(x, dtype=float), u.shape[:-1])
        return np.stack([1.0 - xs, -1.0 - xs], axis=-1)

    def eigenvalues_y(self, u, x, y):
        ys = np.broadcast_to(np.asarray(y, dtype=float), u.shape[:-1])
        return np.stack([1.0 - ys, -1.0 - ys], axis=-1)

    def eigensystem_x(self, u, x, y):
        lam = self.eigenvalues_x(u, x, y)
        eye = np.broadcast_to(np.eye(2), lam.shape + (2,))
        return lam, eye, eye

    def eigensystem_y(self, u, x, y):
        lam = self.eigenvalues_y(u, x, y)
        R = np.broadcast_to(self._RB, lam.shape + (2,))
        return lam, R, R

    def source(self, u, x, y, v, w, z):
        return -2.0 * u, -2.0 * v, -2.0 * w, -2.0 * z


def cauchy_riemann_model() -> CauchyRiemann2D:
    return CauchyRiemann2D()


# }}}
