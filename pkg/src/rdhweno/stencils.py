"""Hermite WENO stencil kernels.

Two families of operators, both acting on raw windows of point values and
first derivatives on a uniform grid:

* sixth-order integration of a function over ``[x_i, x_{i+1}]`` from
  ``s`` at ``x_{i-1} .. x_{i+2}`` and ``s'`` at ``x_i, x_{i+1}``;
* fourth-order reconstruction of ``u'(x_i)`` from ``u`` at ``x_{i-1} .. x_{i+1}``
  and ``u'`` at ``x_{i-1}, x_{i+1}``.

Every function broadcasts over trailing array dimensions, so a whole grid
line (or a whole 2D block, per component) is handled in one call.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

# {{{ coefficients

# integration: linear weights and smoothness-indicator coefficients
GAMMA_INT = (Fraction(11, 30), Fraction(11, 30), Fraction(4, 15))
GAMMA_REC = (Fraction(1, 4), Fraction(1, 4), Fraction(1, 2))

_B12_A = float(Fraction(301, 30))
_B12_A0 = float(Fraction(65, 602))
_B12_A1 = float(Fraction(667, 602))
_B12_AD = float(Fraction(1269, 602))
_B12_B = float(Fraction(12561, 2408))
_B12_BD = float(Fraction(10153, 12561))
_B12_C = float(Fraction(10153, 12561))

_B3_A = float(Fraction(61, 45))
_B3_A0 = float(Fraction(1269, 488))
_B3_A1 = float(Fraction(537, 244))
_B3_A2 = float(Fraction(293, 488))
_B3_B = float(Fraction(21865, 11712))
_B3_B1 = float(Fraction(32018, 21865))
_B3_B2 = float(Fraction(10153, 21865))
_B3_C = float(Fraction(10153, 21865))

_G_INT = tuple(float(g) for g in GAMMA_INT)
_G_REC = tuple(float(g) for g in GAMMA_REC)

_THIRTEEN_THIRDS = float(Fraction(13, 3))
_THIRTEEN_TWELFTHS = float(Fraction(13, 12))

DEFAULT_EPSILON = 1.0e-10

# }}}


@dataclass(frozen=True)
class WeightConfig:
    """Linear weights and regularizer shared by both kernel families."""

    epsilon: float = DEFAULT_EPSILON
    gamma_int: tuple[Fraction, Fraction, Fraction] = GAMMA_INT
    gamma_rec: tuple[Fraction, Fraction, Fraction] = GAMMA_REC

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive: {self.epsilon}")
        for name in ("gamma_int", "gamma_rec"):
            gamma = tuple(Fraction(g) for g in getattr(self, name))
            if len(gamma) != 3 or sum(gamma) != 1 or min(gamma) < 0:
                raise ValueError(f"{name} must be three non-negative weights summing to 1")
            object.__setattr__(self, name, gamma)

    @property
    def gamma_int_float(self) -> tuple[float, float, float]:
        return tuple(float(g) for g in self.gamma_int)  # type: ignore[return-value]

    @property
    def gamma_rec_float(self) -> tuple[float, float, float]:
        return tuple(float(g) for g in self.gamma_rec)  # type: ignore[return-value]


DEFAULT_WEIGHTS = WeightConfig()


@dataclass(frozen=True)
class HermiteIntegrationStencil:
    """``values`` at x_{i-1}, x_i, x_{i+1}, x_{i+2}; ``derivs`` at x_i, x_{i+1}."""

    values: np.ndarray
    derivs: np.ndarray
    dx: float

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        derivs = np.asarray(self.derivs, dtype=float)
        if values.shape[:1] != (4,) or derivs.shape[:1] != (2,):
            raise ValueError("expected 4 values and 2 derivatives")
        _check_window(values, derivs, self.dx)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "derivs", derivs)


@dataclass(frozen=True)
class HermiteReconstructionStencil:
    """``u`` at x_{i-1}, x_i, x_{i+1}; ``v`` (= u') at x_{i-1}, x_{i+1}."""

    u: np.ndarray
    v: np.ndarray
    dx: float

    def __post_init__(self) -> None:
        u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if u.shape[:1] != (3,) or v.shape[:1] != (2,):
            raise ValueError("expected 3 values and 2 derivatives")
        _check_window(u, v, self.dx)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)


def _check_window(values: np.ndarray, derivs: np.ndarray, dx: float) -> None:
    if not dx > 0:
        raise ValueError(f"dx must be positive: {dx}")
    if not (np.all(np.isfinite(values)) and np.all(np.isfinite(derivs))):
        raise ValueError("stencil entries must be finite")


# {{{ sixth-order integration


def candidate_integrals(st: HermiteIntegrationStencil):
    """Integrals over ``[x_i, x_{i+1}]`` of the quintic and three cubic interpolants."""
    return _candidate_integrals(*st.values, *st.derivs, st.dx)


def _candidate_integrals(sm, s0, s1, s2, d0, d1, dx):
    hd0 = dx * d0
    hd1 = dx * d1
    q0 = dx / 240.0 * (sm + 119.0 * s0 + 119.0 * s1 + s2 + 22.0 * hd0 - 22.0 * hd1)
    q1 = dx / 24.0 * (sm + 16.0 * s0 + 7.0 * s1 + 6.0 * hd0)
    q2 = -dx / 24.0 * (-7.0 * s0 - 16.0 * s1 - s2 + 6.0 * hd1)
    q3 = dx / 24.0 * (-sm + 13.0 * s0 + 13.0 * s1 - s2)
    return q0, q1, q2, q3


def integration_smoothness(st: HermiteIntegrationStencil):
    return _integration_smoothness(*st.values, *st.derivs, st.dx)


def _integration_smoothness(sm, s0, s1, s2, d0, d1, dx):
    hd0 = dx * d0
    hd1 = dx * d1
    beta1 = (
        _B12_A * (sm + _B12_A0 * s0 - _B12_A1 * s1 + _B12_AD * hd0) ** 2
        + _B12_B * (s0 - s1 + _B12_BD * hd0) ** 2
        + _B12_C * hd0**2
    )
    beta2 = (
        _B12_A * (-_B12_A1 * s0 + _B12_A0 * s1 + s2 - _B12_AD * hd1) ** 2
        + _B12_B * (-s0 + s1 - _B12_BD * hd1) ** 2
        + _B12_C * hd1**2
    )
    beta3 = (
        _B3_A * (sm - _B3_A0 * s0 + _B3_A1 * s1 - _B3_A2 * s2) ** 2
        + _B3_B * (s0 - _B3_B1 * s1 + _B3_B2 * s2) ** 2
        + _B3_C * (s1 - s2) ** 2
    )
    return beta1, beta2, beta3


def nonlinear_weights(gamma, beta, epsilon: float = DEFAULT_EPSILON):
    """Normalized ``gamma_l / (epsilon + beta_l)^2``."""
    a1 = float(gamma[0]) / (epsilon + beta[0]) ** 2
    a2 = float(gamma[1]) / (epsilon + beta[1]) ** 2
    a3 = float(gamma[2]) / (epsilon + beta[2]) ** 2
    total = a1 + a2 + a3
    return a1 / total, a2 / total, a3 / total


def hweno6_integrate(
    st: HermiteIntegrationStencil, cfg: WeightConfig = DEFAULT_WEIGHTS
):
    return integrate(st.values, st.derivs, st.dx, cfg.epsilon)


def integrate(values, derivs, dx: float, epsilon: float = DEFAULT_EPSILON):
    """Array form of :func:`hweno6_integrate`.

    ``values`` has leading axis 4 and ``derivs`` leading axis 2; any trailing
    shape is carried through.
    """
    sm, s0, s1, s2 = values
    d0, d1 = derivs
    if _FAST_INTEGRATE is not None and _all_float64(sm, s0, s1, s2, d0, d1, dx):
        return _FAST_INTEGRATE(sm, s0, s1, s2, d0, d1, dx, epsilon)
    return _integrate_point(sm, s0, s1, s2, d0, d1, dx, epsilon)


def _make_integrate_point(candidates, smoothness):
    g1, g2, g3 = _G_INT

    def point(sm, s0, s1, s2, d0, d1, dx, epsilon):
        _, q1, q2, q3 = candidates(sm, s0, s1, s2, d0, d1, dx)
        b1, b2, b3 = smoothness(sm, s0, s1, s2, d0, d1, dx)
        a1 = g1 / (epsilon + b1) ** 2
        a2 = g2 / (epsilon + b2) ** 2
        a3 = g3 / (epsilon + b3) ** 2
        return (a1 * q1 + a2 * q2 + a3 * q3) / (a1 + a2 + a3)

    return point


# }}}


# {{{ fourth-order derivative reconstruction


def hweno4_candidate_derivatives(st: HermiteReconstructionStencil):
    """Derivatives at ``x_i`` of the quartic (first) and the three quadratics."""
    return _candidate_derivatives(*st.u, *st.v, st.dx)


def _candidate_derivatives(um, u0, up, vm, vp, dx):
    # centred difference carries 1/(2 dx): the only value consistent with
    # the quartic and the (1/4, 1/4, 1/2) linear weights
    d1 = -vm + 2.0 * (u0 - um) / dx
    d2 = -vp + 2.0 * (up - u0) / dx
    d3 = (up - um) / (2.0 * dx)
    d0 = -0.25 * (vm + vp) + 0.75 * (up - um) / dx
    return d0, d1, d2, d3


def reconstruction_smoothness(st: HermiteReconstructionStencil):
    return _reconstruction_smoothness(*st.u, *st.v, st.dx)


def _reconstruction_smoothness(um, u0, up, vm, vp, dx):
    beta1 = (2.0 * (u0 - um) - vm * dx) ** 2 + _THIRTEEN_THIRDS * (u0 - um - vm * dx) ** 2
    beta2 = (2.0 * (up - u0) - vp * dx) ** 2 + _THIRTEEN_THIRDS * (up - u0 - vp * dx) ** 2
    beta3 = 0.25 * (up - um) ** 2 + _THIRTEEN_TWELFTHS * (um - 2.0 * u0 + up) ** 2
    return beta1, beta2, beta3


def hweno4_derivative(
    st: HermiteReconstructionStencil, cfg: WeightConfig = DEFAULT_WEIGHTS
):
    return reconstruct_derivative(st.u, st.v, st.dx, cfg.epsilon)


def reconstruct_derivative(u, v, dx: float, epsilon: float = DEFAULT_EPSILON):
    """Array form of :func:`hweno4_derivative` (leading axes 3 and 2)."""
    um, u0, up = u
    vm, vp = v
    if _FAST_RECONSTRUCT is not None and _all_float64(um, u0, up, vm, vp, dx):
        return _FAST_RECONSTRUCT(um, u0, up, vm, vp, dx, epsilon)
    return _reconstruct_point(um, u0, up, vm, vp, dx, epsilon)


def _make_reconstruct_point(candidates, smoothness):
    g1, g2, g3 = _G_REC

    def point(um, u0, up, vm, vp, dx, epsilon):
        _, d1, d2, d3 = candidates(um, u0, up, vm, vp, dx)
        b1, b2, b3 = smoothness(um, u0, up, vm, vp, dx)
        a1 = g1 / (epsilon + b1) ** 2
        a2 = g2 / (epsilon + b2) ** 2
        a3 = g3 / (epsilon + b3) ** 2
        return (a1 * d1 + a2 * d2 + a3 * d3) / (a1 + a2 + a3)

    return point


def reconstruct_along(u: np.ndarray, v: np.ndarray, dx: float, axis: int = 0,
                      epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    """Reconstruct derivatives at every non-end point of ``u`` along ``axis``.

    The output is two entries shorter than the input along ``axis``.
    """
    u = np.moveaxis(u, axis, 0)
    v = np.moveaxis(v, axis, 0)
    out = reconstruct_derivative((u[:-2], u[1:-1], u[2:]), (v[:-2], v[2:]), dx, epsilon)
    return np.moveaxis(out, 0, axis)


def integrate_along(s: np.ndarray, ds: np.ndarray, dx: float, axis: int = 0,
                    epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    """Integrate over every interval whose four-point window fits in ``s``.

    Returns ``len - 3`` integrals along ``axis``: interval ``k`` spans the
    points ``k + 1`` and ``k + 2`` of the input.
    """
    s = np.moveaxis(s, axis, 0)
    ds = np.moveaxis(ds, axis, 0)
    out = integrate((s[:-3], s[1:-2], s[2:-1], s[3:]), (ds[1:-2], ds[2:-1]), dx, epsilon)
    return np.moveaxis(out, 0, axis)


# }}}


# {{{ compiled float64 fast path

_integrate_point = _make_integrate_point(_candidate_integrals, _integration_smoothness)
_reconstruct_point = _make_reconstruct_point(_candidate_derivatives, _reconstruction_smoothness)


def _all_float64(*arrays) -> bool:
    return all(np.asarray(a).dtype == np.float64 for a in arrays)


def _compile(factory, candidates, smoothness, nargs):
    # fuses a whole stencil into one ufunc (no temporaries); the numpy path
    # stays the reference and handles every other dtype
    if numba is None:
        return None
    point = factory(numba.njit(candidates), numba.njit(smoothness))
    sig = "float64(" + ", ".join(["float64"] * nargs) + ")"
    return numba.vectorize([sig])(point)


_FAST_INTEGRATE = _compile(_make_integrate_point, _candidate_integrals,
                           _integration_smoothness, 8)
_FAST_RECONSTRUCT = _compile(_make_reconstruct_point, _candidate_derivatives,
                             _reconstruction_smoothness, 7)

# }}}
