"""Lorentzian linear algebra on R^{2,1} and the hyperboloid model.

Points and vectors are plain numpy arrays whose last axis has length 3;
the third coordinate is the timelike one.  All functions broadcast over
leading axes.
"""

from enum import Enum

import numpy as np

J = np.diag([1.0, 1.0, -1.0])

CAUSAL_TOL = 1e-12
ACOSH_CLAMP = 1e-9
# below this value of -<x,y> - 1 the arcsinh form is used
SMALL_Q = 1e-4


class GeometryError(ValueError):
    """Base class for invalid geometric input."""


class NotSpacelike(GeometryError):
    pass


class NotFutureTimelike(GeometryError):
    pass


class CausalClass(Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"
    ZERO = "zero"


def lorentz_vec(x1, x2=None, x3=None):
    """Build a finite 3-vector, either from three scalars or one array-like."""
    if x2 is None and x3 is None:
        v = np.array(x1, dtype=float)
    else:
        v = np.array([x1, x2, x3], dtype=float)
    if v.shape[-1:] != (3,):
        raise GeometryError(f"expected trailing dimension 3, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise GeometryError("non-finite coordinates")
    return v


def mink_inner(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1] - u[..., 2] * v[..., 2]


def mink_sq(v):
    return mink_inner(v, v)


def causal_class(v, tol=CAUSAL_TOL):
    v = np.asarray(v, dtype=float)
    if np.all(np.abs(v) <= tol):
        return CausalClass.ZERO
    q = mink_sq(v)
    if q > tol:
        return CausalClass.SPACELIKE
    if q < -tol:
        return CausalClass.TIMELIKE
    return CausalClass.LIGHTLIKE


def spacelike_norm(v, tol=CAUSAL_TOL):
    """Minkowski norm sqrt(<v,v>) of a spacelike vector (or array of them)."""
    q = mink_sq(v)
    if np.any(q <= tol):
        raise NotSpacelike(f"<v,v> = {np.min(q)!r} is not positive")
    return np.sqrt(q)


def is_future_timelike(y):
    y = np.asarray(y, dtype=float)
    return (mink_sq(y) < 0) & (y[..., 2] > 0)


def radial_project(y):
    """Radial projection of the future cone onto the unit hyperboloid."""
    y = np.asarray(y, dtype=float)
    if not np.all(is_future_timelike(y)):
        raise NotFutureTimelike("radial projection needs future timelike input")
    return y / np.sqrt(-mink_sq(y))[..., None]


def hyperboloid_point(x1, x2):
    """The point of H^2 above (x1, x2)."""
    return np.array([x1, x2, np.sqrt(1.0 + x1 * x1 + x2 * x2)])


def hyp_dist(x, y):
    """Hyperbolic distance between points of H^2.

    Uses 2*arcsinh(sqrt(q/2)) with q = -<x,y> - 1 near the diagonal, where
    arccosh loses half of the significant digits.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c = -mink_inner(x, y)
    if np.any(c < 1.0 - ACOSH_CLAMP):
        raise GeometryError(f"-<x,y> = {np.min(c)!r} < 1: inputs are not on H^2")
    q = np.maximum(c - 1.0, 0.0)
    small = q < SMALL_Q
    # the difference form is exact to rounding for nearby points
    d = x - y
    q_direct = np.maximum(mink_sq(d), 0.0) / 2.0
    q = np.where(small, q_direct, q)
    out = np.where(small, 2.0 * np.arcsinh(np.sqrt(q / 2.0)),
                   np.arccosh(np.maximum(c, 1.0)))
    return out[()] if out.ndim == 0 else out


def exp_map(base, v):
    """Hyperbolic exponential map at ``base`` of the tangent vector ``v``."""
    base = np.asarray(base, dtype=float)
    v = np.asarray(v, dtype=float)
    n = np.sqrt(np.maximum(mink_sq(v), 0.0))[..., None]
    with np.errstate(invalid="ignore", divide="ignore"):
        direction = np.where(n > 0, v / np.where(n > 0, n, 1.0), 0.0)
    return np.cosh(n) * base + np.sinh(n) * direction


def boost(t, axis=0):
    """Pure boost of rapidity t mixing spatial ``axis`` with the time axis."""
    c, s = np.cosh(t), np.sinh(t)
    m = np.eye(3)
    m[axis, axis] = c
    m[axis, 2] = s
    m[2, axis] = s
    m[2, 2] = c
    return m


def rotation(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def lorentz_inverse(m):
    """Inverse of an element of O(2,1), J m^T J."""
    return J @ np.swapaxes(m, -1, -2) @ J


def boost_chord_length(eps, t):
    """Minkowski length between eps*x and eps*I_t x in the Minkowski plane.

    x = (0, 1) is the unit timelike vector of R^{1,1} and I_t the boost
    [[cosh t, sinh t], [sinh t, cosh t]].
    """
    if np.any(np.asarray(eps) <= 0):
        raise GeometryError("eps must be positive")
    x = np.array([0.0, 1.0])
    c, s = np.cosh(t), np.sinh(t)
    it_x = np.stack([c * x[0] + s * x[1], s * x[0] + c * x[1]], axis=-1)
    d = np.asarray(eps)[..., None] * (it_x - x)
    # form on the plane is (+, -)
    q = d[..., 0] ** 2 - d[..., 1] ** 2
    return np.sqrt(np.maximum(q, 0.0))


def boost_chord_closed_form(eps, t):
    return np.asarray(eps) * np.sqrt(2.0) * np.sqrt(np.cosh(t) - 1.0)
