"""Closed-form geometry of the solvable group S ("ax+b") and its two
symmetric-surface structures living on the same global (a, l) chart: the
flat-connection Poincare orbit and the hyperbolic plane.

Points are passed around as array-likes of shape (..., 2) whose last axis
holds (a, l); every operation is vectorized over leading axes and pure.
The :class:`Point` dataclass is a scalar convenience that converts to such
an array.

Conventions
-----------
* group law        : (a, l) . (a', l') = (a + a', e^{-2a'} l + l')
* inverse          : (a, l)^{-1} = (-a, -e^{2a} l)
* symmetry at g    : s_g(g') = g . psi(g^{-1} . g') with psi the involution
                     of the chosen surface kind.
* three-point phase: ``s_can`` for the hyperbolic plane is based at the
  origin and extended to arbitrary base points by left translation; the
  slot order is fixed so that s_can(0, y, z) equals
  l_z sinh 2a_y - l_y sinh 2a_z + (l_y l_z / 2)(l_y e^{2a_y} - l_z e^{2a_z}).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "Point",
    "SurfaceKind",
    "GeodesicState",
    "group_mul",
    "group_inv",
    "identity",
    "psi",
    "symmetry",
    "symmetry_m_closed",
    "midpoint",
    "double_triangle",
    "double_triangle_inverse",
    "jac_phi",
    "jac_phi_inverse",
    "s_can",
    "f_w",
    "s_w_from_can",
    "geodesic",
    "connection_coeffs",
]

# Switch point for the removable p0 -> 0 singularity of the geodesic flow.
_GEODESIC_P0_EPS = 1e-8


class SurfaceKind(enum.Enum):
    """The two non-flat group-type symmetric surfaces sharing the chart."""

    POINCARE_ORBIT = "poincare_orbit"
    HYPERBOLIC_PLANE = "hyperbolic_plane"


@dataclass(frozen=True)
class Point:
    """A point of the group manifold in global (a, l) coordinates."""

    a: float
    l: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and math.isfinite(self.l)):
            raise ValueError("point coordinates must be finite")

    def __array__(self, dtype=None, copy=None):
        return np.array([self.a, self.l], dtype=dtype or float)


@dataclass(frozen=True)
class GeodesicState:
    """Initial data (base point, tangent components) for a geodesic."""

    base: Point
    p0: float
    q0: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.p0) and math.isfinite(self.q0)):
            raise ValueError("tangent components must be finite")


def _pt(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 2:
        raise ValueError(f"expected (..., 2) point array, got shape {x.shape}")
    return x


def _pack(a, l) -> np.ndarray:
    return np.stack(np.broadcast_arrays(a, l), axis=-1)


def identity() -> np.ndarray:
    """Unit element of the group."""
    return np.zeros(2)


def group_mul(x, y) -> np.ndarray:
    """Group law (a, l) . (a', l') = (a + a', e^{-2a'} l + l')."""
    x, y = _pt(x), _pt(y)
    a = x[..., 0] + y[..., 0]
    l = np.exp(-2.0 * y[..., 0]) * x[..., 1] + y[..., 1]
    return _pack(a, l)


def group_inv(x) -> np.ndarray:
    """Group inverse (a, l)^{-1} = (-a, -e^{2a} l)."""
    x = _pt(x)
    return _pack(-x[..., 0], -np.exp(2.0 * x[..., 0]) * x[..., 1])


def psi(kind: SurfaceKind, x) -> np.ndarray:
    """Involution at the unit element encoding the affine structure."""
    x = _pt(x)
    a, l = x[..., 0], x[..., 1]
    if kind is SurfaceKind.POINCARE_ORBIT:
        return _pack(-a, -l)
    if kind is SurfaceKind.HYPERBOLIC_PLANE:
        return _pack(-a - 0.5 * np.log1p(l * l), -l)
    raise ValueError(f"unknown surface kind {kind!r}")


def symmetry(kind: SurfaceKind, center, x) -> np.ndarray:
    """Point symmetry s_center(x) = center . psi(center^{-1} . x)."""
    center = _pt(center)
    return group_mul(center, psi(kind, group_mul(group_inv(center), x)))


def symmetry_m_closed(center, x) -> np.ndarray:
    """Closed form of the Poincare-orbit symmetry, kept as a test oracle.

    s_(a,l)(a', l') = (2a - a', 2 cosh(2(a - a')) l - l').
    """
    c, x = _pt(center), _pt(x)
    da = c[..., 0] - x[..., 0]
    return _pack(2.0 * c[..., 0] - x[..., 0],
                 2.0 * np.cosh(2.0 * da) * c[..., 1] - x[..., 1])


def midpoint(x, y) -> np.ndarray:
    """Midpoint map of the Poincare orbit: s_m(x,y) x = y."""
    x, y = _pt(x), _pt(y)
    a = 0.5 * (x[..., 0] + y[..., 0])
    l = 0.5 * (x[..., 1] + y[..., 1]) / np.cosh(x[..., 0] - y[..., 0])
    return _pack(a, l)


def double_triangle(x0, x1, x2):
    """Double-triangle map on the Poincare orbit.

    Returns the vertex triple (t, s_{x0} t, s_{x1} s_{x0} t) of the unique
    double triangle with edge midpoints (x0, x1, x2), i.e. t is the fixed
    point of s_{x2} s_{x1} s_{x0}; the composition order is the one
    inverted exactly by ``double_triangle_inverse``.  Composing the
    closed-form symmetries shows the fixed-point equations are affine in
    (a, l) and solvable in closed form:

        a_t = a0 - a1 + a2
        l_t = cosh(2(a1 - a0)) l2 - cosh(2(a2 - a0)) l1 + cosh(2(a2 - a1)) l0
    """
    x0, x1, x2 = _pt(x0), _pt(x1), _pt(x2)
    a0, l0 = x0[..., 0], x0[..., 1]
    a1, l1 = x1[..., 0], x1[..., 1]
    a2, l2 = x2[..., 0], x2[..., 1]
    at = a0 - a1 + a2
    lt = (np.cosh(2.0 * (a1 - a0)) * l2
          - np.cosh(2.0 * (a2 - a0)) * l1
          + np.cosh(2.0 * (a2 - a1)) * l0)
    t = _pack(at, lt)
    y1 = symmetry_m_closed(x0, t)
    y2 = symmetry_m_closed(x1, y1)
    return t, y1, y2


def double_triangle_inverse(y0, y1, y2):
    """Inverse of the double-triangle map: edge midpoints of a triangle."""
    return midpoint(y0, y1), midpoint(y1, y2), midpoint(y2, y0)


def jac_phi(x0, x1, x2) -> np.ndarray:
    """Jacobian determinant of the double-triangle map (strictly positive)."""
    a0 = _pt(x0)[..., 0]
    a1 = _pt(x1)[..., 0]
    a2 = _pt(x2)[..., 0]
    return (16.0 * np.cosh(2.0 * (a0 - a1)) * np.cosh(2.0 * (a1 - a2))
            * np.cosh(2.0 * (a2 - a0)))


def jac_phi_inverse(x0, x1, x2) -> np.ndarray:
    """Jacobian determinant of the midpoint (inverse double-triangle) map."""
    a0 = _pt(x0)[..., 0]
    a1 = _pt(x1)[..., 0]
    a2 = _pt(x2)[..., 0]
    return (np.cosh(a0 - a1) * np.cosh(a1 - a2) * np.cosh(a2 - a0)) ** -1 / 16.0


def _s_can_m(x0, x1, x2) -> np.ndarray:
    a0, l0 = x0[..., 0], x0[..., 1]
    a1, l1 = x1[..., 0], x1[..., 1]
    a2, l2 = x2[..., 0], x2[..., 1]
    return (np.sinh(2.0 * (a0 - a1)) * l2
            + np.sinh(2.0 * (a2 - a0)) * l1
            + np.sinh(2.0 * (a1 - a2)) * l0)


def _s_can_d_origin(y, z) -> np.ndarray:
    ay, ly = y[..., 0], y[..., 1]
    az, lz = z[..., 0], z[..., 1]
    return (lz * np.sinh(2.0 * ay) - ly * np.sinh(2.0 * az)
            + 0.5 * ly * lz * (ly * np.exp(2.0 * ay) - lz * np.exp(2.0 * az)))


def s_can(kind: SurfaceKind, x0, x1, x2) -> np.ndarray:
    """Canonical admissible three-point phase of the chosen surface.

    On the hyperbolic plane the coordinate formula is stated at base point
    0; for general x0 the triple is left-translated by x0^{-1} first, which
    is the unique invariant extension.
    """
    x0, x1, x2 = _pt(x0), _pt(x1), _pt(x2)
    if kind is SurfaceKind.POINCARE_ORBIT:
        return _s_can_m(x0, x1, x2)
    if kind is SurfaceKind.HYPERBOLIC_PLANE:
        g = group_inv(x0)
        return _s_can_d_origin(group_mul(g, x1), group_mul(g, x2))
    raise ValueError(f"unknown surface kind {kind!r}")


def f_w(t) -> np.ndarray:
    """Odd reparametrization pi - 2 arccos(t) linking the canonical phase
    to the geodesic-triangle (Weinstein) phase on the hyperbolic plane."""
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0):
        raise DomainError("f_w requires |t| <= 1")
    return np.pi - 2.0 * np.arccos(t)


def s_w_from_can(c) -> np.ndarray:
    """Geodesic-triangle phase from the canonical phase value."""
    c = np.asarray(c, dtype=float)
    if np.any(np.abs(c) > 1.0):
        raise DomainError(
            "Weinstein phase undefined: |s_can| > 1 for this triple")
    return f_w(c)


def geodesic(state: GeodesicState, s) -> np.ndarray:
    """Geodesic of the Poincare-orbit connection at affine parameter s.

    (a, l)(s) = (p0 s + a0, l0 cosh(2 p0 s) + q0 sinh(2 p0 s) / (2 p0)),
    with the removable p0 = 0 limit handled by a short Taylor expansion.
    """
    s = np.asarray(s, dtype=float)
    a0, l0 = state.base.a, state.base.l
    p0, q0 = state.p0, state.q0
    a = p0 * s + a0
    if abs(p0) < _GEODESIC_P0_EPS:
        w = 2.0 * p0 * s
        l = l0 * np.cosh(w) + q0 * s * (1.0 + w * w / 6.0)
    else:
        l = l0 * np.cosh(2.0 * p0 * s) + q0 * np.sinh(2.0 * p0 * s) / (2.0 * p0)
    return _pack(a, l)


def connection_coeffs(v: float) -> tuple[float]:
    """The single nonvanishing Christoffel symbol Gamma^v_{alpha,alpha} = -v
    of the invariant symplectic connection, in (v, alpha) = (l, 2a) coords."""
    return (-float(v),)
