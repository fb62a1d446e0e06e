"""The family of invariant products on the Poincare orbit: weight
functions, the intertwiners T and T^{-1} built from the partial Fourier
transform and the sinh reparametrization, the product itself (intertwiner
path and direct oscillatory-integral path), and the closedness residual.

The intertwiners are evaluated as iterated integrals: the inner transform
is computed directly at the reparametrized frequency nodes (the explicit
quadrature matrix evaluates at arbitrary real frequencies), so no
intermediate resampling enters.

Direct-path conventions
-----------------------
The displayed oscillatory formula

    (u * v)(x0) = (C/hb^2) int sqrt(Jac_Phi) e^{(i sigma/hb) S_can}
                  P(a0-a1) P(a2-a0) / P(a1-a2) u(x1) v(x2) dx1 dx2

is evaluated with constant C = 1/(4 pi^2) and phase sign sigma = -1,
both calibrated once against the intertwiner path (which is the defining
construction): the flat limit of the displayed phase is -2 Omega(y-x, z-x),
i.e. opposite to the Weyl kernel, so the literal sign would produce the
opposite product; see the path-agreement test.  Since S_can is linear in
each ell argument the two ell integrals are partial Fourier transforms,
which reduces the quadrature to a smooth localized (a1, a2) integral per
output point.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, GridMismatchError
from .geometry import SurfaceKind, jac_phi, s_can
from .gridfn import (GridFunction, GridSpec, SecondKind, integrate,
                     inverse_partial_fourier_at, partial_fourier_at,
                     _trapezoid_weights)
from .moyal import moyal_series

__all__ = [
    "WeightKind",
    "Weight",
    "t",
    "t_inverse",
    "star_p",
    "closedness_residual",
    "DIRECT_PHASE_SIGN",
    "DIRECT_CONSTANT",
]

#: Phase sign and constant of the direct oscillatory formula, fixed by the
#: path-agreement calibration (see module docstring).
DIRECT_PHASE_SIGN = -1.0
DIRECT_CONSTANT = 1.0 / (4.0 * np.pi ** 2)


class WeightKind(enum.Enum):
    IDENTITY = "identity"
    CLOSED = "closed"
    UNTERBERGER = "unterberger"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Weight:
    """One-variable weight function P with its deformation parameter.

    CLOSED is sqrt(cosh(hb z)); UNTERBERGER is cosh(hb z); CUSTOM takes a
    vectorized callable.  All built-in kinds satisfy P(0) = 1 and vanish
    nowhere on the real line.
    """

    kind: WeightKind
    hbar: float
    custom: Callable | None = None

    def __post_init__(self) -> None:
        if self.hbar <= 0 or not math.isfinite(self.hbar):
            raise ValueError("hbar must be finite positive")
        if self.kind is WeightKind.CUSTOM and self.custom is None:
            raise ValueError("custom weight needs a callable")

    def evaluate(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if self.kind is WeightKind.IDENTITY:
            vals = np.ones_like(z)
        elif self.kind is WeightKind.CLOSED:
            vals = np.sqrt(np.cosh(self.hbar * z))
        elif self.kind is WeightKind.UNTERBERGER:
            vals = np.cosh(self.hbar * z)
        else:
            vals = np.asarray(self.custom(z))
        if np.any(np.abs(vals) < 1e-300):
            raise DomainError("weight function vanishes on the working range")
        return vals


def _require_ell(f: GridFunction, who: str) -> None:
    if f.spec.second_kind is not SecondKind.ELL:
        raise GridMismatchError(f"{who} expects an (a, ell) grid function")


def t_inverse(w: Weight, f: GridFunction,
              zeta_spec: GridSpec | None = None) -> GridFunction:
    """Intertwiner from the Moyal side to the weighted product side.

    (T^{-1} f)(a, l0) = (1/2pi) int e^{i z l0} P(z)
                         [int e^{-i (sinh(hb z)/hb) l} f(a, l) dl] dz
    """
    _require_ell(f, "t_inverse")
    spec = f.spec if zeta_spec is None else zeta_spec
    zeta = spec.second_axis
    hb = w.hbar
    stretched = np.sinh(hb * zeta) / hb
    inner = partial_fourier_at(f, stretched)          # (n_a, n_zeta)
    inner = inner * w.evaluate(zeta)[None, :]
    gz = GridFunction(spec.with_second(second_kind=SecondKind.ZETA), inner)
    out = inverse_partial_fourier_at(gz, f.spec.second_axis,
                                     check_decay=False)
    return f.with_values(out)


def t(w: Weight, f: GridFunction,
      r_spec: GridSpec | None = None) -> GridFunction:
    """Left inverse of ``t_inverse``.

    (T f)(a, l0) = (1/2pi) int e^{i r l0} (F f)(a, arcsinh(hb r)/hb)
                    / P(arcsinh(hb r)/hb) dr
    """
    _require_ell(f, "t")
    spec = f.spec if r_spec is None else r_spec
    r = spec.second_axis
    hb = w.hbar
    zeta_of_r = np.arcsinh(hb * r) / hb
    inner = partial_fourier_at(f, zeta_of_r)
    inner = inner / w.evaluate(zeta_of_r)[None, :]
    gr = GridFunction(spec.with_second(second_kind=SecondKind.R), inner)
    out = inverse_partial_fourier_at(gr, f.spec.second_axis,
                                     check_decay=False)
    return f.with_values(out)


def star_p(w: Weight, u: GridFunction, v: GridFunction, hbar: float,
           path: str = "intertwiner", order: int = 6,
           out_spec: GridSpec | None = None,
           rho_cut: float = 1e-7) -> GridFunction:
    """Invariant product on the Poincare orbit.

    path="intertwiner" computes T(T^{-1}u *_moyal T^{-1}v) on the full
    grid (the defining construction); path="direct" evaluates the
    oscillatory three-point formula on ``out_spec`` by the reduction
    described in the module docstring.
    """
    if u.spec != v.spec:
        raise GridMismatchError("operands must share one grid")
    if hbar != w.hbar:
        raise ValueError("weight and product must share hbar")
    if path == "intertwiner":
        tu = t_inverse(w, u)
        tv = t_inverse(w, v)
        return t(w, moyal_series(tu, tv, hbar, order))
    if path != "direct":
        raise ValueError("path must be 'intertwiner' or 'direct'")
    return _star_direct(w, u, v, hbar, out_spec, rho_cut)


def _star_direct(w: Weight, u: GridFunction, v: GridFunction, hbar: float,
                 out_spec: GridSpec | None, rho_cut: float) -> GridFunction:
    if out_spec is None:
        out_spec = GridSpec(-1.0, 1.0, -1.0, 1.0, 9, 9, u.spec.second_kind)
    a_u = u.spec.a_axis
    a_v = v.spec.a_axis
    wa_u = _trapezoid_weights(u.spec.n_a, u.spec.da)
    wa_v = _trapezoid_weights(v.spec.n_a, v.spec.da)

    # frequency reach of the ell transforms, to localize the a integrals
    fu = np.abs(partial_fourier_at(u, np.array([0.0]))).max()
    probe = np.linspace(0.0, np.pi / u.spec.dsecond * 0.9, 300)
    pu = np.abs(partial_fourier_at(u, probe)).max(axis=0)
    pv = np.abs(partial_fourier_at(v, probe)).max(axis=0)
    peak = max(pu.max(), pv.max())
    dead = (pu < rho_cut * peak) & (pv < rho_cut * peak)
    if not np.any(dead):
        raise DomainError("star_p direct path: ell spectra do not decay")
    rho_max = probe[np.argmax(dead)] * 1.1
    a_window = 0.5 * np.arcsinh(hbar * rho_max) + 0.1

    sign = DIRECT_PHASE_SIGN
    out = np.empty((out_spec.n_a, out_spec.n_second), dtype=complex)
    for ia, a0 in enumerate(out_spec.a_axis):
        su = (a_u >= a0 - a_window) & (a_u <= a0 + a_window)
        sv = (a_v >= a0 - a_window) & (a_v <= a0 + a_window)
        a1 = a_u[su]
        a2 = a_v[sv]
        # ell integrals: int u(a1,l1) e^{(i sign/hb) sinh(2(a2-a0)) l1} dl1
        rho1 = -sign * np.sinh(2.0 * (a2 - a0)) / hbar
        rho2 = -sign * np.sinh(2.0 * (a0 - a1)) / hbar
        U = partial_fourier_at(u, rho1, check_decay=False)[su, :]   # [i1, i2]
        V = partial_fourier_at(v, rho2, check_decay=False)[sv, :]   # [i2, i1]
        A1, A2 = np.meshgrid(a1, a2, indexing="ij")
        jac = 16.0 * (np.cosh(2.0 * (a0 - A1)) * np.cosh(2.0 * (A1 - A2))
                      * np.cosh(2.0 * (A2 - a0)))
        wgt = (w.evaluate(a0 - A1) * w.evaluate(A2 - a0)
               / w.evaluate(A1 - A2))
        base = (np.sqrt(jac) * wgt * U * V.T
                * np.outer(wa_u[su], wa_v[sv]))
        phase_freq = sign * np.sinh(2.0 * (A1 - A2)) / hbar
        for il, l0 in enumerate(out_spec.second_axis):
            out[ia, il] = np.sum(base * np.exp(1j * l0 * phase_freq))
    out *= DIRECT_CONSTANT / hbar ** 2
    return GridFunction(out_spec, out)


def closedness_residual(w: Weight, u: GridFunction, v: GridFunction,
                        hbar: float) -> float:
    """|int u*v - int u v| / |int u v| on the intertwiner path."""
    prod = star_p(w, u, v, hbar)
    num = integrate(prod, check_decay=False)
    den = integrate(u.with_values(u.values * v.values), check_decay=False)
    if den == 0:
        return float(abs(num))
    return float(abs(num - den) / abs(den))
