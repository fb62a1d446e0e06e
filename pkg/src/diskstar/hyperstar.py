"""The rotation-invariant product on the hyperbolic plane: the
Bessel-calculus intertwiners (radial-kernel integral operators), the
closed-form kernel product built from the canonical three-point phase,
and the kernel phase table.

The direct product is

    (u # v)(x) = C int K(S_can(x, y, z)) u(y) v(z) dy dz,

with K the closed-form kernel of ``specfun`` at order mu = 1/hb and
S_can the hyperbolic-plane three-point phase of ``geometry``.  The phase
convention (overall sign of S_can inside K) and the constant are
calibrated once against the intertwiner path U(U^{-1}u * U^{-1}v) with
the cosh weight, which is fully pinned by construction; the calibration
reproduces the nominal constant 1/(16 pi^3 hb^4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DecayError, DomainError
from .geometry import SurfaceKind, f_w, group_inv, group_mul, s_can
from .gridfn import (GridFunction, GridSpec, axis_derivative,
                     cubic_interp_axis, _trapezoid_weights)
from .specfun import (bessel_j, eps_extrapolate, kernel_k, kernel_phase,
                      radial_nodes)

__all__ = [
    "uu_apply",
    "uu_inverse_apply",
    "sharp_product",
    "phase_table",
    "PhaseTable",
    "SHARP_PHASE_SIGN",
    "sharp_constant",
]

#: Sign applied to s_can inside the kernel argument, fixed by the
#: intertwiner cross-check (see module docstring).
SHARP_PHASE_SIGN = -1.0


def sharp_constant(hbar: float) -> float:
    """Nominal normalization of the kernel product."""
    return 1.0 / (16.0 * np.pi ** 3 * hbar ** 4)


def _as_callable(f, what: str):
    """Wrap a GridFunction into a zero-extended cubic interpolant."""
    if callable(f):
        return f
    if not isinstance(f, GridFunction):
        raise TypeError(f"{what} must be a GridFunction or callable")
    if f.boundary_level(0) > 1e-4 or f.boundary_level(1) > 1e-4:
        raise DecayError(f"{what} does not decay at its grid boundary; "
                         "zero extension would be inaccurate")
    spec = f.spec

    def evaluate(A, L):
        A = np.asarray(A, dtype=float)
        L = np.asarray(L, dtype=float)
        A, L = np.broadcast_arrays(A, L)
        out = np.zeros(A.shape, dtype=complex)
        inside = ((A >= spec.a_min) & (A <= spec.a_max)
                  & (L >= spec.second_min) & (L <= spec.second_max))
        if not np.any(inside):
            return out
        aq = A[inside]
        lq = L[inside]
        # separable cubic interpolation at scattered points: interpolate
        # each point's own row stack (vectorized two-stage gather)
        rows = cubic_interp_axis(f.values, spec.a_min, spec.da, aq, axis=0)
        pos = (lq - spec.second_min) / spec.dsecond
        i1 = np.clip(np.floor(pos).astype(int), 0, spec.n_second - 2)
        s = pos - i1
        i0 = np.maximum(i1 - 1, 0)
        i2 = i1 + 1
        i3 = np.minimum(i1 + 2, spec.n_second - 1)
        idx = np.arange(len(aq))
        p0, p1 = rows[idx, i0], rows[idx, i1]
        p2, p3 = rows[idx, i2], rows[idx, i3]
        vals = 0.5 * (2.0 * p1 + (p2 - p0) * s
                      + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * s ** 2
                      + (3.0 * (p1 - p2) + p3 - p0) * s ** 3)
        out[inside] = vals
        return out

    return evaluate


def _uu_kernel_apply(f, hbar: float, k: float, out_spec: GridSpec,
                     x_max: float, eps_ladder, direction: float,
                     what: str) -> GridFunction:
    """Shared radial quadrature for the two intertwiners.

    direction +1: f(a - ln(x)/2, l x); direction -1: f(a + ln(x)/2, l / x).
    """
    fe = _as_callable(f, what)
    rk = math.sqrt(k)
    nu = rk / hbar
    xs, wx = radial_nodes(rk / hbar, x_max)
    jx = bessel_j(nu, rk * xs / hbar)
    A, L = out_spec.mesh()
    sums = {e: np.zeros((out_spec.n_a, out_spec.n_second), dtype=complex)
            for e in eps_ladder}
    for x, j, wi in zip(xs, jx, wx):
        if j == 0.0:
            continue
        if direction > 0:
            vals = fe(A - 0.5 * math.log(x), L * x)
        else:
            vals = fe(A + 0.5 * math.log(x), L / x)
        for e in eps_ladder:
            sums[e] += (j * wi * math.exp(-e * x)) * vals
    out = eps_extrapolate(lambda e: sums[e], tuple(eps_ladder))
    return GridFunction(out_spec, (rk / hbar) * out)


def uu_apply(f, hbar: float, k: float, out_spec: GridSpec,
             x_max: float = 900.0,
             eps_ladder=(0.1, 0.05, 0.025)) -> GridFunction:
    """Bessel-calculus intertwiner
    (sqrt(k)/hb) int J_nu(sqrt(k) x / hb) f(a - ln(x)/2, l x) dx,
    nu = sqrt(k)/hb; improper radial integral damped and extrapolated."""
    return _uu_kernel_apply(f, hbar, k, out_spec, x_max, eps_ladder,
                            +1.0, "uu_apply input")


def uu_inverse_apply(f, hbar: float, k: float, out_spec: GridSpec,
                     x_max: float = 900.0,
                     eps_ladder=(0.1, 0.05, 0.025)) -> GridFunction:
    """Inverse intertwiner
    (sqrt(k)/hb) int J_nu(sqrt(k) x / hb) f(a + ln(x)/2, l / x) dx."""
    return _uu_kernel_apply(f, hbar, k, out_spec, x_max, eps_ladder,
                            -1.0, "uu_inverse_apply input")


def _deposit_cubic(pos: np.ndarray, weights: np.ndarray,
                   n_bins: int) -> np.ndarray:
    """Catmull-Rom deposit of weighted samples onto bin centers.

    ``pos`` is in bin units.  The kernel is interpolatory (moments up to
    third order vanish), so pairing the deposited density against smooth
    grid data reproduces the exact pairing to fourth order in the bin
    width; pointwise the density may undershoot, which is irrelevant for
    the pairing use."""
    out = np.zeros(n_bins, dtype=complex)
    i0 = np.floor(pos).astype(int)
    t = pos - i0
    w = [-0.5 * t ** 3 + t ** 2 - 0.5 * t,
         1.5 * t ** 3 - 2.5 * t ** 2 + 1.0,
         -1.5 * t ** 3 + 2.0 * t ** 2 + 0.5 * t,
         0.5 * t ** 3 - 0.5 * t ** 2]
    for off, wj in zip((-1, 0, 1, 2), w):
        idx = i0 + off
        ok = (idx >= 0) & (idx < n_bins)
        np.add.at(out, idx[ok], weights[ok] * wj[ok])
    return out


def sharp_product(u, v, hbar: float, out_spec: GridSpec,
                  y_spec: GridSpec | None = None,
                  z_spec: GridSpec | None = None,
                  guard_delta: float = 1e-3,
                  constant: float | None = None,
                  cone_radius: float = 2.5, n_bins: int = 513,
                  report_sensitivity: bool = False):
    """Kernel form of the invariant product on the hyperbolic plane (k = 1).

    The kernel is the second derivative -F'' of a locally integrable
    closed form, classical away from the cone |S_can| = 1 and
    distributional across it.  Per output point the weighted quadrature
    samples u(y) v(z) dy dz are split at |S_can| = cone_radius:

    * far samples pair classically with the closed-form kernel;
    * near samples are pushed forward onto a 1-D density G(w)
      (Catmull-Rom deposit, fourth-order accurate for pairings) that
      vanishes at the interval ends, and contribute -C int F(w) G''(w) dw
      with the integrable endpoint singularities of F flattened by the
      substitutions w = sin(theta) inside the Weinstein region (where
      the phase is exactly e^{i mu theta}) and w = +-cosh(tau) outside.

    A symmetric guard band of width ``guard_delta`` around |w| = 1 is
    excluded from the 1-D integral; ``report_sensitivity`` recomputes at
    twice the width and returns the largest difference alongside.
    """
    ue = _as_callable(u, "sharp u")
    ve = _as_callable(v, "sharp v")
    if y_spec is None:
        y_spec = GridSpec(-3.5, 3.5, -3.5, 3.5, 48, 48)
    if z_spec is None:
        z_spec = y_spec
    const = sharp_constant(hbar) if constant is None else constant
    mu = 1.0 / hbar

    ya, yl = y_spec.mesh()
    za, zl = z_spec.mesh()
    wya = _trapezoid_weights(y_spec.n_a, y_spec.da)
    wyl = _trapezoid_weights(y_spec.n_second, y_spec.dsecond)
    wza = _trapezoid_weights(z_spec.n_a, z_spec.da)
    wzl = _trapezoid_weights(z_spec.n_second, z_spec.dsecond)
    uw = (ue(ya, yl) * np.outer(wya, wyl)).ravel()
    vw = (ve(za, zl) * np.outer(wza, wzl)).ravel()
    y_flat = np.stack([ya.ravel(), yl.ravel()], axis=-1)
    z_flat = np.stack([za.ravel(), zl.ravel()], axis=-1)

    # deposit grid padded so near-sample spill stays interior and G
    # vanishes identically at the ends (no boundary terms in the parts
    # integration)
    h_bin = 2.0 * cone_radius / (n_bins - 1)
    w_edge = cone_radius + 6.0 * h_bin
    n_grid = n_bins + 12
    pos_of = lambda s: (s + w_edge) / h_bin

    theta = np.linspace(-np.pi / 2, np.pi / 2, 1601)
    w_in = np.sin(theta)
    f_in = np.exp(1j * mu * theta)          # (1 - w^2)^{-1/2} absorbed
    tau = np.linspace(0.0, float(np.arccosh(w_edge)), 801)
    w_out = np.cosh(tau)
    with np.errstate(divide="ignore"):
        mod = np.where(
            w_out > 1.0,
            w_out ** -mu * (1.0 + np.sqrt(np.abs(1.0 - w_out ** -2.0)))
            ** -mu, 1.0)
    f_out_pos = mod * np.exp(0.5j * np.pi * (mu + 1.0))
    f_out_neg = mod * np.exp(-0.5j * np.pi * (mu + 1.0))

    out = np.empty((out_spec.n_a, out_spec.n_second), dtype=complex)
    sens = 0.0
    chunk = max(1, 4_000_000 // max(1, len(vw)))
    for ia, a0 in enumerate(out_spec.a_axis):
        for il, l0 in enumerate(out_spec.second_axis):
            x = np.array([a0, l0])
            ginv = group_inv(x)
            up = group_mul(ginv, y_flat)
            vp = group_mul(ginv, z_flat)
            au, lu = up[:, 0], up[:, 1]
            av, lv = vp[:, 0], vp[:, 1]
            s1, e1 = np.sinh(2.0 * au), lu * np.exp(2.0 * au)
            s2, e2 = np.sinh(2.0 * av), lv * np.exp(2.0 * av)
            g = np.zeros(n_grid, dtype=complex)
            far = 0.0 + 0.0j
            for i0 in range(0, len(lu), chunk):
                sl = slice(i0, i0 + chunk)
                sc = (np.outer(s1[sl], lv) - np.outer(lu[sl], s2)
                      + 0.5 * (np.outer(lu[sl] * e1[sl], lv)
                               - np.outer(lu[sl], lv * e2))).ravel()
                sc *= SHARP_PHASE_SIGN
                uv = np.outer(uw[sl], vw).ravel()
                near = np.abs(sc) <= cone_radius
                g += _deposit_cubic(pos_of(sc[near]), uv[near], n_grid)
                sfar = sc[~near]
                far += np.sum(kernel_k(mu, sfar) * uv[~near])
            g /= h_bin
            gpp = axis_derivative(g, h_bin, 0, 2, acc=4)

            def gpp_at(wq):
                return cubic_interp_axis(gpp, -w_edge, h_bin, wq, axis=0)

            def value(delta):
                keep_in = np.abs(w_in ** 2 - 1.0) >= delta
                val = np.trapezoid(
                    np.where(keep_in, gpp_at(w_in) * f_in, 0.0), x=theta)
                keep_out = np.abs(w_out ** 2 - 1.0) >= delta
                val += np.trapezoid(
                    np.where(keep_out, gpp_at(w_out) * f_out_pos, 0.0),
                    x=tau)
                val += np.trapezoid(
                    np.where(keep_out, gpp_at(-w_out) * f_out_neg, 0.0),
                    x=tau)
                return const * (far - val)

            val = value(guard_delta)
            out[ia, il] = val
            if report_sensitivity:
                sens = max(sens, abs(val - value(2.0 * guard_delta)))
    result = GridFunction(out_spec, out)
    if report_sensitivity:
        return result, sens
    return result


@dataclass(frozen=True)
class PhaseTable:
    """WKB phase of the kernel against the geodesic-triangle phase."""

    varpi: np.ndarray
    phase: np.ndarray       # hb * arg-phase of the kernel (action scale)
    phase_w: np.ndarray     # geodesic-triangle phase f_w(varpi)
    ratio: np.ndarray
    hbar: float

    def rows(self):
        for w, s, sw, r in zip(self.varpi, self.phase, self.phase_w,
                               self.ratio):
            yield (w, s, sw, r, self.hbar)


def phase_table(hbar: float, varpi) -> PhaseTable:
    """Action-scale kernel phase hb * S_{1/hb}(w), the triangle phase, and
    their ratio (tending to 1/2 for small hbar) over |varpi| < 1."""
    w = np.atleast_1d(np.asarray(varpi, dtype=float))
    if np.any(np.abs(w) >= 1.0):
        raise DomainError("phase_table requires varpi^2 < 1")
    s_mu = kernel_phase(1.0 / hbar, w)
    sw = f_w(w)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(w == 0.0, 0.5, hbar * s_mu / np.where(sw == 0, 1, sw))
    return PhaseTable(varpi=w, phase=hbar * s_mu, phase_w=sw, ratio=ratio,
                      hbar=hbar)
