"""De-contraction machinery: the hyperbolic operator obtained by
conjugating the quantum sl2 derivation through the partial Fourier
transform, its Lorentzian principal symbol, the separated Bessel modes of
the intertwiner evolution equation, mode normalizations, the spectral
intertwiners U_s / V_s with their small-hbar expansion, the Fourier-like
transforms adapted to e^{+-2a}, and the flat (Zagier-type) special case.

Assembled-kernel conventions (verified symbolically during development
and enforced by the residual tests): with q = e^{2(a-b)} and F a solution
of the separated (q, r) equation,

    direct family   W = (1+hb^2 r^2)^{1/4} q e^{-i r n q} F(q,r)
                    satisfies      -Box_{(b,r)} W = +Fstar_{(a,n)} W,
    inverse family  W = (1+hb^2 r^2)^{1/4} q e^{+i r n q} F(q,r)
                    satisfies      -Box_{(b,r)} W = -Fstar_{(a,n)} W,

    Fstar_{(a,n)} = e^{2a} (n d_a - (k' + n^2) d_n)
                  = e^{2a} (2 q n d_q - (k' + n^2) d_n).

(The published display of the right-hand side carries a spurious extra
factor q; ``fstar_apply`` keeps the displayed operator as a standalone
grid operation, while the residuals use the form above.)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, TruncationError
from .gridfn import (GridFunction, GridSpec, SecondKind, axis_derivative,
                     cubic_interp_axis, partial_fourier_at,
                     _trapezoid_weights)
from .specfun import bessel_j, bessel_y, radial_nodes

__all__ = [
    "ModeParams",
    "box_apply",
    "lorentz_metric",
    "fstar_apply",
    "mode_F",
    "pde_residual_bqfr",
    "mode_classical",
    "pde_residual_degenerate",
    "norm_c",
    "norm_d",
    "evolution_residual",
    "wave_residual_uv",
    "wave_residual_xieta",
    "u_s_apply",
    "v_s_apply",
    "taylor_p",
    "fourier_pm",
    "fourier_pm_inverse",
    "zagier_kernel",
]


@dataclass(frozen=True)
class ModeParams:
    """Parameters (hbar, s, k, k', A, B) of one separated Bessel mode."""

    hbar: float
    s: float
    k: float
    k_prime: float
    A: complex = 1.0 + 0j
    B: complex = 0.0 + 0j

    def __post_init__(self) -> None:
        if self.hbar <= 0 or self.k <= 0 or self.k_prime < 0:
            raise ValueError("need hbar > 0, k > 0, k' >= 0")

    @property
    def nu(self) -> float:
        return math.sqrt(self.k) / self.hbar

    @property
    def beta(self) -> float:
        return math.sqrt(self.s ** 2 + self.k_prime / self.hbar ** 2)


def box_apply(f: GridFunction, hbar: float, k: float) -> GridFunction:
    """Second-order hyperbolic operator on an (a, zeta)-type grid.

    i e^{2a} [ (hb^2/4) z d_a^2 + z (1+hb^2 z^2) d_z^2
               + (1+hb^2 z^2) d_a d_z + hb^2 z d_a
               + (2+3 hb^2 z^2) d_z - z (k - hb^2) ].
    """
    A, Z = f.spec.mesh()
    ha, hz = f.spec.da, f.spec.dsecond
    faa = axis_derivative(f.values, ha, 0, 2)
    fzz = axis_derivative(f.values, hz, 1, 2)
    fa = axis_derivative(f.values, ha, 0, 1)
    fz = axis_derivative(f.values, hz, 1, 1)
    faz = axis_derivative(fa, hz, 1, 1)
    z2 = 1.0 + hbar ** 2 * Z ** 2
    out = 1j * np.exp(2.0 * A) * (
        0.25 * hbar ** 2 * Z * faa + Z * z2 * fzz + z2 * faz
        + hbar ** 2 * Z * fa + (2.0 + 3.0 * hbar ** 2 * Z ** 2) * fz
        - Z * (k - hbar ** 2) * f.values)
    return f.with_values(out)


def lorentz_metric(a, zeta, hbar: float) -> np.ndarray:
    """Inverse-metric principal symbol of ``box_apply``; always Lorentzian.

    Returns (..., 2, 2) arrays e^{2a}(1+hb^2 z^2) [[ (hb^2/4) z/(1+hb^2 z^2), 1],
    [1, z]]; raises if the determinant fails to be negative.
    """
    a = np.asarray(a, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    a, zeta = np.broadcast_arrays(a, zeta)
    z2 = 1.0 + hbar ** 2 * zeta ** 2
    pre = np.exp(2.0 * a) * z2
    g = np.empty(a.shape + (2, 2))
    g[..., 0, 0] = pre * 0.25 * hbar ** 2 * zeta / z2
    g[..., 0, 1] = pre
    g[..., 1, 0] = pre
    g[..., 1, 1] = pre * zeta
    det = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] * g[..., 1, 0]
    if np.any(det >= 0):
        raise ValueError("principal symbol lost Lorentz signature")
    return g


def fstar_apply(W: GridFunction, k_prime: float, exp2a=1.0) -> GridFunction:
    """The displayed first-order operator e^{2a} q (2qn d_q - (k'+n^2) d_n).

    The grid's first axis is q > 0, the second is n; ``exp2a`` supplies
    the symbolic e^{2a} prefactor (scalar or broadcastable array).
    """
    Q, N = W.spec.mesh()
    if np.any(Q <= 0):
        raise DomainError("first axis of the (q, n) grid must be positive")
    wq = axis_derivative(W.values, W.spec.da, 0, 1)
    wn = axis_derivative(W.values, W.spec.dsecond, 1, 1)
    out = exp2a * Q * (2.0 * Q * N * wq - (k_prime + N * N) * wn)
    return W.with_values(out)


def mode_F(p: ModeParams, q, r) -> np.ndarray:
    """Separated mode F(q, r) = h(q) (1+hb^2 r^2)^{-1/4} e^{i s q sqrt(1+hb^2 r^2)}.

    h = A J_nu(beta q) + B Y_nu(beta q), nu = sqrt(k)/hb,
    beta = sqrt(s^2 + k'/hb^2).
    """
    q = np.asarray(q, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(q <= 0):
        raise DomainError("mode_F requires q > 0")
    h = p.A * bessel_j(p.nu, p.beta * q)
    if p.B != 0:
        h = h + p.B * bessel_y(p.nu, p.beta * q)
    root = np.sqrt(1.0 + p.hbar ** 2 * r ** 2)
    return h * root ** -0.5 * np.exp(1j * p.s * q * root)


def pde_residual_bqfr(F: GridFunction, hbar: float, k: float,
                      k_prime: float) -> GridFunction:
    """Left-hand side of the separated (q, r) equation applied to samples.

    (-r hb^2 q^2 (1+hb^2 r^2) d_q^2 - r (1+hb^2 r^2)^2 d_r^2
     + 2 q (1+hb^2 r^2)^2 d_r d_q - 2 hb^2 r^2 (1+hb^2 r^2) d_r + V) F,
    V = r (-(hb^2/4)(2 + hb^2 r^2) + (1+hb^2 r^2)(k - k' q^2)).
    """
    Q, R = F.spec.mesh()
    hq, hr = F.spec.da, F.spec.dsecond
    fqq = axis_derivative(F.values, hq, 0, 2)
    frr = axis_derivative(F.values, hr, 1, 2)
    fq = axis_derivative(F.values, hq, 0, 1)
    fr = axis_derivative(F.values, hr, 1, 1)
    frq = axis_derivative(fq, hr, 1, 1)
    r2 = 1.0 + hbar ** 2 * R ** 2
    V = R * (-0.25 * hbar ** 2 * (2.0 + hbar ** 2 * R ** 2)
             + r2 * (k - k_prime * Q ** 2))
    out = (-R * hbar ** 2 * Q ** 2 * r2 * fqq - R * r2 ** 2 * frr
           + 2.0 * Q * r2 ** 2 * frq - 2.0 * hbar ** 2 * R ** 2 * r2 * fr
           + V * F.values)
    return F.with_values(out)


def mode_classical(sigma: float, q, r, k: float, k_prime: float) -> np.ndarray:
    """Zero-hbar mode q^{-1/2} e^{i sigma q r^2 / 2} e^{-(i/2 sigma)(k/q + k' q)}."""
    if sigma == 0:
        raise DomainError("mode_classical requires sigma != 0")
    q = np.asarray(q, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(q <= 0):
        raise DomainError("mode_classical requires q > 0")
    return (q ** -0.5 * np.exp(0.5j * sigma * q * r ** 2)
            * np.exp(-0.5j / sigma * (k / q + k_prime * q)))


def pde_residual_degenerate(F: GridFunction, k: float,
                            k_prime: float) -> GridFunction:
    """Left side of the hbar = 0 equation (-r d_r^2 + 2q d_r d_q + r(k - k'q^2)) F."""
    Q, R = F.spec.mesh()
    hq, hr = F.spec.da, F.spec.dsecond
    frr = axis_derivative(F.values, hr, 1, 2)
    fq = axis_derivative(F.values, hq, 0, 1)
    frq = axis_derivative(fq, hr, 1, 1)
    out = -R * frr + 2.0 * Q * frq + R * (k - k_prime * Q ** 2) * F.values
    return F.with_values(out)


def _unimodular_power(s: float, hbar: float, kref: float,
                      exponent: float) -> complex:
    """[(sqrt(kref) - i hb s)/(sqrt(kref) + i hb s)]^exponent, principal log."""
    z = complex(math.sqrt(kref), -hbar * s)
    ratio = z / z.conjugate()
    return complex(np.exp(exponent * np.log(ratio)))


def norm_c(hbar: float, s: float, k_prime: float) -> complex:
    """Normalization making the direct spectral intertwiner unital."""
    if k_prime <= 0:
        raise DomainError("norm_c requires k' > 0")
    rk = math.sqrt(k_prime)
    return (rk / (2.0 * np.pi * hbar)
            * _unimodular_power(s, hbar, k_prime, rk / (2.0 * hbar)))


def norm_d(hbar: float, s: float, k: float, k_prime: float) -> complex:
    """Normalization making the inverse-side spectral intertwiner unital."""
    if k_prime <= 0:
        raise DomainError("norm_d requires k' > 0")
    rk = math.sqrt(k)
    return (rk / (np.pi * hbar)
            * _unimodular_power(s, hbar, k_prime, rk / (2.0 * hbar)))


# ---------------------------------------------------------------------------
# evolution residuals for the assembled convolution kernels


def _assembled_w(p: ModeParams, a, n, b, r, phase_sign: float) -> np.ndarray:
    q = np.exp(2.0 * (a - b))
    root4 = (1.0 + p.hbar ** 2 * np.asarray(r) ** 2) ** 0.25
    return root4 * q * np.exp(phase_sign * 1j * r * n * q) * mode_F(p, q, r)


def evolution_residual(p: ModeParams, family: str, a: float, n: float,
                       spec_br: GridSpec, fd_step: float = 2e-3):
    """Residual of the intertwiner evolution equation on a (b, r) patch.

    family="direct" checks -Box W = +Fstar W for the e^{-irnq} assembly;
    family="inverse" checks -Box W = -Fstar W for the conjugate phase.
    Box is applied by grid stencils in (b, r); Fstar by short central
    stencils in the analytic (a, n) dependence.  Returns (residual, scale)
    where scale is the larger of the two sides' sup norms.
    """
    if family == "direct":
        sgn_phase, sgn_rhs = -1.0, +1.0
    elif family == "inverse":
        sgn_phase, sgn_rhs = +1.0, -1.0
    else:
        raise ValueError("family must be 'direct' or 'inverse'")
    B, R = spec_br.mesh()
    W = GridFunction(spec_br, _assembled_w(p, a, n, B, R, sgn_phase))
    hb2 = p.hbar ** 2
    hb_b, hb_r = spec_br.da, spec_br.dsecond
    waa = axis_derivative(W.values, hb_b, 0, 2)
    wrr = axis_derivative(W.values, hb_r, 1, 2)
    wa = axis_derivative(W.values, hb_b, 0, 1)
    wr = axis_derivative(W.values, hb_r, 1, 1)
    war = axis_derivative(wa, hb_r, 1, 1)
    r2 = 1.0 + hb2 * R ** 2
    box = 1j * np.exp(2.0 * B) * (
        0.25 * hb2 * R * waa + R * r2 * wrr + r2 * war + hb2 * R * wa
        + (2.0 + 3.0 * hb2 * R ** 2) * wr - R * (p.k - hb2) * W.values)

    w5 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
    offs = np.array([-2.0, -1.0, 0.0, 1.0, 2.0]) * fd_step
    da = sum(w * _assembled_w(p, a + o, n, B, R, sgn_phase)
             for w, o in zip(w5, offs)) / fd_step
    dn = sum(w * _assembled_w(p, a, n + o, B, R, sgn_phase)
             for w, o in zip(w5, offs)) / fd_step
    fstar = np.exp(2.0 * a) * (n * da - (p.k_prime + n * n) * dn)

    residual = -box - sgn_rhs * fstar
    scale = max(np.abs(box).max(), np.abs(fstar).max())
    return W.with_values(residual), scale


def wave_residual_uv(p: ModeParams, spec_uv: GridSpec):
    """Residual of d_U d_V G + Q G = 0 for the transplanted mode.

    U = sqrt(q) sinh(hb zeta / 2), V = sqrt(q) cosh(hb zeta / 2),
    r = sinh(hb zeta)/hb, G = sqrt(q) (1 + hb^2 r^2)^{1/4} F(q, r);
    requires V > |U| on the grid.  Returns (residual, scale).
    """
    U, V = spec_uv.mesh()
    if np.any(V <= np.abs(U)):
        raise DomainError("need V > |U| so that q = V^2 - U^2 > 0")
    hb = p.hbar
    q = V ** 2 - U ** 2
    zeta = 2.0 / hb * np.arctanh(U / V)
    r = np.sinh(hb * zeta) / hb
    G = np.sqrt(q) * (1.0 + hb ** 2 * r ** 2) ** 0.25 * mode_F(p, q, r)
    g = GridFunction(spec_uv, G)
    gu = axis_derivative(g.values, spec_uv.da, 0, 1)
    guv = axis_derivative(gu, spec_uv.dsecond, 1, 1)
    Qt = (-4.0 / hb ** 2 * U * V / q ** 2
          * (hb ** 2 / 4.0 - p.k + p.k_prime * q ** 2))
    residual = guv + Qt * G
    scale = max(np.abs(guv).max(), np.abs(Qt * G).max())
    return g.with_values(residual), scale


def wave_residual_xieta(p: ModeParams, spec_xe: GridSpec):
    """Residual of d_xi d_eta G = k' xi eta G in the k = hb^2/4 case.

    xi = sqrt(q) (2/hb) sinh(hb zeta/2), eta = sqrt(q) cosh(hb zeta/2).
    (The constant multiplying k' follows from the (U, V) wave form under
    this rescaling; the published display carries an extra factor 4.)
    Returns (residual, scale).
    """
    if abs(p.k - p.hbar ** 2 / 4.0) > 1e-12:
        raise DomainError("xi-eta form requires k = hbar^2 / 4")
    XI, ETA = spec_xe.mesh()
    hb = p.hbar
    U = 0.5 * hb * XI
    V = ETA
    if np.any(V <= np.abs(U)):
        raise DomainError("need eta > |hb xi / 2|")
    q = V ** 2 - U ** 2
    zeta = 2.0 / hb * np.arctanh(U / V)
    r = np.sinh(hb * zeta) / hb
    G = np.sqrt(q) * (1.0 + hb ** 2 * r ** 2) ** 0.25 * mode_F(p, q, r)
    g = GridFunction(spec_xe, G)
    gx = axis_derivative(g.values, spec_xe.da, 0, 1)
    gxe = axis_derivative(gx, spec_xe.dsecond, 1, 1)
    residual = gxe - p.k_prime * XI * ETA * G
    scale = max(np.abs(gxe).max(), np.abs(p.k_prime * XI * ETA * G).max())
    return g.with_values(residual), scale


# ---------------------------------------------------------------------------
# spectral intertwiners U_s and V_s


def _ell_transform_table(f, a_lo: float, a_hi: float, n_a: int,
                         n_extent: float, n_points: int, r_axis):
    """Partial Fourier table F(alpha, rho) = int e^{-i rho n} f(alpha, n) dn.

    ``f`` is a GridFunction or a vectorized callable f(A, N); the table is
    built on a uniform alpha grid covering [a_lo, a_hi] and evaluated at
    the requested rho nodes.
    """
    if isinstance(f, GridFunction):
        spec = f.spec
        table = partial_fourier_at(f, r_axis)
        return spec.a_axis, table
    spec = GridSpec(a_lo, a_hi, -n_extent, n_extent, n_a, n_points,
                    SecondKind.ELL)
    A, N = spec.mesh()
    vals = GridFunction(spec, np.asarray(f(A, N), dtype=complex))
    table = partial_fourier_at(vals, r_axis, check_decay=False)
    return spec.a_axis, table


def _interp_rows(a_axis, table, alpha):
    """Rows of the transform table at off-grid alpha (cubic, zero outside)."""
    a0, h = a_axis[0], a_axis[1] - a_axis[0]
    alpha = np.asarray(alpha, dtype=float)
    inside = (alpha >= a0) & (alpha <= a_axis[-1])
    safe = np.where(inside, alpha, a0)
    rows = cubic_interp_axis(table, a0, h, safe, axis=0)
    rows[~inside] = 0.0
    return rows


def _x_nodes(beta: float, x_max: float):
    return radial_nodes(beta, x_max, x_min=1e-3, per_period=12)


def _check_tail(p: ModeParams, x_max: float, eps_min: float,
                tail_tol: float) -> float:
    # envelope bound sqrt(2/(pi beta x)) e^{-eps x} integrated past x_max
    tail = (math.sqrt(2.0 / (np.pi * p.beta * x_max))
            * math.exp(-eps_min * x_max) / eps_min)
    if tail > tail_tol:
        raise TruncationError(
            f"x-integral tail estimate {tail:.2e} exceeds {tail_tol:.0e}; "
            "raise x_max")
    return tail


def u_s_apply(p: ModeParams, f, out_spec: GridSpec,
              r_extent: float = 8.0, n_r: int = 257,
              x_max: float = 700.0, eps_ladder=(0.1, 0.05, 0.025),
              tail_tol: float = 1e-5, n_extent: float = 30.0,
              alpha_points: int = 641) -> GridFunction:
    """Direct spectral intertwiner (B = 0 modes, unit-normalized).

    (U_s f)(a, l) = C(s) int_0^inf dx J_nu(beta x) int dr (1+hb^2 r^2)^{-1/4}
                    e^{i s x sqrt(1+hb^2 r^2)} e^{i r l x} Ff(a - ln(x)/2, r) dr

    with Ff the partial Fourier transform of f in its second argument.
    The improper x integral is damped by e^{-eps x} on ``eps_ladder`` and
    extrapolated to zero damping; its truncation tail is bound-checked.
    """
    xs, wx = _x_nodes(p.beta, x_max)
    _check_tail(p, x_max, min(eps_ladder), tail_tol)
    r = np.linspace(-r_extent, r_extent, n_r)
    wr = _trapezoid_weights(n_r, r[1] - r[0])
    a_lo = out_spec.a_min - 0.5 * math.log(x_max) - 0.5
    a_hi = out_spec.a_max - 0.5 * math.log(xs[0]) + 0.5
    a_axis, table = _ell_transform_table(f, a_lo, a_hi, alpha_points,
                                         n_extent, 1025, r)

    root = np.sqrt(1.0 + p.hbar ** 2 * r ** 2)
    l_out = out_spec.second_axis
    sums = {e: np.zeros((out_spec.n_a, out_spec.n_second), dtype=complex)
            for e in eps_ladder}
    for x, jx, wxi in zip(xs, bessel_j(p.nu, p.beta * xs), wx):
        if jx == 0.0:
            continue
        alpha = out_spec.a_axis - 0.5 * math.log(x)
        rows = _interp_rows(a_axis, table, alpha)          # (n_a_out, n_r)
        rows = rows * (wr * root ** -0.5
                       * np.exp(1j * p.s * x * root))[None, :]
        phase = np.exp(1j * np.outer(r, l_out) * x)        # (n_r, n_l)
        block = rows @ phase                               # (n_a_out, n_l)
        for e in eps_ladder:
            sums[e] += (jx * wxi * math.exp(-e * x)) * block
    from .specfun import eps_extrapolate
    vals = eps_extrapolate(lambda e: sums[e], tuple(eps_ladder))
    return GridFunction(out_spec, norm_c(p.hbar, p.s, p.k_prime) * vals)


def v_s_apply(p: ModeParams, f, out_spec: GridSpec,
              m_extent: float = 8.0, n_m: int = 257,
              x_max: float = 700.0, eps_ladder=(0.1, 0.05, 0.025),
              tail_tol: float = 1e-5, n_extent: float = 30.0,
              alpha_points: int = 641) -> GridFunction:
    """Inverse-side spectral intertwiner (unit-normalized).

    (V_s f)(a, l) = (D(s)/2) int_0^inf dx J_nu(beta x) int dr dn
                    (1+hb^2 r^2)^{-1/4} e^{i s x sqrt(1+hb^2 r^2)}
                    e^{i r (n x - l)} f(a + ln(x)/2, n);

    the (r, n) integrals are evaluated after substituting m = -r x, which
    keeps the transform of f sampled on a fixed m grid for every x.
    """
    xs, wx = _x_nodes(p.beta, x_max)
    _check_tail(p, x_max, min(eps_ladder), tail_tol)
    # symmetric log-refined m grid: resolves both the transform of f
    # (scale 1/n_window) and the x-dependent kink of (1+(hb m/x)^2)^{-1/4}
    # at m = 0 (scale x/hb down to the smallest x node)
    pos = np.geomspace(1e-4 * m_extent, m_extent, n_m // 2)
    m = np.concatenate([-pos[::-1], [0.0], pos])
    wm = np.empty_like(m)
    wm[1:-1] = 0.5 * (m[2:] - m[:-2])
    wm[0] = 0.5 * (m[1] - m[0])
    wm[-1] = 0.5 * (m[-1] - m[-2])
    a_lo = out_spec.a_min + 0.5 * math.log(xs[0]) - 0.5
    a_hi = out_spec.a_max + 0.5 * math.log(x_max) + 0.5
    a_axis, table = _ell_transform_table(f, a_lo, a_hi, alpha_points,
                                         n_extent, 1025, m)

    l_out = out_spec.second_axis
    sums = {e: np.zeros((out_spec.n_a, out_spec.n_second), dtype=complex)
            for e in eps_ladder}
    for x, jx, wxi in zip(xs, bessel_j(p.nu, p.beta * xs), wx):
        if jx == 0.0:
            continue
        alpha = out_spec.a_axis + 0.5 * math.log(x)
        rows = _interp_rows(a_axis, table, alpha)          # (n_a_out, n_m)
        root = np.sqrt(1.0 + (p.hbar * m / x) ** 2)
        rows = rows * (wm / x * root ** -0.5
                       * np.exp(1j * p.s * x * root))[None, :]
        phase = np.exp(1j * np.outer(m, l_out) / x)        # (n_m, n_l)
        block = rows @ phase
        for e in eps_ladder:
            sums[e] += (jx * wxi * math.exp(-e * x)) * block
    from .specfun import eps_extrapolate
    vals = eps_extrapolate(lambda e: sums[e], tuple(eps_ladder))
    return GridFunction(out_spec,
                        0.5 * norm_d(p.hbar, p.s, p.k, p.k_prime) * vals)


def taylor_p(X: float, p2: float, s: float, k: float,
             hbar: float) -> complex:
    """First nontrivial order of the U_s symbol expansion.

    1 + hb^2 (-p2 (1 - 2is)/4 + (s/k) X + ((1+is)/(2k)) X^2 + (i/(6k)) X^3).
    """
    return complex(
        1.0 + hbar ** 2 * (-p2 * (1.0 - 2.0j * s) / 4.0 + (s / k) * X
                           + (1.0 + 1.0j * s) / (2.0 * k) * X ** 2
                           + 1.0j / (6.0 * k) * X ** 3))


# ---------------------------------------------------------------------------
# Fourier-like transforms adapted to the exponential coordinates


def fourier_pm(f: GridFunction, sign: str,
               out_spec: GridSpec) -> GridFunction:
    """f~(kappa, p) = (1/2 pi^2) int f(a,l) e^{-i kappa e^{s 2a}} e^{-ipl}
    e^{s 2a} da dl with s = -1 ("minus") or +1 ("plus").

    ``out_spec``'s first axis is kappa, second is p.
    """
    sgn = {"minus": -1.0, "plus": +1.0}[sign]
    a = f.spec.a_axis
    ell = f.spec.second_axis
    wa = _trapezoid_weights(f.spec.n_a, f.spec.da)
    wl = _trapezoid_weights(f.spec.n_second, f.spec.dsecond)
    u = np.exp(sgn * 2.0 * a)
    ka = np.exp(-1j * np.outer(u, out_spec.a_axis)) * (wa * u)[:, None]
    kl = np.exp(-1j * np.outer(ell, out_spec.second_axis)) * wl[:, None]
    vals = ka.T @ f.values @ kl / (2.0 * np.pi ** 2)
    return GridFunction(out_spec, vals)


def fourier_pm_inverse(ft: GridFunction, sign: str,
                       out_spec: GridSpec) -> GridFunction:
    """Inverse of ``fourier_pm``: f(a,l) = int f~ e^{i kappa e^{s 2a}} e^{ipl}
    dkappa dp (no prefactor)."""
    sgn = {"minus": -1.0, "plus": +1.0}[sign]
    wk = _trapezoid_weights(ft.spec.n_a, ft.spec.da)
    wp = _trapezoid_weights(ft.spec.n_second, ft.spec.dsecond)
    u = np.exp(sgn * 2.0 * out_spec.a_axis)
    ka = np.exp(1j * np.outer(ft.spec.a_axis, u)) * wk[:, None]
    kl = np.exp(1j * np.outer(ft.spec.second_axis, out_spec.second_axis)) \
        * wp[:, None]
    vals = ka.T @ ft.values @ kl
    return GridFunction(out_spec, vals)


def zagier_kernel(hbar: float, r):
    """Flat-case kernel data: delta-support location and smooth amplitude.

    Returns (a_support, amplitude) with
    a*(r) = -log((1 + sqrt(1+hb^2 r^2))/2)/2 and amplitude the prefactor
    (sqrt 2 e^{2 a*}/4 pi) ((1+sqrt(1+hb^2 r^2))/sqrt(1+hb^2 r^2))^{1/2};
    the kernel itself is the delta distribution at a*(r) times this
    amplitude and is applied analytically by sifting, never gridded.
    """
    if hbar <= 0:
        raise DomainError("zagier_kernel requires hbar > 0")
    r = np.asarray(r, dtype=float)
    root = np.sqrt(1.0 + hbar ** 2 * r ** 2)
    a_support = -0.5 * np.log(0.5 * (1.0 + root))
    amplitude = (math.sqrt(2.0) / (4.0 * np.pi) * np.exp(2.0 * a_support)
                 * np.sqrt((1.0 + root) / root))
    return a_support, amplitude
