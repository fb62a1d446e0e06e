"""Special functions backing the invariant kernel product: Bessel J/Y of
real order, the closed-form one-sided Fourier-Laplace transform of J_mu,
the kernel K_mu obtained from its second derivative, and the kernel phase.

Bessel evaluation is delegated to scipy.special (jv/yv), wrapped so that
domain violations and overflow raise instead of propagating NaNs; the
extended-precision series oracle used to certify accuracy lives with the
tests.

Branch conventions
------------------
``laplace_f`` evaluates F_mu(-i w) = int_0^inf e^{i w t} J_mu(t) dt as the
boundary value from Re p > 0 of the closed form

    F_mu(p) = [1 + (1 + 1/p^2)^{1/2}]^{-mu} / (p^{mu+1} (1 + 1/p^2)^{1/2}),

which resolves to two real-axis branches:

    w^2 < 1 : (1 - w^2)^{-1/2} exp(i (mu/2) f_w(w))
    w^2 > 1 : |w|^{-mu} (w^2-1)^{-1/2} [1 + (1 - w^{-2})^{1/2}]^{-mu}
              exp(i (pi/2)(mu+1) sign w)

(The |w|^{-mu} power is forced by the p-form and by direct damped
quadrature; see the regression test against the mu = 0 closed form.)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import DomainError, SingularPointError
from .geometry import f_w

__all__ = [
    "bessel_j",
    "bessel_y",
    "laplace_f",
    "kernel_k",
    "kernel_phase",
    "KernelTable",
    "eps_extrapolate",
]

#: Default damping values for extrapolating conditionally convergent
#: oscillatory integrals to zero damping.
DEFAULT_EPS_LADDER = (0.1, 0.05, 0.025)


def bessel_j(nu, x):
    """Bessel function of the first kind, real order nu >= 0, x >= 0."""
    nu = np.asarray(nu, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.any(nu < 0) or not np.all(np.isfinite(nu)):
        raise DomainError("bessel_j requires finite order nu >= 0")
    if np.any(x < 0):
        raise DomainError("bessel_j requires x >= 0")
    out = special.jv(nu, x)
    if not np.all(np.isfinite(out)):
        raise OverflowError("bessel_j overflow/invalid for given (nu, x)")
    return out[()] if out.ndim == 0 else out


def bessel_y(nu, x):
    """Bessel function of the second kind, real order nu >= 0, x > 0."""
    nu = np.asarray(nu, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.any(nu < 0) or not np.all(np.isfinite(nu)):
        raise DomainError("bessel_y requires finite order nu >= 0")
    if np.any(x <= 0):
        raise DomainError("bessel_y requires x > 0")
    out = special.yv(nu, x)
    if not np.all(np.isfinite(out)):
        raise OverflowError("bessel_y overflow for given (nu, x)")
    return out[()] if out.ndim == 0 else out


def _split_branches(varpi):
    w = np.asarray(varpi, dtype=float)
    if np.any(w * w == 1.0):
        raise SingularPointError("transform singular at varpi^2 = 1")
    return w, w * w < 1.0


def laplace_f(mu: float, varpi):
    """Closed form of int_0^inf e^{i varpi t} J_mu(t) dt (vectorized)."""
    w, inside = _split_branches(varpi)
    out = np.empty(np.shape(w), dtype=complex)

    wi = np.where(inside, w, 0.0)
    out_in = (1.0 - wi * wi) ** -0.5 * np.exp(0.5j * mu * f_w(wi))

    wo = np.where(inside, 2.0, w)
    aw = np.abs(wo)
    mod = (aw ** -mu * (wo * wo - 1.0) ** -0.5
           * (1.0 + np.sqrt(1.0 - wo ** -2.0)) ** -mu)
    out_out = mod * np.exp(0.5j * np.pi * (mu + 1.0) * np.sign(wo))

    out = np.where(inside, out_in, out_out)
    return out[()] if out.ndim == 0 else out


def kernel_k(mu: float, varpi):
    """Invariant-product kernel K_mu = -d^2/dw^2 laplace_f(mu, w).

    The second derivative is differentiated by hand on each branch:
    writing laplace_f = e^{g}, K = -(g'' + g'^2) e^{g}, with

      w^2 < 1:  g''+g'^2 = (1+2w^2)/(1-w^2)^2 - mu^2/(1-w^2)
                            + 3 i mu w /(1-w^2)^{3/2}
      w^2 > 1:  g''+g'^2 = mu^2/(w^2-1) + 3 mu |w|/(w^2-1)^{3/2}
                            + (1+2w^2)/(w^2-1)^2   (times the constant phase)
    """
    w, inside = _split_branches(varpi)
    base = laplace_f(mu, w)

    wi = np.where(inside, w, 0.0)
    d = 1.0 - wi * wi
    curv_in = ((1.0 + 2.0 * wi * wi) / d ** 2 - mu * mu / d
               + 3.0j * mu * wi / d ** 1.5)

    wo = np.where(inside, 2.0, w)
    e = wo * wo - 1.0
    curv_out = (mu * mu / e + 3.0 * mu * np.abs(wo) / e ** 1.5
                + (1.0 + 2.0 * wo * wo) / e ** 2)

    out = -np.where(inside, curv_in, curv_out) * base
    return out[()] if out.ndim == 0 else out


def kernel_phase(mu: float, varpi):
    """WKB phase S_mu of the kernel on the Weinstein region varpi^2 < 1.

    S_mu(w) = mu f_w(w)/2
              - arctan[3 mu sin f_w / (mu^2 - 4 + (mu^2 + 2) cos f_w)].

    Equals arg(kernel_k) mod 2*pi wherever the arctan denominator is
    positive (all of (-1, 1) except a thin band near |w| = 1 for small mu).
    """
    w = np.asarray(varpi, dtype=float)
    if np.any(np.abs(w) >= 1.0):
        raise DomainError("kernel_phase requires varpi^2 < 1")
    phi = f_w(w)
    out = 0.5 * mu * phi - np.arctan2(
        3.0 * mu * np.sin(phi),
        mu * mu - 4.0 + (mu * mu + 2.0) * np.cos(phi))
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class KernelTable:
    """Tabulated kernel values and phase over a varpi range.

    ``phase`` carries NaN exactly where varpi^2 >= 1; rows falling in the
    guard band |varpi^2 - 1| < guard_delta are excluded at build time and
    counted in ``n_excluded``.
    """

    varpi: np.ndarray
    k_values: np.ndarray
    phase: np.ndarray
    mu: float
    n_excluded: int = 0

    @classmethod
    def build(cls, mu: float, varpi, guard_delta: float = 1e-3) -> "KernelTable":
        w = np.atleast_1d(np.asarray(varpi, dtype=float))
        keep = np.abs(w * w - 1.0) >= guard_delta
        w_ok = w[keep]
        k = np.atleast_1d(kernel_k(mu, w_ok))
        phase = np.full(w_ok.shape, np.nan)
        inside = np.abs(w_ok) < 1.0
        if np.any(inside):
            phase[inside] = kernel_phase(mu, w_ok[inside])
        return cls(varpi=w_ok, k_values=k, phase=phase, mu=mu,
                   n_excluded=int(np.sum(~keep)))

    def rows(self):
        """Yield CSV rows (varpi, re_K, im_K, abs_K, phase-or-None, mu)."""
        for w, k, p in zip(self.varpi, self.k_values, self.phase):
            yield (w, k.real, k.imag, abs(k), None if np.isnan(p) else p,
                   self.mu)


def radial_nodes(freq: float, x_max: float, x_min: float = 1e-4,
                 x_switch: float = 0.5, per_period: int = 10):
    """Quadrature nodes/weights on (0, x_max] for radial oscillatory
    integrands: log-spaced trapezoid below ``x_switch`` (resolving
    logarithmic argument dependence), composite Simpson above (resolving
    oscillation at ``freq`` with fourth-order accuracy)."""
    wavelength = 2.0 * np.pi / max(freq, 1.0)
    h = min(wavelength / per_period, 0.05)
    n_lin = int((x_max - x_switch) / h) + 1
    n_lin += (n_lin + 1) % 2  # Simpson needs an odd node count
    lin = np.linspace(x_switch, x_max, n_lin)
    hl = lin[1] - lin[0]
    w_lin = np.full(n_lin, 2.0 * hl / 3.0)
    w_lin[1::2] = 4.0 * hl / 3.0
    w_lin[0] = w_lin[-1] = hl / 3.0

    n_log = int(np.log(x_switch / x_min) / 0.01) + 2
    logn = np.geomspace(x_min, x_switch, n_log)
    w_log = np.empty(n_log)
    w_log[1:-1] = 0.5 * (logn[2:] - logn[:-2])
    w_log[0] = 0.5 * (logn[1] - logn[0]) + logn[0]
    w_log[-1] = 0.5 * (logn[-1] - logn[-2])

    x = np.concatenate([logn, lin])
    w = np.concatenate([w_log, w_lin])
    return x, w


def eps_extrapolate(evaluate, eps_values=DEFAULT_EPS_LADDER):
    """Extrapolate a damped-integral evaluator to zero damping.

    ``evaluate(eps)`` must be analytic in eps near 0; the values on the
    ladder are polynomial-extrapolated to eps = 0.
    """
    eps = np.asarray(eps_values, dtype=float)
    vals = np.asarray([evaluate(e) for e in eps])
    # Neville's scheme toward eps = 0; works for complex values.
    table = vals.astype(complex)
    for level in range(1, len(eps)):
        table = np.array([
            (eps[i] * table[i + 1] - eps[i + level] * table[i])
            / (eps[i] - eps[i + level])
            for i in range(len(table) - 1)])
    return table[0]
