"""Independent reference computations used by the tests.

Everything here is deliberately implemented through a different route
than the production code: extended-precision series, brute-force damped
quadrature, or plain finite differences, so agreement is meaningful.
"""

import mpmath
import numpy as np
from scipy import integrate, special


def random_points(rng, n, scale=1.0):
    """Random (n, 2) point batch with moderate coordinates."""
    return rng.uniform(-scale, scale, size=(n, 2))


def bessel_j_series(nu: float, x: float, terms: int = 40,
                    dps: int = 50) -> float:
    """Ascending series for J_nu(x) accumulated in extended precision."""
    with mpmath.workdps(dps):
        nu_m = mpmath.mpf(nu)
        x_m = mpmath.mpf(x)
        half = x_m / 2
        total = mpmath.mpf(0)
        for m in range(terms):
            term = ((-1) ** m * half ** (2 * m + nu_m)
                    / (mpmath.factorial(m) * mpmath.gamma(m + nu_m + 1)))
            total += term
        return float(total)


def damped_bessel_integral(nu: float, eps: float, phase: float = 0.0,
                           t_max: float | None = None) -> complex:
    """int_0^inf e^{(i phase - eps) t} J_nu(t) dt by brute-force Simpson.

    The [0, 1] segment is computed with t = tau^2 so the t^nu endpoint
    behavior stays smooth for non-integer orders."""
    if t_max is None:
        t_max = 40.0 / eps
    tau = np.linspace(0.0, 1.0, 2001)
    head = special.jv(nu, tau * tau) \
        * np.exp((1j * phase - eps) * tau * tau) * 2.0 * tau
    total = complex(integrate.simpson(head, x=tau))
    n = int((t_max - 1.0) / 0.05) + 1
    n += (n + 1) % 2
    t = np.linspace(1.0, t_max, n)
    vals = special.jv(nu, t) * np.exp((1j * phase - eps) * t)
    return total + complex(integrate.simpson(vals, x=t))


def damped_kernel_integral(hbar: float, varpi: float, eps: float) -> complex:
    """Damped quadrature of int_0^inf s^2 J_{1/hb}(s/hb) e^{(i/hb) s w - eps s} ds
    after substituting s = hb t."""
    nu = 1.0 / hbar
    t_max = 40.0 / (eps * hbar)
    n = int(t_max / 0.02) + 1
    n += (n + 1) % 2
    t = np.linspace(0.0, t_max, n)
    vals = (hbar * t) ** 2 * special.jv(nu, t) \
        * np.exp((1j * varpi - eps * hbar) * t) * hbar
    return complex(integrate.simpson(vals, x=t))


def fd_second_derivative(f, x: float, h: float = 1e-4) -> complex:
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / h ** 2


def fd_jacobian_det(fn, v0: np.ndarray, h: float = 1e-5) -> float:
    """Determinant of the finite-difference Jacobian of fn: R^n -> R^n."""
    n = len(v0)
    J = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        J[:, j] = (fn(v0 + e) - fn(v0 - e)) / (2.0 * h)
    return float(np.linalg.det(J))
