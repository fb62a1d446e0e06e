import numpy as np
import pytest
from numpy.testing import assert_allclose

from diskstar import specfun as sf
from diskstar.errors import DomainError, SingularPointError

from oracles import (bessel_j_series, damped_bessel_integral,
                     fd_second_derivative)


class TestBesselJ:
    def test_trivial_values(self):
        assert sf.bessel_j(0.0, 0.0) == 1.0
        assert sf.bessel_j(2.5, 0.0) == 0.0

    def test_half_order_closed_form(self):
        x = np.pi / 2
        assert_allclose(sf.bessel_j(0.5, x),
                        np.sqrt(2.0 / (np.pi * x)) * np.sin(x), rtol=1e-14)
        # equals 2/pi at this argument
        assert_allclose(sf.bessel_j(0.5, x), 2.0 / np.pi, rtol=1e-12)

    @pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 5.0, 20.0])
    def test_against_series_oracle(self, nu):
        for x in np.linspace(0.25, 20.0, 12):
            want = bessel_j_series(nu, x)
            got = sf.bessel_j(nu, x)
            assert abs(got - want) <= 1e-10 * max(1.0, abs(want)), (nu, x)

    def test_large_order_against_series(self):
        got = sf.bessel_j(50.0, 18.0)
        want = bessel_j_series(50.0, 18.0, terms=60, dps=80)
        assert_allclose(got, want, rtol=1e-10)

    def test_recurrence(self, rng):
        nu = rng.uniform(1.0, 30.0, size=200)
        x = rng.uniform(0.5, 50.0, size=200)
        lhs = sf.bessel_j(nu - 1, x) + sf.bessel_j(nu + 1, x)
        rhs = 2.0 * nu / x * sf.bessel_j(nu, x)
        scale = np.maximum(np.abs(rhs), 1e-3)
        assert np.all(np.abs(lhs - rhs) / scale < 1e-9)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            sf.bessel_j(-1.0, 2.0)
        with pytest.raises(DomainError):
            sf.bessel_j(1.0, -2.0)


class TestBesselY:
    def test_half_order_closed_form(self):
        x = np.pi / 2
        # -sqrt(2/(pi x)) cos(x) = 0 at x = pi/2
        assert abs(sf.bessel_y(0.5, x)) < 1e-15

    def test_wronskian(self):
        nu, x = 0.7, 3.1
        h = 1e-6
        jp = (sf.bessel_j(nu, x + h) - sf.bessel_j(nu, x - h)) / (2 * h)
        yp = (sf.bessel_y(nu, x + h) - sf.bessel_y(nu, x - h)) / (2 * h)
        w = sf.bessel_j(nu, x) * yp - jp * sf.bessel_y(nu, x)
        assert_allclose(w, 2.0 / (np.pi * x), rtol=1e-9)

    def test_log_divergence(self):
        assert sf.bessel_y(0.0, 1e-3) < sf.bessel_y(0.0, 1e-2) < 0
        assert sf.bessel_y(0.0, 1e-6) < sf.bessel_y(0.0, 1e-3)

    def test_domain(self):
        with pytest.raises(DomainError):
            sf.bessel_y(0.5, 0.0)
        with pytest.raises(DomainError):
            sf.bessel_y(0.5, -1.0)


LADDER5 = (0.1, 0.05, 0.025, 0.0125, 0.00625)


class TestDampedBesselIntegral:
    @pytest.mark.parametrize("nu", [0.5, 1.0, 5.0])
    def test_unit_integral(self, nu):
        # int_0^inf J_nu = 1, damped and extrapolated to zero damping
        val = sf.eps_extrapolate(lambda e: damped_bessel_integral(nu, e),
                                 LADDER5)
        assert abs(val - 1.0) < 1e-5


class TestLaplaceF:
    def test_zero_argument(self):
        for mu in (0.0, 3.0, 10.0):
            assert_allclose(sf.laplace_f(mu, 0.0), 1.0, rtol=1e-14)

    def test_inside_modulus_is_geometric(self):
        w, mu = 0.5, 10.0
        assert_allclose(abs(sf.laplace_f(mu, w)), (1 - w * w) ** -0.5,
                        rtol=1e-14)

    def test_inside_phase_is_triangle_phase(self):
        from diskstar.geometry import f_w
        w = np.linspace(-0.9, 0.9, 19)
        mu = 7.0
        assert_allclose(np.angle(sf.laplace_f(mu, w)),
                        np.unwrap(0.5 * mu * f_w(w)) - 2 * np.pi * np.round(
                            (0.5 * mu * f_w(w)) / (2 * np.pi)),
                        atol=1e-12)

    def test_against_damped_quadrature_inside(self):
        mu, w = 3.0, 0.4
        val = sf.eps_extrapolate(
            lambda e: damped_bessel_integral(mu, e, phase=w), LADDER5)
        assert abs(val - sf.laplace_f(mu, w)) < 1e-6

    def test_against_damped_quadrature_outside(self):
        # pins the |w|^(-mu) modulus of the outer branch
        mu, w = 3.0, 2.0
        val = sf.eps_extrapolate(
            lambda e: damped_bessel_integral(mu, e, phase=w), LADDER5)
        assert abs(val - sf.laplace_f(mu, w)) < 1e-5

    def test_outside_mu_zero_closed_form(self):
        # int_0^inf J_0(t) e^{iwt} dt = i sign(w)/sqrt(w^2-1) for |w| > 1
        for w in (2.0, -1.5, 3.7):
            want = 1j * np.sign(w) / np.sqrt(w * w - 1.0)
            assert_allclose(sf.laplace_f(0.0, w), want, rtol=1e-13)

    def test_outside_phase_constant_in_varpi(self):
        mu = 4.3
        w = np.linspace(1.1, 6.0, 40)
        ang = np.angle(sf.laplace_f(mu, w))
        assert_allclose(ang, np.angle(np.exp(0.5j * np.pi * (mu + 1))),
                        atol=1e-12)

    def test_singular_point(self):
        with pytest.raises(SingularPointError):
            sf.laplace_f(2.0, 1.0)


class TestKernel:
    def test_center_value(self):
        for mu in (2.0, 10.0):
            assert_allclose(sf.kernel_k(mu, 0.0), mu * mu - 1.0, rtol=1e-14)

    def test_matches_fd_second_derivative_inside(self):
        mu, w = 10.0, 0.3
        fd = -fd_second_derivative(lambda t: sf.laplace_f(mu, t), w)
        assert abs(fd - sf.kernel_k(mu, w)) < 1e-5

    def test_matches_fd_second_derivative_outside(self):
        mu, w = 6.0, 1.7
        fd = -fd_second_derivative(lambda t: sf.laplace_f(mu, t), w)
        assert abs(fd - sf.kernel_k(mu, w)) < 1e-6

    def test_against_defining_oscillatory_integral(self):
        # K(w) = hb^3-scaled damped quadrature of the kernel integral
        from oracles import damped_kernel_integral
        hbar, w = 0.1, 0.4
        mu = 1.0 / hbar
        val = sf.eps_extrapolate(
            lambda e: damped_kernel_integral(hbar, w, e), LADDER5)
        assert abs(val / hbar ** 3 - sf.kernel_k(mu, w)) < 1e-4

    def test_phase_coherence(self):
        mu = 10.0
        for w in (0.5, -0.2, 0.7):
            want = sf.kernel_phase(mu, w)
            got = np.angle(sf.kernel_k(mu, w))
            diff = (got - want + np.pi) % (2 * np.pi) - np.pi
            assert abs(diff) < 1e-8

    def test_phase_trivial(self):
        assert sf.kernel_phase(5.0, 0.0) == pytest.approx(0.0, abs=1e-14)

    def test_weinstein_limit(self):
        # S_mu / f_w -> mu/2, i.e. the action-scale ratio -> 1/2
        from diskstar.geometry import f_w
        w = 0.3
        ratios = [sf.kernel_phase(mu, w) / (mu * f_w(w))
                  for mu in (10.0, 100.0, 1000.0)]
        assert abs(ratios[-1] - 0.5) < 0.01 * 0.5
        assert abs(ratios[0] - 0.5) > abs(ratios[1] - 0.5) > \
            abs(ratios[2] - 0.5)

    def test_phase_domain(self):
        with pytest.raises(DomainError):
            sf.kernel_phase(5.0, 1.0)


class TestKernelTable:
    def test_build_and_columns(self):
        t = sf.KernelTable.build(10.0, np.linspace(-0.9, 0.9, 181))
        assert t.n_excluded == 0
        assert np.all(~np.isnan(t.phase))
        rows = list(t.rows())
        assert len(rows) == 181
        assert rows[0][5] == 10.0

    def test_guard_band_exclusion(self):
        t = sf.KernelTable.build(5.0, np.linspace(0.9, 1.1, 201),
                                 guard_delta=1e-2)
        assert t.n_excluded > 0
        assert np.all(np.abs(t.varpi ** 2 - 1.0) >= 1e-2)

    def test_single_center_row(self):
        t = sf.KernelTable.build(5.0, [0.0])
        assert len(t.varpi) == 1
        assert np.isfinite(t.k_values[0])
        assert t.phase[0] == pytest.approx(0.0)

    def test_phase_nan_outside(self):
        t = sf.KernelTable.build(5.0, [0.5, 2.0])
        assert not np.isnan(t.phase[0])
        assert np.isnan(t.phase[1])


def test_eps_extrapolate_polynomial_exact():
    assert sf.eps_extrapolate(lambda e: 2.0 + 3 * e - e * e) == \
        pytest.approx(2.0, abs=1e-12)
