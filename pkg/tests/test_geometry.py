import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from diskstar import geometry as geo
from diskstar.errors import DomainError
from diskstar.geometry import GeodesicState, Point, SurfaceKind

from oracles import fd_jacobian_det, random_points

BOTH = [SurfaceKind.POINCARE_ORBIT, SurfaceKind.HYPERBOLIC_PLANE]
M = SurfaceKind.POINCARE_ORBIT
D = SurfaceKind.HYPERBOLIC_PLANE


class TestGroup:
    def test_identity(self):
        assert_allclose(geo.group_mul([0, 0], [1.2, -0.7]), [1.2, -0.7])
        assert_allclose(geo.group_mul([1.2, -0.7], [0, 0]), [1.2, -0.7])

    def test_right_unit_formula(self):
        # (1,1).(0,0) = (1, e^0 * 1) per the group law
        assert_allclose(geo.group_mul([1, 1], [0, 0]), [1, 1])

    def test_inverse(self):
        assert_allclose(geo.group_inv([0, 0]), [0, 0])
        assert_allclose(geo.group_inv([1, 0]), [-1, 0])
        x = np.array([0.3, -2.0])
        assert_allclose(geo.group_inv(geo.group_inv(x)), x, atol=1e-14)
        assert_allclose(geo.group_mul(x, geo.group_inv(x)), [0, 0],
                        atol=1e-14)

    def test_associativity_randomized(self, rng):
        x, y, z = (random_points(rng, 1000) for _ in range(3))
        lhs = geo.group_mul(geo.group_mul(x, y), z)
        rhs = geo.group_mul(x, geo.group_mul(y, z))
        assert_allclose(lhs, rhs, atol=1e-12)

    @given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3),
           st.floats(-3, 3))
    @settings(max_examples=50, deadline=None)
    def test_inverse_property(self, a, l, ap, lp):
        x = np.array([a, l])
        y = np.array([ap, lp])
        prod = geo.group_mul(geo.group_mul(x, y), geo.group_inv(y))
        assert np.allclose(prod, x, atol=1e-10)


class TestInvolutions:
    def test_psi_values(self):
        assert_allclose(geo.psi(M, [2, 3]), [-2, -3])
        assert_allclose(geo.psi(D, [0, 0]), [0, 0])
        assert_allclose(geo.psi(D, [0, 1]), [-0.5 * np.log(2), -1])

    @pytest.mark.parametrize("kind", BOTH)
    def test_involutive(self, kind, rng):
        x = random_points(rng, 300)
        assert_allclose(geo.psi(kind, geo.psi(kind, x)), x, atol=1e-12)


class TestSymmetry:
    def test_center_fixed(self, rng):
        c = random_points(rng, 50)
        for kind in BOTH:
            assert_allclose(geo.symmetry(kind, c, c), c, atol=1e-12)

    def test_closed_form_value(self):
        assert_allclose(geo.symmetry(M, [1, 0], [0, 0]), [2, 0])

    def test_closed_form_matches_composition(self, rng):
        c, x = random_points(rng, 1000), random_points(rng, 1000)
        assert_allclose(geo.symmetry(M, c, x), geo.symmetry_m_closed(c, x),
                        atol=1e-12)

    @pytest.mark.parametrize("kind", BOTH)
    def test_involutivity(self, kind, rng):
        c, x = random_points(rng, 1000), random_points(rng, 1000)
        assert_allclose(geo.symmetry(kind, c, geo.symmetry(kind, c, x)), x,
                        atol=1e-12)

    @pytest.mark.parametrize("kind", BOTH)
    def test_symmetric_space_law(self, kind, rng):
        # s_x s_y s_x = s_{s_x y}
        x, y, z = (random_points(rng, 1000) for _ in range(3))
        lhs = geo.symmetry(kind, x,
                           geo.symmetry(kind, y, geo.symmetry(kind, x, z)))
        rhs = geo.symmetry(kind, geo.symmetry(kind, x, y), z)
        assert_allclose(lhs, rhs, atol=1e-10)


class TestMidpoint:
    def test_diagonal(self):
        assert_allclose(geo.midpoint([1, 2], [1, 2]), [1, 2])

    def test_values(self):
        assert_allclose(geo.midpoint([1, 0], [-1, 0]), [0, 0])
        assert_allclose(geo.midpoint([1, 2], [-1, 2]),
                        [0, 2.0 / np.cosh(2.0)])

    def test_defining_relation(self, rng):
        x, y = random_points(rng, 1000), random_points(rng, 1000)
        m = geo.midpoint(x, y)
        assert_allclose(geo.symmetry(M, m, x), y, atol=1e-12)


class TestDoubleTriangle:
    def test_diagonal(self):
        x = np.array([0.4, -1.1])
        for t in geo.double_triangle(x, x, x):
            assert_allclose(t, x, atol=1e-14)

    def test_roundtrip(self, rng):
        y0, y1, y2 = (random_points(rng, 1000) for _ in range(3))
        t0, t1, t2 = geo.double_triangle(
            *geo.double_triangle_inverse(y0, y1, y2))
        assert_allclose(t0, y0, atol=1e-12)
        assert_allclose(t1, y1, atol=1e-12)
        assert_allclose(t2, y2, atol=1e-12)

    def test_other_roundtrip(self, rng):
        x, y, z = (random_points(rng, 1000) for _ in range(3))
        w = geo.double_triangle_inverse(*geo.double_triangle(x, y, z))
        for got, want in zip(w, (x, y, z)):
            assert_allclose(got, want, atol=1e-10)

    def test_fixed_point_equation(self, rng):
        # t solves s_{x2} s_{x1} s_{x0} t = t
        x0, x1, x2 = (random_points(rng, 500) for _ in range(3))
        t, _, _ = geo.double_triangle(x0, x1, x2)
        fp = geo.symmetry(M, x2, geo.symmetry(M, x1, geo.symmetry(M, x0, t)))
        assert_allclose(fp, t, atol=1e-9)

    def test_equal_a_case_against_linear_solve(self):
        # with all a = 0 the fixed-point system is affine in ell alone
        pts = [np.array([0.0, 0.0]), np.array([0.0, 1.0]),
               np.array([0.0, 2.0])]
        t, _, _ = geo.double_triangle(*pts)
        # s_{(0,b)}(0,lam) = (0, 2b - lam); solve 2b2 - (2b1 - (2b0 - lam)) = lam
        lam = 0.5 * (2 * 2.0 - 2 * 1.0 + 2 * 0.0)
        assert_allclose(t, [0.0, lam], atol=1e-14)


class TestJacobian:
    def test_equal_a(self):
        pts = [[0, 1], [0, -2], [0, 5]]
        assert_allclose(geo.jac_phi(*pts), 16.0)

    def test_formula_value(self):
        pts = [[0, 0.3], [0.5, -1], [0, 2]]
        assert_allclose(geo.jac_phi(*pts), 16.0 * np.cosh(1.0) ** 2)

    def test_inverse_consistency(self, rng):
        x, y, z = (random_points(rng, 1000) for _ in range(3))
        jp = geo.jac_phi(x, y, z)
        ji = geo.jac_phi_inverse(*geo.double_triangle(x, y, z))
        assert np.all(jp > 0)
        assert_allclose(jp * ji, 1.0, atol=1e-10)

    def test_against_fd_jacobian(self):
        def phi_flat(v):
            parts = geo.double_triangle(v[0:2], v[2:4], v[4:6])
            return np.concatenate([np.asarray(p) for p in parts])

        v0 = np.array([0.3, -0.2, 0.1, 0.5, -0.4, 0.2])
        det = fd_jacobian_det(phi_flat, v0)
        assert_allclose(det, geo.jac_phi(v0[0:2], v0[2:4], v0[4:6]),
                        rtol=1e-6)


class TestCanonicalPhase:
    def test_degenerate_triple(self, rng):
        x, y = random_points(rng, 100), random_points(rng, 100)
        for kind in BOTH:
            assert_allclose(geo.s_can(kind, x, x, y), 0.0, atol=1e-12)

    def test_m_value(self):
        pts = [[0, 0], [1, 0], [0, 1]]
        assert_allclose(geo.s_can(M, *pts), -np.sinh(2.0))

    def test_d_origin_formula(self):
        # base point at the origin reduces to the two-point closed form
        y, z = np.array([0.5, -0.3]), np.array([-0.2, 0.8])
        want = (z[1] * np.sinh(2 * y[0]) - y[1] * np.sinh(2 * z[0])
                + 0.5 * y[1] * z[1] * (y[1] * np.exp(2 * y[0])
                                       - z[1] * np.exp(2 * z[0])))
        assert_allclose(geo.s_can(D, [0, 0], y, z), want, rtol=1e-14)

    @pytest.mark.parametrize("kind", BOTH)
    def test_total_skew_symmetry(self, kind, rng):
        x, y, z = (random_points(rng, 1000) for _ in range(3))
        s = geo.s_can(kind, x, y, z)
        assert_allclose(geo.s_can(kind, y, x, z), -s, atol=1e-12 * _sc(s))
        assert_allclose(geo.s_can(kind, x, z, y), -s, atol=1e-12 * _sc(s))
        assert_allclose(geo.s_can(kind, z, y, x), -s, atol=1e-12 * _sc(s))
        assert_allclose(geo.s_can(kind, y, z, x), s, atol=1e-12 * _sc(s))
        assert_allclose(geo.s_can(kind, z, x, y), s, atol=1e-12 * _sc(s))

    @pytest.mark.parametrize("kind", BOTH)
    def test_admissibility(self, kind, rng):
        x, y, z = (random_points(rng, 1000) for _ in range(3))
        s = geo.s_can(kind, x, y, z)
        flipped = geo.s_can(kind, x, geo.symmetry(kind, x, y), z)
        assert_allclose(flipped, -s, atol=1e-10 * _sc(s))

    @pytest.mark.parametrize("kind", BOTH)
    def test_diagonal_invariance(self, kind, rng):
        x, y, z = (random_points(rng, 1000) for _ in range(3))
        g = rng.uniform(-1.5, 1.5, size=2)
        s = geo.s_can(kind, x, y, z)
        sg = geo.s_can(kind, geo.group_mul(g, x), geo.group_mul(g, y),
                       geo.group_mul(g, z))
        assert_allclose(sg, s, atol=1e-10 * _sc(s))


def _sc(values):
    return max(1.0, float(np.max(np.abs(values))))


class TestWeinsteinPhase:
    def test_values(self):
        assert geo.f_w(0.0) == pytest.approx(0.0)
        assert geo.f_w(1.0) == pytest.approx(np.pi)
        assert geo.f_w(-1.0) == pytest.approx(-np.pi)
        assert geo.f_w(0.5) == pytest.approx(np.pi / 3)

    def test_odd_and_increasing(self):
        t = np.linspace(-0.999, 0.999, 801)
        v = geo.f_w(t)
        assert_allclose(v, -geo.f_w(-t), atol=1e-14)
        assert np.all(np.diff(v) > 0)

    def test_domain_error(self):
        with pytest.raises(DomainError):
            geo.s_w_from_can(1.2)


class TestGeodesic:
    def test_base_point(self):
        st8 = GeodesicState(Point(0.3, -1.0), 0.7, -1.3)
        assert_allclose(geo.geodesic(st8, 0.0), [0.3, -1.0])

    def test_zero_p0_limit(self):
        st8 = GeodesicState(Point(0.5, 1.0), 0.0, 1.0)
        assert_allclose(geo.geodesic(st8, 2.0), [0.5, 3.0])

    def test_ode_residual(self):
        # a'' = 0 and l'' - 4 l a'^2 = 0 along the curve,
        # 4th-order five-point stencils so roundoff stays below 1e-8
        st8 = GeodesicState(Point(0.1, -0.4), 0.7, -1.3)
        h = 1e-3
        w2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12.0 * h ** 2)
        w1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / (12.0 * h)
        for s in np.linspace(-1.0, 1.0, 21):
            pts = np.stack([geo.geodesic(st8, s + j * h)
                            for j in (-2, -1, 0, 1, 2)])
            acc = w2 @ pts
            vel = w1 @ pts
            assert abs(acc[0]) < 1e-8
            assert abs(acc[1] - 4.0 * pts[2][1] * vel[0] ** 2) < 1e-8

    def test_connection_coefficient(self):
        assert geo.connection_coeffs(0.0) == (0.0,)
        assert geo.connection_coeffs(3.0) == (-3.0,)

    def test_connection_reproduces_geodesic(self):
        # integrate v'' = v (alpha')^2, alpha'' = 0 in (alpha, v) = (2a, l)
        from scipy.integrate import solve_ivp
        st8 = GeodesicState(Point(0.1, -0.4), 0.7, -1.3)
        # alpha = 2a => alpha' = 2 p0; v = l => v' = q0
        y0 = [2 * st8.base.a, st8.base.l, 2 * st8.p0, st8.q0]

        def rhs(_, y):
            return [y[2], y[3], 0.0, y[1] * y[2] ** 2]

        sol = solve_ivp(rhs, (0.0, 1.5), y0, rtol=1e-10, atol=1e-12,
                        dense_output=True)
        for s in np.linspace(0.0, 1.5, 7):
            alpha, v = sol.sol(s)[0], sol.sol(s)[1]
            assert_allclose(geo.geodesic(st8, s), [alpha / 2.0, v],
                            atol=1e-8)


def test_point_validation():
    with pytest.raises(ValueError):
        Point(np.inf, 0.0)
