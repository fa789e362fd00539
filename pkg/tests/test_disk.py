import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pathfield.disk import (disk_dv_gradient, disk_dv_integral, disk_green,
                            disk_neumann, disk_poisson, hyperbolic_distance,
                            hyperbolic_geodesic, mobius_to_origin,
                            radial_profile)
from pathfield.divergence import builtin_f

TWO_PI = 2.0 * math.pi

interior_points = st.complex_numbers(max_magnitude=0.85, allow_nan=False,
                                     allow_infinity=False)
angles = st.floats(0.0, TWO_PI, allow_nan=False)


def test_green_at_origin_half():
    assert abs(disk_green(0.0, 0.5) - math.log(2.0) / TWO_PI) < 1e-12


def test_poisson_uniform_at_center():
    for theta in (0.0, 0.7, 2.0, 4.5):
        s = cmath.exp(1j * theta)
        assert abs(disk_poisson(s, 0.0) - 1.0 / TWO_PI) < 1e-14


@settings(max_examples=50, deadline=None)
@given(interior_points, interior_points)
def test_green_symmetry(w, z):
    if abs(w - z) < 1e-6:
        return
    assert abs(disk_green(w, z) - disk_green(z, w)) < 1e-12


def test_neumann_matches_green_at_origin():
    # |1 - conj(z) w| = 1 when w = 0, so the two kernels coincide there.
    for z in (0.3, 0.5 + 0.2j, -0.1 + 0.6j):
        assert abs(disk_neumann(0.0, z) - disk_green(0.0, z)) < 1e-14


def test_domain_validation():
    with pytest.raises(ValueError):
        disk_green(0.0, 1.2)
    with pytest.raises(ValueError):
        disk_green(0.3, 0.3)
    with pytest.raises(ValueError):
        disk_poisson(0.5, 0.0)  # |s| != 1


class TestHyperbolic:
    def test_zero_at_coincident(self):
        assert hyperbolic_distance(0.3 + 0.1j, 0.3 + 0.1j) == 0.0

    def test_closed_form_from_origin(self):
        for r in (0.1, 0.5, 0.9):
            expected = math.log((1 + r) / (1 - r))
            assert abs(hyperbolic_distance(0.0, r) - expected) < 1e-12

    @settings(max_examples=40, deadline=None)
    @given(interior_points, interior_points, interior_points)
    def test_mobius_invariance(self, p, w, z):
        C = mobius_to_origin(p)
        d1 = hyperbolic_distance(w, z)
        d2 = hyperbolic_distance(C(w), C(z))
        assert abs(d1 - d2) < 1e-12

    def test_triangle_inequality(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            a, b, c = (complex(*rng.uniform(-0.6, 0.6, 2)) for _ in range(3))
            assert hyperbolic_distance(a, c) <= (
                hyperbolic_distance(a, b) + hyperbolic_distance(b, c) + 1e-12)


class TestRadialProfiles:
    def test_kl_value(self):
        prof = radial_profile("KL")
        assert abs(prof.g(0.6) - 0.4462871026284195) < 1e-12

    def test_tv_approaches_two(self):
        prof = radial_profile("TV")
        assert abs(prof.g(1.0 - 1e-9) - 2.0) < 1e-3

    def test_generic_f_matches_kl_closed_form(self):
        prof = radial_profile("generic-f", f=lambda x: -np.log(x))
        kl = radial_profile("KL")
        for x in np.arange(0.1, 0.95, 0.1):
            assert abs(prof.g(x) - kl.g(x)) < 1e-8

    def test_chi2_row_cross_validated(self):
        # The tabulated chi2 profile carries g(0) = 1; the quadrature of its
        # generator reproduces it up to that offset.
        prof = radial_profile("chi2")
        quad = radial_profile("generic-f", f=lambda x: x * x - 1.0)
        for x in (0.2, 0.5, 0.8):
            assert abs(quad.g(x) - (prof.g(x) - 1.0)) < 1e-8

    def test_gradient_factors_positive(self):
        for kind in ("D", "HB", "KL", "TV", "chi2"):
            prof = radial_profile(kind)
            for x in np.linspace(0.05, 0.95, 19):
                assert prof.r(float(x)) > 0.0

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            radial_profile("nope")
        with pytest.raises(ValueError):
            radial_profile("generic-f")  # missing f


class TestMobius:
    def test_identity_at_zero(self):
        C = mobius_to_origin(0.0)
        for z in (0.3, -0.2 + 0.4j):
            assert abs(C(z) - z) < 1e-15

    @settings(max_examples=40, deadline=None)
    @given(interior_points)
    def test_sends_p_to_zero(self, p):
        assert abs(mobius_to_origin(p)(p)) < 1e-14

    @settings(max_examples=40, deadline=None)
    @given(interior_points, angles)
    def test_boundary_preserved(self, p, theta):
        C = mobius_to_origin(p)
        assert abs(abs(C(cmath.exp(1j * theta))) - 1.0) < 1e-13

    def test_inverse(self):
        C = mobius_to_origin(0.3 - 0.2j)
        z = 0.5 + 0.1j
        assert abs(C.inverse(C(z)) - z) < 1e-14


class TestGeodesic:
    def test_diameter_is_straight(self):
        arc = hyperbolic_geodesic(0.5, -0.5, samples=32)
        assert np.abs(arc[:, 1]).max() < 1e-14

    def test_radial_from_origin(self):
        arc = hyperbolic_geodesic(0.0, 0.3 + 0.4j, samples=32)
        cross = arc[:, 0] * 0.4 - arc[:, 1] * 0.3
        assert np.abs(cross).max() < 1e-14

    def test_endpoints_exact(self):
        p, q = 0.5 + 0.0j, -0.3 + 0.4j
        arc = hyperbolic_geodesic(p, q, samples=16)
        assert arc[0, 0] == p.real and arc[0, 1] == p.imag
        assert arc[-1, 0] == q.real and arc[-1, 1] == q.imag

    def test_orthogonal_circle(self):
        arc = hyperbolic_geodesic(0.5 + 0.0j, -0.3 + 0.4j, samples=64)
        # Circumcircle through three samples; orthogonality to the unit
        # circle means |c|^2 = rho^2 + 1, which every sample must satisfy.
        (ax, ay), (bx, by), (cx, cy) = arc[0], arc[len(arc) // 2], arc[-1]
        d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
        a2, b2, c2 = ax * ax + ay * ay, bx * bx + by * by, cx * cx + cy * cy
        ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d
        uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d
        cen = complex(ux, uy)
        rho = abs(complex(ax, ay) - cen)
        assert abs(abs(cen) ** 2 - rho ** 2 - 1.0) < 1e-10
        for pt in arc:
            assert abs(abs(complex(*pt) - cen) - rho) < 1e-10


class TestDvGradient:
    def test_radial_for_origin_target(self):
        prof = radial_profile("KL")
        q = 0.3 + 0.2j
        g = disk_dv_gradient("KL", 0.0, q)
        expected = prof.r(abs(q)) * np.array([q.real, q.imag])
        np.testing.assert_allclose(g, expected, rtol=1e-12)

    def test_all_kinds_parallel(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            p = complex(*rng.uniform(-0.5, 0.5, 2))
            q = complex(*rng.uniform(-0.5, 0.5, 2))
            if abs(p - q) < 0.1:
                continue
            grads = [disk_dv_gradient(kind, p, q)
                     for kind in ("D", "HB", "KL", "TV", "chi2")]
            base = grads[0] / np.linalg.norm(grads[0])
            for g in grads[1:]:
                gn = g / np.linalg.norm(g)
                assert abs(base[0] * gn[1] - base[1] * gn[0]) < 1e-8
                assert np.dot(base, gn) > 0

    def test_gradient_along_geodesic_tangent(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            p = complex(*rng.uniform(-0.5, 0.5, 2))
            q = complex(*rng.uniform(-0.5, 0.5, 2))
            if abs(p - q) < 0.05:
                continue
            # Analytic tangent of the geodesic at q, heading toward p: the
            # pullback of the straight ray C(q) -> 0 through the Moebius map.
            C = mobius_to_origin(p)
            tz = -C(q) / C.derivative(q)
            tangent = np.array([tz.real, tz.imag])
            tangent /= np.linalg.norm(tangent)
            g = disk_dv_gradient("KL", p, q)
            d = -g / np.linalg.norm(g)
            angle = math.atan2(abs(d[0] * tangent[1] - d[1] * tangent[0]),
                               float(np.dot(d, tangent)))
            assert angle < 1e-6
            # The sampled arc leaves q in the same direction.
            arc = hyperbolic_geodesic(q, p, samples=4096)
            secant = arc[1] - arc[0]
            secant /= np.linalg.norm(secant)
            assert float(np.dot(secant, tangent)) > 1.0 - 1e-6

    def test_never_zero(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            p = complex(*rng.uniform(-0.6, 0.6, 2))
            q = complex(*rng.uniform(-0.6, 0.6, 2))
            if abs(p - q) < 1e-3:
                continue
            assert np.linalg.norm(disk_dv_gradient("KL", p, q)) > 0


def test_conformal_invariance_of_dv():
    kl = builtin_f("kl")
    rng = np.random.default_rng(3)
    for _ in range(3):
        p = complex(*rng.uniform(-0.4, 0.4, 2))
        q = complex(*rng.uniform(-0.4, 0.4, 2))
        m = complex(*rng.uniform(-0.3, 0.3, 2))
        C = mobius_to_origin(m)
        v1 = disk_dv_integral(kl.f, q, p)
        v2 = disk_dv_integral(kl.f, C(q), C(p))
        assert abs(v1 - v2) < 1e-8


def test_near_boundary_log_relation():
    # Close to the rim, KL(x) and -log(4*pi*D(x)) agree to a few percent:
    # D ~ (1-x^2)/(4*pi) there while KL = -log(1-x^2).
    kl = radial_profile("KL")
    d = radial_profile("D")
    for x in (0.95, 0.97, 0.99, 0.995):
        green_val = -d.g(x)  # positive Green's value
        approx = -math.log(4.0 * math.pi * green_val)
        assert abs(kl.g(x) - approx) / kl.g(x) < 0.05
