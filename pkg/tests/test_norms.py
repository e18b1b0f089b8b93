"""Gauge families: closed forms against independent numeric oracles."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anisospec.norms import (GaugeError, MinkowskiNorm, pi_p, pi_p_quadrature,
                             warn_if_not_axis_aligned, wulff_polygon)

LQ2 = MinkowskiNorm.lq(2)
LQ4 = MinkowskiNorm.lq(4)
ELL = MinkowskiNorm.ellipse(4, 0, 1)
FAMILIES = [LQ2, LQ4, MinkowskiNorm.lq(1.5), ELL, MinkowskiNorm.ellipse(2, 0.5, 1)]


def polar_sup_oracle(norm, eta, n=20000):
    """sup <xi, eta>/F(xi) by dense sampling of the unit circle + refinement."""
    theta = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    rays = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    vals = rays @ np.asarray(eta, float) / np.asarray(norm(rays))
    i = int(np.argmax(vals))
    lo, hi = theta[i] - 2 * np.pi / n, theta[i] + 2 * np.pi / n

    def f(t):
        ray = np.array([math.cos(t), math.sin(t)])
        return -float(np.dot(ray, eta)) / float(norm(ray))

    from scipy.optimize import minimize_scalar

    res = minimize_scalar(f, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-14})
    return -res.fun


class TestEval:
    def test_euclidean(self):
        assert LQ2((3, 4)) == pytest.approx(5.0, abs=1e-15)

    def test_lq4(self):
        assert LQ4((1, 1)) == pytest.approx(2.0 ** 0.25, rel=1e-14)

    def test_ellipse_axis(self):
        assert ELL((1, 0)) == pytest.approx(2.0, abs=1e-15)

    def test_zero(self):
        for norm in FAMILIES:
            assert norm((0.0, 0.0)) == 0.0

    def test_batch_matches_scalar(self):
        rng = np.random.default_rng(1)
        pts = rng.normal(size=(50, 2))
        for norm in FAMILIES:
            batch = np.asarray(norm(pts))
            single = [norm(p) for p in pts]
            assert batch == pytest.approx(single, rel=1e-14)

    @given(st.floats(-50, 50), st.floats(-50, 50),
           st.floats(0.01, 100))
    @settings(max_examples=60, deadline=None)
    def test_even_and_homogeneous(self, x, y, t):
        xi = np.array([x, y])
        for norm in (LQ4, ELL):
            f = norm(xi)
            assert norm(-xi) == pytest.approx(f, rel=1e-12, abs=1e-12)
            assert norm(t * xi) == pytest.approx(t * f, rel=1e-10, abs=1e-10)

    def test_coercivity_constants(self):
        rng = np.random.default_rng(7)
        pts = rng.normal(size=(500, 2))
        mags = np.hypot(pts[:, 0], pts[:, 1])
        for norm in FAMILIES:
            a, b = norm.coercivity()
            vals = np.asarray(norm(pts))
            assert np.all(vals >= a * mags * (1 - 1e-12))
            assert np.all(vals <= b * mags * (1 + 1e-12))


class TestGrad:
    def test_euclidean_grad(self):
        assert LQ2.grad((3, 4)) == pytest.approx([0.6, 0.8], abs=1e-15)

    def test_grad_dual_unit(self):
        g = LQ4.grad((1.0, 2.0))
        assert LQ4.polar_eval(g) == pytest.approx(1.0, abs=1e-12)

    def test_zero_rejected(self):
        with pytest.raises(GaugeError):
            LQ4.grad((0.0, 0.0))

    @given(st.floats(-10, 10), st.floats(-10, 10))
    @settings(max_examples=40, deadline=None)
    def test_degree_zero_homogeneous(self, x, y):
        if abs(x) + abs(y) < 1e-3:
            return
        xi = np.array([x, y])
        for norm in (LQ4, ELL):
            assert norm.grad(2 * xi) == pytest.approx(norm.grad(xi), rel=1e-10)

    def test_euler_identity(self):
        rng = np.random.default_rng(3)
        for norm in FAMILIES:
            for xi in rng.normal(size=(40, 2)):
                if np.hypot(*xi) < 1e-6:
                    continue
                g = norm.grad(xi)
                assert float(np.dot(g, xi)) == pytest.approx(float(norm(xi)),
                                                             rel=1e-12)


class TestPolar:
    def test_lq4_value(self):
        assert LQ4.polar_eval((1, 1)) == pytest.approx(2.0 ** 0.75, rel=1e-14)

    def test_lq4_against_sup(self):
        assert LQ4.polar_eval((1, 1)) == pytest.approx(
            polar_sup_oracle(LQ4, (1, 1)), abs=1e-6)

    def test_euclidean_self_polar(self):
        assert LQ2.polar_eval((3, 4)) == pytest.approx(5.0, abs=1e-14)

    def test_ellipse_axis(self):
        assert ELL.polar_eval((1, 0)) == pytest.approx(0.5, abs=1e-14)
        assert ELL.polar_eval((1, 0)) == pytest.approx(
            polar_sup_oracle(ELL, (1, 0)), abs=1e-8)

    def test_sup_oracle_random_directions(self):
        rng = np.random.default_rng(11)
        for norm in FAMILIES:
            for eta in rng.normal(size=(4, 2)):
                assert norm.polar_eval(eta) == pytest.approx(
                    polar_sup_oracle(norm, eta), rel=1e-8)

    def test_gradient_duality(self):
        # F°(F_xi(xi)) = 1 and F(F°_xi(xi)) = 1 on 200 random inputs per family
        rng = np.random.default_rng(5)
        for norm in FAMILIES:
            polar = norm.polar()
            xi = rng.normal(size=(200, 2))
            xi = xi[np.hypot(xi[:, 0], xi[:, 1]) > 1e-6]
            a = np.asarray(polar(norm.grad(xi)))
            b = np.asarray(norm(polar.grad(xi)))
            assert np.max(np.abs(a - 1.0)) < 1e-9
            assert np.max(np.abs(b - 1.0)) < 1e-9

    def test_cauchy_schwarz_pairing(self):
        rng = np.random.default_rng(9)
        xi = rng.normal(size=(10_000, 2))
        eta = rng.normal(size=(10_000, 2))
        for norm in FAMILIES:
            lhs = np.abs(np.einsum("ij,ij->i", xi, eta))
            rhs = np.asarray(norm(xi)) * np.asarray(norm.polar()(eta))
            assert np.all(lhs <= rhs + 1e-12)

    def test_polar_involution(self):
        for norm in FAMILIES:
            back = norm.polar().polar()
            rng = np.random.default_rng(2)
            pts = rng.normal(size=(20, 2))
            assert np.asarray(back(pts)) == pytest.approx(
                np.asarray(norm(pts)), rel=1e-12)


class TestPiP:
    def test_p2_is_pi(self):
        assert pi_p(2.0) == pytest.approx(math.pi, abs=1e-12)

    @pytest.mark.parametrize("p", [1.2, 1.5, 2.0, 3.0, 5.0])
    def test_closed_form_vs_quadrature(self, p):
        cf, qd = pi_p(p), pi_p_quadrature(p)
        assert abs(cf - qd) <= 1e-8 * abs(cf)

    def test_quadrature_against_mpmath(self):
        mp = pytest.importorskip("mpmath")
        old_dps = mp.mp.dps
        mp.mp.dps = 30  # the endpoint singularity wants extra working digits
        try:
            for p in (1.5, 3.0):

                def integrand(u, p=p, mp=mp):
                    s = 1 - u**p
                    if s <= 0:
                        return mp.mpf(0)
                    return s ** (mp.mpf(-1) / p)

                val = 2 * (p - 1.0) ** (1.0 / p) * mp.quad(integrand, [0, 1])
                assert pi_p_quadrature(p) == pytest.approx(float(val),
                                                           rel=1e-10)
        finally:
            mp.mp.dps = old_dps

    def test_p15_frozen_value(self):
        # frozen from the quadrature of the defining integral
        assert pi_p(1.5) == pytest.approx(3.0469919990, abs=1e-9)

    def test_conjugate_symmetry(self):
        # the closed form is invariant under p -> p/(p-1)
        for p in (1.5, 2.5, 4.0):
            assert pi_p(p) == pytest.approx(pi_p(p / (p - 1.0)), rel=1e-13)

    def test_invalid_p(self):
        with pytest.raises(GaugeError):
            pi_p(1.0)
        with pytest.raises(GaugeError):
            pi_p_quadrature(0.5)


class TestWulff:
    def test_euclidean_area(self):
        wp = wulff_polygon(LQ2, 1.0, n=512)
        assert wp.area == pytest.approx(math.pi, abs=1e-3)

    def test_ellipse_vertex_on_axis(self):
        wp = wulff_polygon(ELL, 1.0, n=64)
        assert wp.vertices[0] == pytest.approx([2.0, 0.0], abs=1e-14)

    def test_scaling(self):
        w1 = wulff_polygon(LQ4, 1.0, n=64)
        w2 = wulff_polygon(LQ4, 2.0, n=64)
        assert w2.vertices == pytest.approx(2.0 * w1.vertices, rel=1e-14)

    def test_vertices_on_level_set(self):
        for norm in FAMILIES:
            wp = wulff_polygon(norm, 1.5, center=(0.5, -1.0), n=128)
            vals = np.asarray(norm.polar()(wp.vertices - wp.center))
            assert vals == pytest.approx(np.full(128, 1.5), rel=1e-12)

    def test_min_rays(self):
        with pytest.raises(GaugeError):
            wulff_polygon(LQ2, 1.0, n=8)

    @pytest.mark.parametrize("norm", FAMILIES)
    def test_area_closed_form_vs_quadrature(self, norm):
        # kappa = (1/2) integral of rho(theta)^2, rho = 1/F°(unit ray)
        from scipy.integrate import quad

        polar = norm.polar()

        def rho2(t):
            return 1.0 / float(polar((math.cos(t), math.sin(t)))) ** 2

        val, _ = quad(rho2, 0.0, 2.0 * math.pi, limit=200)
        assert norm.wulff_area() == pytest.approx(0.5 * val, rel=1e-9)


class TestSpecStrings:
    def test_round_trip(self):
        for spec in ("lq:2", "lq:4", "lq:1.5", "ellipse:4,0,1",
                     "ellipse:2,0.5,1"):
            norm = MinkowskiNorm.parse(spec)
            again = MinkowskiNorm.parse(norm.spec_string())
            rng = np.random.default_rng(0)
            pts = rng.normal(size=(10, 2))
            assert np.asarray(again(pts)) == pytest.approx(
                np.asarray(norm(pts)), rel=1e-14)

    @pytest.mark.parametrize("bad", ["lq", "lq:1", "lq:abc", "ellipse:1,2",
                                     "ellipse:1,5,1", "disc:3", ""])
    def test_malformed(self, bad):
        with pytest.raises(GaugeError):
            MinkowskiNorm.parse(bad)


class TestAlignment:
    def test_catalog_families_aligned(self):
        for norm in (LQ2, LQ4, ELL):
            assert norm.axis_alignment_defect() < 1e-12

    def test_rotated_ellipse_warns(self):
        rotated = MinkowskiNorm.ellipse(2, 0.5, 1)
        assert rotated.axis_alignment_defect() > 1e-3
        with pytest.warns(UserWarning):
            warn_if_not_axis_aligned(rotated)
