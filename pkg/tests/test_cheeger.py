"""Cheeger bounds and the rolling-Wulff estimator against closed forms."""

import math

import numpy as np
import pytest

from anisospec.cheeger import cheeger_bounds, cheeger_estimate
from anisospec.geometry import ConvexPolygon, GeometryError, wulff_domain
from anisospec.norms import MinkowskiNorm

LQ2 = MinkowskiNorm.lq(2)
LQ4 = MinkowskiNorm.lq(4)
ELL = MinkowskiNorm.ellipse(4, 0, 1)


def rect_cheeger_euclid(a: float, k: float) -> float:
    """Closed form for ]-a,a[ x ]-k,k[: 1/r* with |erosion(r*)| = pi r*^2.

    4(a-r)(k-r) = pi r^2  =>  (4-pi) r^2 - 4(a+k) r + 4ak = 0.
    """
    s = a + k
    r = 2.0 * (s - math.sqrt(s * s - (4.0 - math.pi) * a * k)) / (4.0 - math.pi)
    return 1.0 / r


class TestBounds:
    def test_unit_square(self):
        lower, upper = cheeger_bounds(ConvexPolygon.rectangle(0.5, 0.5), LQ2)
        assert lower == pytest.approx(2.0, abs=1e-9)
        assert upper == pytest.approx(4.0, abs=1e-9)

    def test_long_rectangle(self):
        lower, upper = cheeger_bounds(ConvexPolygon.rectangle(1, 16), LQ2)
        assert lower == pytest.approx(1.0, abs=1e-9)
        assert upper == pytest.approx(min(2.0, 68.0 / 64.0), abs=1e-9)

    def test_wulff(self):
        w = wulff_domain(LQ2, 1.0, 512)
        lower, upper = cheeger_bounds(w, LQ2)
        assert lower == pytest.approx(1.0, abs=1e-3)
        assert upper == pytest.approx(2.0, abs=1e-3)


class TestEstimate:
    def test_unit_square_closed_form(self):
        res = cheeger_estimate(ConvexPolygon.rectangle(0.5, 0.5), LQ2)
        assert res.h_est == pytest.approx(2.0 + math.sqrt(math.pi), rel=1e-6)
        assert res.r_star == pytest.approx(
            (2.0 - math.sqrt(math.pi)) / (4.0 - math.pi), abs=1e-4)

    @pytest.mark.parametrize("a,k", [(1.0, 1.0), (1.0, 4.0), (1.0, 16.0)])
    def test_rectangles_closed_form(self, a, k):
        res = cheeger_estimate(ConvexPolygon.rectangle(a, k), LQ2)
        assert res.h_est == pytest.approx(rect_cheeger_euclid(a, k), rel=1e-6)

    def test_long_rectangle_brackets(self):
        res = cheeger_estimate(ConvexPolygon.rectangle(1, 16), LQ2)
        assert 1.0 < res.h_est <= 1.0625 + 1e-9

    @pytest.mark.parametrize("norm", [LQ2, LQ4, ELL])
    def test_wulff_flat_sweep(self, norm):
        w = wulff_domain(norm, 1.0, 256)
        res = cheeger_estimate(w, norm)
        assert res.h_est == pytest.approx(2.0, rel=5e-3)
        ratios = [v for _, v in res.trace if math.isfinite(v)]
        assert max(ratios) - min(ratios) <= 5e-3 * res.h_est

    def test_sandwich_catalog(self):
        for poly in (ConvexPolygon.rectangle(1, 1),
                     ConvexPolygon.rectangle(1, 4),
                     ConvexPolygon.regular(6, 1.0)):
            for norm in (LQ2, LQ4, ELL):
                res = cheeger_estimate(poly, norm)
                assert res.lower <= res.h_est <= res.upper + 1e-9

    def test_faber_krahn_and_stability(self):
        for poly in (ConvexPolygon.rectangle(1, 1),
                     ConvexPolygon.regular(6, 1.0)):
            for norm in (LQ2, LQ4, ELL):
                res = cheeger_estimate(poly, norm)
                r_vol = math.sqrt(poly.area / norm.wulff_area())
                assert res.h_est >= 2.0 / r_vol * (1.0 - 1e-3)
                lhs = res.h_est - 2.0 / r_vol
                rhs = 2.0 * (1.0 / res.inradius - 1.0 / r_vol)
                assert lhs <= rhs + 1e-9

    def test_monotone_under_inclusion(self):
        vals = [cheeger_estimate(ConvexPolygon.rectangle(1, k), LQ2).h_est
                for k in (1, 2, 4)]
        assert vals[0] > vals[1] > vals[2]

    def test_trace_quasi_convex(self):
        res = cheeger_estimate(ConvexPolygon.rectangle(1, 1), LQ2)
        ratios = np.array([v for _, v in res.trace])
        d = np.diff(ratios)
        sign_changes = np.sum(np.diff(np.sign(d[np.abs(d) > 1e-12])) != 0)
        assert sign_changes <= 1

    def test_trace_csv(self, tmp_path):
        res = cheeger_estimate(ConvexPolygon.rectangle(1, 1), LQ4, m=8)
        path = tmp_path / "trace.csv"
        res.trace_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "r,ratio"
        assert len(lines) == 9

    def test_min_samples(self):
        with pytest.raises(GeometryError):
            cheeger_estimate(ConvexPolygon.rectangle(1, 1), LQ2, m=2)

    def test_degenerate_fallback(self, monkeypatch):
        def always_empty(self, norm, r):
            raise GeometryError("forced empty erosion")

        monkeypatch.setattr(ConvexPolygon, "rolling_body", always_empty)
        res = cheeger_estimate(ConvexPolygon.rectangle(1, 1), LQ2, m=8)
        assert res.degenerate
        assert res.h_est == pytest.approx(res.upper)
