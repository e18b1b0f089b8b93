"""Anisotropic Cheeger constant: inradius bounds and a rolling-Wulff estimate.

For a convex planar domain the Cheeger set is convex and unique, and the
classical planar characterization suggests the candidate family

    K_r = (domain eroded by r * Wulff) ⊕ r * Wulff,   0 <= r <= inradius,

whose perimeter/area ratio is evaluated in closed form by the rolling-body
identities.  The estimator minimizes that ratio over r (coarse sweep, then
golden-section refinement) and reports the minimum as ``h_est`` together
with the rigorous inradius bounds

    1 / R_F  <=  h_F  <=  min(N / R_F, P_F / area).

``h_est`` is an upper estimate of the true constant by construction (every
K_r is an admissible competitor); only inequalities that stay valid under
that one-sided error are asserted elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import ConvexPolygon, GeometryError
from .norms import MinkowskiNorm

N_DIM = 2


@dataclass(frozen=True, eq=False)
class CheegerResult:
    """Estimate, optimal rolling radius, rigorous bounds, and the sweep trace."""

    h_est: float
    r_star: float
    lower: float
    upper: float
    trace: tuple[tuple[float, float], ...]
    inradius: float
    degenerate: bool = False

    def trace_csv(self, path) -> None:
        rows = np.asarray(self.trace, dtype=float)
        np.savetxt(path, rows, fmt="%.12g", delimiter=",",
                   header="r,ratio", comments="")


def cheeger_bounds(poly: ConvexPolygon,
                   norm: MinkowskiNorm) -> tuple[float, float]:
    """(1/R_F, min(N/R_F, P_F/|area|)); the second upper term uses K = domain."""
    r_f, _ = poly.inradius_F(norm)
    upper = min(N_DIM / r_f, poly.perimeter_F(norm) / poly.area)
    return 1.0 / r_f, upper


def _ratio(poly: ConvexPolygon, norm: MinkowskiNorm, r: float) -> float:
    try:
        area, per = poly.rolling_body(norm, r)
    except GeometryError:
        return math.inf
    if area <= 0.0:
        return math.inf
    return per / area


def cheeger_estimate(poly: ConvexPolygon, norm: MinkowskiNorm,
                     m: int = 64, r_tol: float = 1e-6) -> CheegerResult:
    """Minimize the rolling-body ratio over the radius sweep.

    ``m`` coarse samples over [0, R_F) bracket the minimizer of the
    quasi-convex ratio; golden-section then refines the radius to
    ``r_tol`` (absolute).  If every sampled body degenerates the upper
    bound is returned with the ``degenerate`` flag set.
    """
    if m < 3:
        raise GeometryError("sweep needs at least 3 samples")
    r_f, _ = poly.inradius_F(norm)
    lower, upper = cheeger_bounds(poly, norm)

    rs = r_f * np.arange(m) / m  # r = R_F itself is degenerate
    vals = [_ratio(poly, norm, float(r)) for r in rs]
    trace = tuple((float(r), float(v)) for r, v in zip(rs, vals))
    finite = [i for i, v in enumerate(vals) if math.isfinite(v)]
    if not finite:
        return CheegerResult(h_est=upper, r_star=0.0, lower=lower, upper=upper,
                             trace=trace, inradius=r_f, degenerate=True)

    i_best = min(finite, key=lambda i: vals[i])
    lo = rs[max(i_best - 1, 0)]
    hi = rs[i_best + 1] if i_best + 1 < m else r_f * (1.0 - 1e-12)
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    t1 = hi - invphi * (hi - lo)
    t2 = lo + invphi * (hi - lo)
    f1, f2 = _ratio(poly, norm, t1), _ratio(poly, norm, t2)
    while hi - lo > r_tol:
        if f1 < f2:
            hi, t2, f2 = t2, t1, f1
            t1 = hi - invphi * (hi - lo)
            f1 = _ratio(poly, norm, t1)
        else:
            lo, t1, f1 = t1, t2, f2
            t2 = lo + invphi * (hi - lo)
            f2 = _ratio(poly, norm, t2)
    r_star = 0.5 * (lo + hi)
    h_best = min(_ratio(poly, norm, r_star), vals[i_best], f1, f2)
    return CheegerResult(h_est=float(h_best), r_star=float(r_star), lower=lower,
                         upper=upper, trace=trace, inradius=r_f)
