"""Minkowski gauges (anisotropies), their polar gauges, and Wulff shapes.

A gauge F is an even, positively 1-homogeneous, convex function on R^N,
positive away from the origin.  Two closed-form families are shipped:

* ``lq:<q>``                  F(xi) = (sum_i |xi_i|^q)^(1/q),  q > 1
* ``ellipse:<a11>,<a12>,<a22>``  F(xi) = sqrt(xi . A xi), A symmetric
  positive definite (2x2)

Both families admit closed forms for the polar gauge (dual exponent,
inverse matrix), the gradient, and the area of the unit polar ball (the
Wulff shape), so no numeric sup/inversion sits on the solver hot path.
The sup-based polar is kept in the test suite as an independent oracle.

The module also provides ``pi_p``, the generalized pi governing the
one-dimensional eigenvalue problem, in closed form with a quadrature
cross-check routine.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma


class GaugeError(ValueError):
    """Invalid gauge parameters or invalid gauge input."""


def _as_points(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    if xi.shape[-1] < 2:
        raise GaugeError("gauge inputs need at least 2 components")
    return xi


@dataclass(frozen=True, eq=False)
class MinkowskiNorm:
    """A gauge from one of the closed-form families.

    ``family`` is "lq" or "ellipse"; exactly one of ``q`` / ``A`` is set.
    Instances are immutable and all methods are pure, so sharing across
    workers is safe.
    """

    family: str
    q: float | None = None
    A: np.ndarray | None = None
    dimension: int = 2

    def __post_init__(self):
        if self.family == "lq":
            if self.q is None or not (self.q > 1.0):
                raise GaugeError("lq family needs exponent q > 1")
        elif self.family == "ellipse":
            A = np.asarray(self.A, dtype=float)
            if A.shape != (2, 2) or not np.allclose(A, A.T, atol=1e-14):
                raise GaugeError("ellipse family needs a symmetric 2x2 matrix")
            ev = np.linalg.eigvalsh(A)
            if ev[0] <= 0:
                raise GaugeError("ellipse matrix must be positive definite")
            A = A.copy()
            A.setflags(write=False)
            object.__setattr__(self, "A", A)
        else:
            raise GaugeError(f"unknown gauge family {self.family!r}")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def lq(q: float) -> "MinkowskiNorm":
        return MinkowskiNorm("lq", q=float(q))

    @staticmethod
    def ellipse(a11: float, a12: float, a22: float) -> "MinkowskiNorm":
        return MinkowskiNorm("ellipse", A=np.array([[a11, a12], [a12, a22]], float))

    @staticmethod
    def euclidean() -> "MinkowskiNorm":
        return MinkowskiNorm.lq(2.0)

    @staticmethod
    def parse(spec: str) -> "MinkowskiNorm":
        """Parse the gauge grammar ``lq:<q>`` or ``ellipse:<a11>,<a12>,<a22>``."""
        spec = spec.strip()
        head, sep, tail = spec.partition(":")
        if not sep:
            raise GaugeError(f"malformed gauge spec {spec!r}")
        try:
            if head == "lq":
                return MinkowskiNorm.lq(float(tail))
            if head == "ellipse":
                a11, a12, a22 = (float(t) for t in tail.split(","))
                return MinkowskiNorm.ellipse(a11, a12, a22)
        except GaugeError:
            raise
        except ValueError as exc:
            raise GaugeError(f"malformed gauge spec {spec!r}: {exc}") from None
        raise GaugeError(f"unknown gauge family {head!r}")

    def spec_string(self) -> str:
        if self.family == "lq":
            return f"lq:{self.q:g}"
        a = self.A
        return f"ellipse:{a[0, 0]:g},{a[0, 1]:g},{a[1, 1]:g}"

    # -- evaluation --------------------------------------------------------

    def __call__(self, xi) -> np.ndarray | float:
        """Evaluate F(xi); xi may be a single vector or an (..., N) array."""
        xi = _as_points(xi)
        if self.family == "lq":
            a = np.abs(xi)
            m = a.max(axis=-1)
            with np.errstate(invalid="ignore", divide="ignore"):
                t = a / m[..., None]
                val = m * np.power(np.power(t, self.q).sum(axis=-1), 1.0 / self.q)
            val = np.where(m == 0.0, 0.0, val)
        else:
            val = np.sqrt(np.einsum("...i,ij,...j->...", xi, self.A, xi))
        return float(val) if val.ndim == 0 else val

    def grad(self, xi) -> np.ndarray:
        """Gradient of F; 0-homogeneous. The origin is rejected, not smoothed."""
        xi = _as_points(xi)
        f = np.asarray(self(xi))
        if np.any(f == 0.0):
            raise GaugeError("gauge gradient is undefined at the origin")
        if self.family == "lq":
            t = np.abs(xi) / f[..., None]
            return np.sign(xi) * np.power(t, self.q - 1.0)
        return np.einsum("ij,...j->...i", self.A, xi) / f[..., None]

    def polar(self) -> "MinkowskiNorm":
        """The polar gauge F°(v) = sup_{xi != 0} <xi, v>/F(xi), in closed form."""
        if self.family == "lq":
            return MinkowskiNorm.lq(self.q / (self.q - 1.0))
        return MinkowskiNorm("ellipse", A=np.linalg.inv(self.A))

    def polar_eval(self, eta) -> np.ndarray | float:
        return self.polar()(eta)

    # -- vectorized 2-D kernels (solver hot path) --------------------------

    def value2(self, gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
        """F evaluated componentwise on arrays of x/y parts."""
        if self.family == "ellipse":
            a = self.A
            s = a[0, 0] * gx * gx + 2.0 * a[0, 1] * gx * gy + a[1, 1] * gy * gy
            return np.sqrt(np.maximum(s, 0.0))
        q = self.q
        ax, ay = np.abs(gx), np.abs(gy)
        m = np.maximum(ax, ay)
        with np.errstate(invalid="ignore", divide="ignore"):
            v = m * np.power(np.power(ax / m, q) + np.power(ay / m, q), 1.0 / q)
        return np.where(m == 0.0, 0.0, v)

    def value_wgrad2(self, gx, gy) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return (F, W1, W2) with W = F * grad F = grad(F^2)/2, finite at 0."""
        if self.family == "ellipse":
            a = self.A
            f = self.value2(gx, gy)
            return f, a[0, 0] * gx + a[0, 1] * gy, a[0, 1] * gx + a[1, 1] * gy
        q = self.q
        f = self.value2(gx, gy)
        with np.errstate(invalid="ignore", divide="ignore"):
            tx = np.abs(gx) / f
            ty = np.abs(gy) / f
            w1 = np.sign(gx) * np.power(tx, q - 1.0) * f
            w2 = np.sign(gy) * np.power(ty, q - 1.0) * f
        zero = f == 0.0
        return f, np.where(zero, 0.0, w1), np.where(zero, 0.0, w2)

    # -- derived quantities --------------------------------------------------

    def is_quadratic(self) -> bool:
        return self.family == "ellipse" or self.q == 2.0

    def wulff_area(self) -> float:
        """Area of the unit Wulff shape {F° <= 1} (closed form per family)."""
        if self.family == "ellipse":
            return math.pi * math.sqrt(float(np.linalg.det(self.A)))
        s = self.q / (self.q - 1.0)  # polar exponent; Wulff = unit ls-ball
        return 4.0 * gamma(1.0 + 1.0 / s) ** 2 / gamma(1.0 + 2.0 / s)

    def coercivity(self) -> tuple[float, float]:
        """Constants (a, b) with a|xi| <= F(xi) <= b|xi|."""
        if self.family == "ellipse":
            ev = np.linalg.eigvalsh(self.A)
            return math.sqrt(ev[0]), math.sqrt(ev[-1])
        q = self.q
        if q >= 2.0:
            return 2.0 ** (1.0 / q - 0.5), 1.0
        return 1.0, 2.0 ** (1.0 / q - 0.5)

    def axis_alignment_defect(self) -> float:
        """|F(e1) F°(e1) - 1|; zero for lq and axis-aligned ellipse gauges."""
        e1 = np.zeros(self.dimension)
        e1[0] = 1.0
        return abs(float(self(e1)) * float(self.polar_eval(e1)) - 1.0)


@dataclass(frozen=True, eq=False)
class WulffPolygon:
    """Polygonal sampling of the scaled Wulff shape {F°(x - center) = radius}."""

    vertices: np.ndarray  # (n, 2) CCW
    radius: float
    center: np.ndarray = field(default_factory=lambda: np.zeros(2))

    @property
    def area(self) -> float:
        v = self.vertices
        x, y = v[:, 0], v[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def wulff_polygon(norm: MinkowskiNorm, r: float, center=(0.0, 0.0),
                  n: int = 512) -> WulffPolygon:
    """Sample the Wulff shape of ``norm`` at radius ``r`` by ``n`` rays.

    Vertex i sits on the ray at angle 2*pi*i/n, scaled so that the polar
    gauge of (vertex - center) equals r exactly.  The polygon is convex and
    inscribed in the true shape; its area tends to ``norm.wulff_area() * r**2``.
    """
    if n < 16:
        raise GaugeError("wulff polygon needs n >= 16 rays")
    if not (r > 0):
        raise GaugeError("wulff polygon needs radius r > 0")
    theta = 2.0 * math.pi * np.arange(n) / n
    rays = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    rho = r / np.asarray(norm.polar()(rays))
    verts = np.asarray(center, float) + rho[:, None] * rays
    return WulffPolygon(verts, float(r), np.asarray(center, float))


def pi_p(p: float) -> float:
    """The generalized pi: 2*pi*(p-1)^(1/p) / (p*sin(pi/p)), p > 1.

    Governs the one-dimensional / slab eigenvalue (pi_p / (2a))^p and
    reduces to pi at p = 2.
    """
    if not (p > 1.0):
        raise GaugeError("pi_p requires p > 1")
    return 2.0 * math.pi * (p - 1.0) ** (1.0 / p) / (p * math.sin(math.pi / p))


def pi_p_quadrature(p: float) -> float:
    """Adaptive quadrature of the defining integral of ``pi_p``.

    Integrates 2*(1 - t^p/(p-1))^(-1/p) dt over [0, (p-1)^(1/p)].  After
    the substitution t = (p-1)^(1/p) * tau the endpoint singularity is the
    algebraic weight (1-tau)^(-1/p), which QUADPACK handles exactly.
    """
    if not (p > 1.0):
        raise GaugeError("pi_p requires p > 1")

    def smooth_part(tau: float) -> float:
        if tau >= 1.0:
            return p ** (-1.0 / p)
        num = 1.0 - tau**p
        return (num / (1.0 - tau)) ** (-1.0 / p)

    val, _ = quad(smooth_part, 0.0, 1.0, weight="alg", wvar=(0.0, -1.0 / p),
                  epsabs=1e-13, epsrel=1e-13, limit=200)
    return 2.0 * (p - 1.0) ** (1.0 / p) * val


def warn_if_not_axis_aligned(norm: MinkowskiNorm, tol: float = 1e-9) -> float:
    """Warn when F(e1)*F°(e1) != 1; returns the defect.

    The alignment identity holds for the shipped lq family and for
    axis-aligned ellipses; rotated ellipses violate it and the slab limit
    formulas that rely on it then do not apply.
    """
    defect = norm.axis_alignment_defect()
    if defect > tol:
        warnings.warn(
            f"gauge {norm.spec_string()} is not axis-aligned "
            f"(F(e1)*F°(e1) deviates from 1 by {defect:.3e}); "
            "slab-limit formulas assume alignment", stacklevel=2)
    return defect
