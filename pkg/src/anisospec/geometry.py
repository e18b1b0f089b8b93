"""Convex planar domains and their anisotropic geometric functionals.

Domains are strictly convex CCW polygons; curved shapes (disks, Wulff
shapes) enter as fine polygonal approximations.  That choice keeps the
perimeter, erosion and inradius computations exact polygon arithmetic:

* anisotropic perimeter  P_F = sum over edges of length * F(outer normal)
* anisotropic inradius   R_F = Chebyshev center in the polar metric,
  solved exactly as a tiny linear program
* inner parallel bodies  (erosion by r times the Wulff shape) via
  half-plane clipping with per-edge offsets r * F(normal)
* rolling bodies         K_r = (erode r) ⊕ r*Wulff via the planar
  mixed-area identities

The gridded anisotropic distance field uses exact per-segment 1-D convex
minimization (vectorized golden section), not fast marching, so its error
is set by the grid alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

from .norms import MinkowskiNorm, WulffPolygon, warn_if_not_axis_aligned

_DEDUP_TOL = 1e-12


class GeometryError(ValueError):
    """Invalid polygon or invalid geometric operation."""


class CoarseGridError(GeometryError):
    """The requested grid spacing does not resolve the domain."""


def _dedup_ccw(vertices: np.ndarray, tol: float) -> np.ndarray:
    keep = [vertices[0]]
    for v in vertices[1:]:
        if np.max(np.abs(v - keep[-1])) > tol:
            keep.append(v)
    if len(keep) > 1 and np.max(np.abs(keep[0] - keep[-1])) <= tol:
        keep.pop()
    return np.asarray(keep)


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    """Strictly convex polygon with CCW vertices and a provenance tag."""

    vertices: np.ndarray
    provenance: str = "poly"

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise GeometryError("vertices must be an (n, 2) array")
        v = _dedup_ccw(v, _DEDUP_TOL)
        if len(v) < 3:
            raise GeometryError("polygon needs at least 3 distinct vertices")
        e = np.roll(v, -1, axis=0) - v
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        if np.any(cross <= 0.0):
            raise GeometryError("vertices must be strictly convex in CCW order")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    # -- constructors --------------------------------------------------------

    @staticmethod
    def rectangle(a: float, k: float) -> "ConvexPolygon":
        """The rectangle ]-a, a[ x ]-k, k[."""
        if not (a > 0 and k > 0):
            raise GeometryError("rectangle needs positive half-sides")
        verts = [(-a, -k), (a, -k), (a, k), (-a, k)]
        return ConvexPolygon(np.array(verts, float), f"rect:{a:g},{k:g}")

    @staticmethod
    def regular(n: int, circumradius: float = 1.0) -> "ConvexPolygon":
        if n < 3 or not (circumradius > 0):
            raise GeometryError("regular polygon needs n >= 3 and R > 0")
        th = 2.0 * math.pi * np.arange(n) / n
        verts = circumradius * np.stack([np.cos(th), np.sin(th)], axis=-1)
        return ConvexPolygon(verts, f"regular:{n},{circumradius:g}")

    @staticmethod
    def from_wulff(wp: WulffPolygon) -> "ConvexPolygon":
        n = len(wp.vertices)
        return ConvexPolygon(wp.vertices, f"wulff:{wp.radius:g},{n}")

    # -- cached edge data ------------------------------------------------------

    @cached_property
    def _edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(unit outer normals, offsets c with x.n <= c inside, edge lengths)."""
        v = self.vertices
        d = np.roll(v, -1, axis=0) - v
        lengths = np.hypot(d[:, 0], d[:, 1])
        normals = np.stack([d[:, 1], -d[:, 0]], axis=-1) / lengths[:, None]
        offsets = np.einsum("ij,ij->i", normals, v)
        return normals, offsets, lengths

    @property
    def edge_normals(self) -> np.ndarray:
        return self._edges[0]

    @property
    def edge_offsets(self) -> np.ndarray:
        return self._edges[1]

    @property
    def edge_lengths(self) -> np.ndarray:
        return self._edges[2]

    # -- scalars ---------------------------------------------------------------

    @cached_property
    def area(self) -> float:
        v = self.vertices
        x, y = v[:, 0], v[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    @cached_property
    def diameter(self) -> float:
        v = self.vertices
        d2 = ((v[:, None, :] - v[None, :, :]) ** 2).sum(-1)
        return math.sqrt(float(d2.max()))

    @cached_property
    def bounding_box(self) -> tuple[float, float, float, float]:
        v = self.vertices
        return (float(v[:, 0].min()), float(v[:, 0].max()),
                float(v[:, 1].min()), float(v[:, 1].max()))

    @property
    def euclidean_perimeter(self) -> float:
        return float(self.edge_lengths.sum())

    # -- point queries -----------------------------------------------------------

    def clearance(self, points: np.ndarray) -> np.ndarray:
        """Signed Euclidean distance to the boundary (positive inside).

        Valid as a distance only for points inside the polygon; outside it
        is just the most violated half-plane margin.  Edge chunking keeps
        the intermediate below points x 64 entries.
        """
        points = np.asarray(points, float)
        normals, offsets, _ = self._edges
        out = np.full(points.shape[:-1], np.inf)
        for s in range(0, len(normals), 64):
            block = offsets[s:s + 64] - points @ normals[s:s + 64].T
            np.minimum(out, block.min(axis=-1), out=out)
        return out

    def contains(self, points: np.ndarray) -> np.ndarray:
        return self.clearance(points) > 0.0

    # -- anisotropic functionals ----------------------------------------------

    def perimeter_F(self, norm: MinkowskiNorm) -> float:
        """Boundary integral of F applied to the Euclidean unit outer normal."""
        normals, _, lengths = self._edges
        return float(np.dot(lengths, np.asarray(norm(normals))))

    def inradius_F(self, norm: MinkowskiNorm) -> tuple[float, np.ndarray]:
        """Exact anisotropic inradius and an incenter, via linear programming.

        For a convex polygon the polar distance from x to the boundary is
        min over edges of (c_e - x.n_e) / F(n_e), so the inradius is the
        Chebyshev-center LP  max r  s.t.  x.n_e + r F(n_e) <= c_e.
        """
        normals, offsets, _ = self._edges
        fn = np.asarray(norm(normals))
        a_ub = np.column_stack([normals, fn])
        res = linprog(c=[0.0, 0.0, -1.0], A_ub=a_ub, b_ub=offsets,
                      bounds=[(None, None), (None, None), (0.0, None)],
                      method="highs")
        if not res.success:
            raise GeometryError(f"inradius LP failed: {res.message}")
        return float(res.x[2]), res.x[:2].copy()

    def distance_to_boundary_F(self, norm: MinkowskiNorm,
                               points: np.ndarray) -> np.ndarray:
        """Exact polar-gauge distance to the boundary for interior points."""
        points = np.asarray(points, float)
        normals, offsets, _ = self._edges
        fn = np.asarray(norm(normals))
        out = np.full(points.shape[:-1], np.inf)
        for s in range(0, len(normals), 64):
            block = (offsets[s:s + 64] - points @ normals[s:s + 64].T) / fn[s:s + 64]
            np.minimum(out, block.min(axis=-1), out=out)
        return out

    # -- erosion and rolling bodies ----------------------------------------------

    def erode(self, norm: MinkowskiNorm, r: float) -> "ConvexPolygon | None":
        """Inner parallel body: shrink every edge half-plane by r*F(normal).

        Returns None when the intersection has empty interior (always the
        case once r reaches the anisotropic inradius).  erode(0) returns
        the polygon itself.
        """
        if r < 0:
            raise GeometryError("erosion radius must be nonnegative")
        if r == 0.0:
            return self
        r_f, center = _chebyshev_cached(self, norm)
        if r >= r_f * (1.0 - 1e-13):
            return None
        normals, offsets, _ = self._edges
        shifted = offsets - r * np.asarray(norm(normals))
        # the incenter keeps margin (R_F - r) F(n) > 0, so polar duality
        # applies: active planes = hull vertices of n_e / margin_e
        margins = shifted - normals @ center
        verts = None
        try:
            hull = ConvexHull(normals / margins[:, None])
            act = hull.vertices  # CCW
            n1, c1 = normals[act], margins[act]
            n2 = normals[np.roll(act, -1)]
            c2 = margins[np.roll(act, -1)]
            det = n1[:, 0] * n2[:, 1] - n1[:, 1] * n2[:, 0]
            verts = np.stack([(c1 * n2[:, 1] - c2 * n1[:, 1]) / det,
                              (n1[:, 0] * c2 - n2[:, 0] * c1) / det],
                             axis=-1) + center
        except (QhullError, FloatingPointError):
            verts = _clip_halfplanes(self.vertices, normals, shifted)
        if verts is None:
            return None
        verts = _clean_convex(verts, max(self.diameter, 1.0))
        if verts is None:
            return None
        return ConvexPolygon(verts, f"{self.provenance}~erode:{r:g}")

    def rolling_body(self, norm: MinkowskiNorm, r: float) -> tuple[float, float]:
        """Area and anisotropic perimeter of (erode r) ⊕ r*Wulff.

        Planar mixed-area identities for a convex body E and the Wulff
        shape W with area kappa:  |E + rW| = |E| + r P_F(E) + r^2 kappa,
        P_F(E + rW) = P_F(E) + 2 r kappa.
        """
        eroded = self.erode(norm, r)
        if eroded is None:
            raise GeometryError(f"erosion by r={r:g} is empty")
        kappa = norm.wulff_area()
        area_e = eroded.area
        per_e = eroded.perimeter_F(norm)
        return (area_e + r * per_e + r * r * kappa, per_e + 2.0 * r * kappa)


@lru_cache(maxsize=256)
def _chebyshev_cached(poly: ConvexPolygon,
                      norm: MinkowskiNorm) -> tuple[float, np.ndarray]:
    return poly.inradius_F(norm)


def _clip_halfplanes(vertices: np.ndarray, normals: np.ndarray,
                     offsets: np.ndarray) -> np.ndarray | None:
    """Sutherland-Hodgman clip of a convex polygon by x.n <= c half-planes."""
    poly = vertices
    for n, c in zip(normals, offsets):
        if len(poly) < 3:
            return None
        s = poly @ n - c
        if np.all(s <= 0.0):
            continue
        if np.all(s >= 0.0):
            return None
        out = []
        m = len(poly)
        for i in range(m):
            j = (i + 1) % m
            si, sj = s[i], s[j]
            if si <= 0.0:
                out.append(poly[i])
            if (si > 0.0) != (sj > 0.0):
                t = si / (si - sj)
                out.append(poly[i] + t * (poly[j] - poly[i]))
        if len(out) < 3:
            return None
        poly = np.asarray(out)
    return poly


def _clean_convex(verts: np.ndarray, scale: float) -> np.ndarray | None:
    """Dedup and prune collinear-by-noise vertices; None if degenerate."""
    verts = _dedup_ccw(verts, 1e-12 * scale)
    for _ in range(len(verts)):
        if len(verts) < 3:
            return None
        e = np.roll(verts, -1, axis=0) - verts
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        bad = cross <= 1e-14 * scale * scale
        if not bad.any():
            break
        # drop the vertex at the apex of each flat/reflex corner
        verts = verts[np.roll(~bad, 1)]
    else:
        return None
    if len(verts) < 3:
        return None
    x, y = verts[:, 0], verts[:, 1]
    area = 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
    if area <= 1e-12 * scale * scale:
        return None
    return verts


def wulff_domain(norm: MinkowskiNorm, r: float = 1.0, n: int = 256) -> ConvexPolygon:
    """Polygonal Wulff shape of ``norm`` as a domain."""
    from .norms import wulff_polygon

    return ConvexPolygon.from_wulff(wulff_polygon(norm, r, n=n))


def parse_domain(spec: str, norm: MinkowskiNorm | None = None) -> ConvexPolygon:
    """Parse the domain grammar.

    ``rect:<a>,<k>`` | ``regular:<n>,<circumradius>`` | ``wulff:<r>,<n>``
    | ``poly:<x1>,<y1>;<x2>,<y2>;...``.  The wulff family needs the case
    gauge to be meaningful, hence the ``norm`` argument.
    """
    spec = spec.strip()
    head, sep, tail = spec.partition(":")
    if not sep:
        raise GeometryError(f"malformed domain spec {spec!r}")
    try:
        if head == "rect":
            a, k = (float(t) for t in tail.split(","))
            return ConvexPolygon.rectangle(a, k)
        if head == "regular":
            n, rr = tail.split(",")
            return ConvexPolygon.regular(int(n), float(rr))
        if head == "wulff":
            if norm is None:
                raise GeometryError("wulff domain needs a gauge")
            r, n = tail.split(",")
            return wulff_domain(norm, float(r), int(n))
        if head == "poly":
            pts = np.array([[float(c) for c in pair.split(",")]
                            for pair in tail.split(";")])
            try:
                return ConvexPolygon(pts, f"poly:{len(pts)}")
            except GeometryError:
                return ConvexPolygon(pts[::-1], f"poly:{len(pts)}")
    except GeometryError:
        raise
    except ValueError as exc:
        raise GeometryError(f"malformed domain spec {spec!r}: {exc}") from None
    raise GeometryError(f"unknown domain family {head!r}")


def rect_ratio_limit(a: float, norm: MinkowskiNorm) -> float:
    """Limit of perimeter/area for ]-a,a[ x ]-k,k[ as k grows: 1/(a F°(e1)).

    Warns when the axis-alignment identity F(e1) F°(e1) = 1 fails, since
    the closed form is derived from it.
    """
    if not (a > 0):
        raise GeometryError("slab half-width a must be positive")
    warn_if_not_axis_aligned(norm)
    return 1.0 / (a * float(norm.polar_eval(np.array([1.0, 0.0]))))


# -- gridded distance field ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DistanceField:
    """Anisotropic distance to the boundary sampled on a uniform grid.

    ``values`` is zero outside ``mask``.  ``nearest_edge`` holds the index
    of the closest boundary segment per node and ``ridge`` marks nodes
    whose two best segment distances are within 2h (where the gradient of
    the distance is discontinuous).
    """

    h: float
    x: np.ndarray
    y: np.ndarray
    mask: np.ndarray
    values: np.ndarray
    nearest_edge: np.ndarray
    ridge: np.ndarray
    inradius: float
    argmax: np.ndarray

    @property
    def bounding_box(self) -> tuple[float, float, float, float]:
        return float(self.x[0]), float(self.x[-1]), float(self.y[0]), float(self.y[-1])


def _grid_axes(poly: ConvexPolygon, h: float) -> tuple[np.ndarray, np.ndarray]:
    xmin, xmax, ymin, ymax = poly.bounding_box
    nx = int(math.floor((xmax - xmin) / h + 1e-9)) + 2
    ny = int(math.floor((ymax - ymin) / h + 1e-9)) + 2
    return xmin + h * np.arange(nx), ymin + h * np.arange(ny)


def _segment_distance_batch(points: np.ndarray, a: np.ndarray, b: np.ndarray,
                            polar: MinkowskiNorm, iters: int = 48) -> np.ndarray:
    """min_t F°(x - (a + t (b-a))) over t in [0,1], one row at a time.

    ``a``/``b`` may be single endpoints or per-row endpoint arrays.  The
    restriction is convex in t, so golden-section search brackets the
    minimum; 48 shrinks push the bracket below 1e-8 of the segment length.
    """
    lo = np.zeros(len(points))
    hi = np.ones(len(points))
    seg = b - a
    invphi = (math.sqrt(5.0) - 1.0) / 2.0

    def val(t):
        return np.asarray(polar(points - (a + t[:, None] * seg)))

    for _ in range(iters):
        t1 = hi - invphi * (hi - lo)
        t2 = lo + invphi * (hi - lo)
        keep_lo = val(t1) < val(t2)
        hi = np.where(keep_lo, t2, hi)
        lo = np.where(keep_lo, lo, t1)
    tm = 0.5 * (lo + hi)
    return np.minimum(val(tm), np.minimum(val(lo), val(hi)))


def distance_field(poly: ConvexPolygon, norm: MinkowskiNorm,
                   h: float) -> DistanceField:
    """Sample d_F(x) = inf over boundary points y of F°(x - y) on a grid.

    Every interior node is minimized exactly against every boundary
    segment (convex 1-D search), then reduced over segments.  Requires the
    grid to resolve the domain with at least 32 interior nodes per axis.
    """
    if not (h > 0):
        raise GeometryError("grid spacing must be positive")
    x, y = _grid_axes(poly, h)
    pts = np.stack(np.meshgrid(x, y, indexing="ij"), axis=-1)
    flat = pts.reshape(-1, 2)
    mask = poly.contains(flat).reshape(len(x), len(y))
    if mask.any(axis=1).sum() < 32 or mask.any(axis=0).sum() < 32:
        raise CoarseGridError(
            f"h={h:g} leaves fewer than 32 interior nodes per axis")

    polar = norm.polar()
    p_in = flat[mask.ravel()]
    verts = poly.vertices
    nv = len(verts)
    normals, offsets, _ = poly._edges
    fn = np.asarray(norm(normals))

    # for an interior point of a convex polygon the nearest boundary point
    # in the polar gauge lies on the edge whose line distance
    # (c - x.n)/F(n) is minimal (the tangency point of the grown Wulff
    # ball stays on that edge), so the exact 1-D searches only need to
    # confirm the argmin ties; the ridge rule compares the two smallest
    # line distances, which over-flags (never under-flags) discontinuities
    best_lb = np.full(len(p_in), np.inf)
    second_lb = np.full(len(p_in), np.inf)
    arg_lb = np.zeros(len(p_in), dtype=np.int64)
    for e in range(nv):
        lb = (offsets[e] - p_in @ normals[e]) / fn[e]
        closer = lb < best_lb
        np.minimum(second_lb, np.where(closer, best_lb, lb), out=second_lb)
        arg_lb = np.where(closer, e, arg_lb)
        best_lb = np.where(closer, lb, best_lb)

    scale = max(poly.diameter, 1.0)
    cutoff = best_lb + 1e-9 * scale
    pt_idx_parts, seg_idx_parts = [], []
    for e in range(nv):
        lb = (offsets[e] - p_in @ normals[e]) / fn[e]
        cand = np.nonzero(lb <= cutoff)[0]
        if len(cand):
            pt_idx_parts.append(cand)
            seg_idx_parts.append(np.full(len(cand), e, dtype=np.int64))
    pt_idx = np.concatenate(pt_idx_parts)
    seg_idx = np.concatenate(seg_idx_parts)
    d_pairs = _segment_distance_batch(p_in[pt_idx], verts[seg_idx],
                                      verts[(seg_idx + 1) % nv], polar)

    order = np.lexsort((d_pairs, pt_idx))
    ps, ds, ss = pt_idx[order], d_pairs[order], seg_idx[order]
    head = np.r_[True, ps[1:] != ps[:-1]]
    best = np.full(len(p_in), np.inf)
    idx = arg_lb
    best[ps[head]] = ds[head]
    idx[ps[head]] = ss[head]
    second = second_lb

    values = np.zeros(mask.shape)
    values[mask] = best
    nearest = np.full(mask.shape, -1, dtype=np.int64)
    nearest[mask] = idx
    ridge = np.zeros(mask.shape, dtype=bool)
    ridge[mask] = (second - best) <= 2.0 * h

    imax = int(np.argmax(values))
    argmax = flat[imax]
    return DistanceField(h=h, x=x, y=y, mask=mask, values=values,
                         nearest_edge=nearest, ridge=ridge,
                         inradius=float(values.ravel()[imax]), argmax=argmax)
