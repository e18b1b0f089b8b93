"""Finite-difference variational solvers on masked uniform grids.

The first Dirichlet eigenvalue of the anisotropic p-Laplacian is computed
by minimizing the discrete Rayleigh quotient

    R(psi) = sum F_eps(grad psi)^p / sum |psi|^p

over fields that vanish outside the interior mask; the torsion function
minimizes J(v) = (1/p) sum F_eps(grad v)^p - sum v.  Gradients live on the
two right triangles of every grid cell (the symmetric pair of one-sided
differences sharing a corner), which integrates F(grad .)^p with midpoint
accuracy and, unlike nodal central differences, leaves no oscillating
null field that would let the quotient collapse.

Minimization is a monotone projected descent on the quotient: nonlinear
conjugate-gradient directions preconditioned by the inverse grid
Laplacian of the bounding box (applied by fast sine transforms), a
backtracking line search (exact rational step on the quadratic p = 2
path), nonnegativity clamping for eigenfields, and coarse-to-fine
seeding across a grid hierarchy.  Convergence is declared when the
relative quotient decrease over a 25-iteration window drops below the
requested tolerance.

Non-differentiability of F at a vanishing gradient is removed by the
subtracted regularization F_eps = sqrt(F^2 + eps^2) - eps, which keeps
F_eps(0) = 0; reported energies are re-evaluated at eps = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.fft import dstn, idstn
from scipy.ndimage import map_coordinates
from scipy.special import betainc

from .geometry import ConvexPolygon, CoarseGridError
from .norms import MinkowskiNorm, pi_p

WINDOW = 25  # iterations spanned by the convergence criterion
EPS_FACTOR = 1e-8  # gradient regularization per unit of domain diameter


class ConvergenceError(RuntimeError):
    """Solver failed to meet the tolerance within the iteration budget."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform grid covering the domain's bounding box exactly.

    The spacing is snapped per axis (hx = width / round(width / h), same
    for hy) so that grid nodes land exactly on the bounding box; straight
    edges parallel to an axis then carry no systematic half-cell boundary
    offset.  ``mask`` flags the free (interior) nodes; every other node
    carries a hard zero Dirichlet value.  Free nodes keep at least half a
    cell of clearance to the boundary, so the ring of zero nodes
    straddles the true boundary instead of sitting uniformly outside it.
    ``boundary_closed`` records that the grid retains a full ring of zero
    nodes around the mask (always true for this builder).
    """

    hx: float
    hy: float
    x: np.ndarray
    y: np.ndarray
    mask: np.ndarray
    boundary_closed: bool = True

    @property
    def h(self) -> float:
        return max(self.hx, self.hy)

    @property
    def nx(self) -> int:
        return len(self.x)

    @property
    def ny(self) -> int:
        return len(self.y)

    @property
    def cell_area(self) -> float:
        return self.hx * self.hy

    def same_layout(self, other: "Grid") -> bool:
        return (self.mask.shape == other.mask.shape
                and math.isclose(self.hx, other.hx)
                and math.isclose(self.hy, other.hy)
                and math.isclose(self.x[0], other.x[0])
                and math.isclose(self.y[0], other.y[0]))


@dataclass(frozen=True, eq=False)
class GridField:
    """Scalar values on a grid; zero outside the interior mask."""

    grid: Grid
    values: np.ndarray

    def max(self) -> float:
        return float(self.values.max())

    def integral(self, power: float = 1.0) -> float:
        v = self.values[self.grid.mask]
        if power == 1.0:
            s = v.sum()
        else:
            s = np.power(np.abs(v), power).sum()
        return float(self.grid.cell_area * s)

    def to_csv(self, path) -> None:
        xx, yy = np.meshgrid(self.grid.x, self.grid.y, indexing="ij")
        rows = np.column_stack([xx.ravel(), yy.ravel(), self.values.ravel()])
        np.savetxt(path, rows, fmt="%.12g", delimiter=",",
                   header="x,y,value", comments="")


def build_grid(poly: ConvexPolygon, h: float, min_axis: int = 16) -> Grid:
    """Grid whose free nodes keep half a cell of clearance to the boundary.

    The first zero node along any grid line lies within half a spacing of
    the true boundary on either side, which keeps the effective Dirichlet
    boundary centered on the exact one.
    """
    if not (h > 0):
        raise CoarseGridError("grid spacing must be positive")
    xmin, xmax, ymin, ymax = poly.bounding_box
    ncx = max(int(round((xmax - xmin) / h)), 4)
    ncy = max(int(round((ymax - ymin) / h)), 4)
    hx = (xmax - xmin) / ncx
    hy = (ymax - ymin) / ncy
    x = xmin + hx * np.arange(ncx + 1)
    y = ymin + hy * np.arange(ncy + 1)
    pts = np.stack(np.meshgrid(x, y, indexing="ij"), axis=-1).reshape(-1, 2)
    thr = 0.25 * (hx + hy)
    mask = (poly.clearance(pts) > thr).reshape(len(x), len(y))
    if min(mask.any(axis=1).sum(), mask.any(axis=0).sum()) < min_axis:
        raise CoarseGridError(
            f"h={h:g} leaves fewer than {min_axis} interior nodes per axis "
            f"of {poly.provenance}")
    return Grid(hx=hx, hy=hy, x=x, y=y, mask=mask)


# -- energy kernels -----------------------------------------------------------


def _tri_gradients(psi: np.ndarray, hx: float, hy: float):
    """P1 gradients on the lower-left / upper-right triangle of each cell."""
    dx = (psi[1:, :] - psi[:-1, :]) / hx
    dy = (psi[:, 1:] - psi[:, :-1]) / hy
    return dx[:, :-1], dy[:-1, :], dx[:, 1:], dy[1:, :]


def _pow(x: np.ndarray, p: float) -> np.ndarray:
    if p == 2.0:
        return x * x
    if p == 1.0:
        return x
    return np.power(x, p)


def _fp(norm: MinkowskiNorm, gx, gy, p: float, eps: float) -> np.ndarray:
    f = norm.value2(gx, gy)
    if eps == 0.0:
        return _pow(f, p)
    s = f * f
    fe = s / (np.sqrt(s + eps * eps) + eps)  # = sqrt(s+eps^2)-eps, stably
    return _pow(fe, p)


def _fp_grad(norm: MinkowskiNorm, gx, gy, p: float, eps: float):
    f, w1, w2 = norm.value_wgrad2(gx, gy)
    s = f * f
    r = np.sqrt(s + eps * eps)
    fe = np.divide(s, r + eps, out=np.zeros_like(s), where=(r + eps) > 0.0)
    fp = _pow(fe, p)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = p * _pow(fe, p - 1.0) / r
    c = np.where(r > 0.0, c, 0.0)
    return fp, c * w1, c * w2


def grad_energy(psi: np.ndarray, grid: Grid, norm: MinkowskiNorm, p: float,
                eps: float = 0.0) -> float:
    """sum over triangles of area * F_eps(grad psi)^p (the Dirichlet part)."""
    gxl, gyl, gxu, gyu = _tri_gradients(psi, grid.hx, grid.hy)
    w = 0.5 * grid.cell_area
    return float(w * (_fp(norm, gxl, gyl, p, eps).sum()
                      + _fp(norm, gxu, gyu, p, eps).sum()))


def _grad_energy_with_grad(psi, grid, norm, p, eps):
    gxl, gyl, gxu, gyu = _tri_gradients(psi, grid.hx, grid.hy)
    fpl, ax, ay = _fp_grad(norm, gxl, gyl, p, eps)
    fpu, bx, by = _fp_grad(norm, gxu, gyu, p, eps)
    w = 0.5 * grid.cell_area
    val = float(w * (fpl.sum() + fpu.sum()))
    cx = w / grid.hx
    cy = w / grid.hy
    g = np.zeros_like(psi)
    g[1:, :-1] += cx * ax
    g[:-1, :-1] -= cx * ax + cy * ay
    g[:-1, 1:] += cy * ay
    g[1:, 1:] += cx * bx + cy * by
    g[:-1, 1:] -= cx * bx
    g[1:, :-1] -= cy * by
    return val, g


# -- preconditioner and prolongation -----------------------------------------


def _make_precond(grid: Grid):
    """Inverse of the 5-point Laplacian on the full bounding grid (zero BC).

    Applied through DST-I diagonalization; restricted to the mask on the
    way out.  On rectangle-aligned domains this is the exact inverse of
    the p=2 Euclidean Hessian, elsewhere a spectrally equivalent one.
    """
    m1, m2 = grid.nx - 2, grid.ny - 2
    lam1 = (2.0 - 2.0 * np.cos(np.pi * np.arange(1, m1 + 1) / (m1 + 1))) \
        / (grid.hx * grid.hx)
    lam2 = (2.0 - 2.0 * np.cos(np.pi * np.arange(1, m2 + 1) / (m2 + 1))) \
        / (grid.hy * grid.hy)
    den = lam1[:, None] + lam2[None, :]
    mask = grid.mask

    def apply(g: np.ndarray) -> np.ndarray:
        z = np.zeros_like(g)
        z[1:-1, 1:-1] = idstn(dstn(g[1:-1, 1:-1], type=1, workers=-1) / den,
                              type=1, workers=-1)
        z[~mask] = 0.0
        return z

    return apply


def _prolong(values: np.ndarray, coarse: Grid, fine: Grid) -> np.ndarray:
    ii = (fine.x - coarse.x[0]) / coarse.hx
    jj = (fine.y - coarse.y[0]) / coarse.hy
    ci, cj = np.meshgrid(ii, jj, indexing="ij")
    out = map_coordinates(values, [ci, cj], order=1, mode="nearest")
    out[~fine.mask] = 0.0
    return out


def _bbox_seed(grid: Grid) -> np.ndarray:
    x, y = grid.x, grid.y
    sx = (x - x[0]) * (x[-1] - x)
    sy = (y - y[0]) * (y[-1] - y)
    seed = np.maximum(sx[:, None] * sy[None, :], 0.0)
    seed[~grid.mask] = 0.0
    return seed


# -- descent engine -----------------------------------------------------------


class _DescentProblem:
    """Shared state for the monotone preconditioned descent."""

    clamp = False

    def __init__(self, grid: Grid, norm: MinkowskiNorm, p: float, eps: float):
        self.grid = grid
        self.norm = norm
        self.p = p
        self.eps = eps
        self.precond = _make_precond(grid)
        self.quadratic = p == 2.0 and norm.is_quadratic()

    def feasible(self, psi: np.ndarray) -> np.ndarray:
        out = psi.copy()
        if self.clamp:
            np.clip(out, 0.0, None, out=out)
        out[~self.grid.mask] = 0.0
        return out


class _EigenProblem(_DescentProblem):
    clamp = True

    def prepare(self, psi):
        psi = self.feasible(psi)
        d = self.denom(psi)
        if d <= 0.0:
            psi = self.feasible(_bbox_seed(self.grid))
            d = self.denom(psi)
        return psi / d ** (1.0 / self.p)

    def denom(self, psi) -> float:
        v = np.abs(psi[self.grid.mask])
        return float(self.grid.cell_area * _pow(v, self.p).sum())

    def value(self, psi) -> float:
        # iterates are kept denominator-normalized
        return grad_energy(psi, self.grid, self.norm, self.p, self.eps)

    def value_grad(self, psi):
        num, gn = _grad_energy_with_grad(psi, self.grid, self.norm, self.p,
                                         self.eps)
        p = self.p
        gd = p * self.grid.cell_area * np.sign(psi) * _pow(np.abs(psi), p - 1.0)
        g = gn - num * gd  # denominator is 1 by normalization
        g[~self.grid.mask] = 0.0
        return num, g

    def step_candidates(self, psi, d, f, slope, alpha0):
        if self.quadratic:
            # numerator and denominator are quadratic forms along the ray,
            # and the cross terms follow from the quotient slope: with the
            # iterate normalized, <gradN, d> = slope + 2 f e / cell terms
            n_d = grad_energy(d, self.grid, self.norm, self.p, self.eps)
            w = self.grid.cell_area
            m = self.grid.mask
            e = w * float((psi[m] * d[m]).sum())
            dd = w * float((d[m] * d[m]).sum())
            b = 0.5 * slope + f * e
            alphas = _rational_minimizers(n_d, b, f, dd, e, 1.0)
            if alphas:
                return alphas
        if alpha0 is not None and alpha0 > 0:
            return [alpha0]
        nrm_d = float(np.abs(d).max())
        nrm_p = float(np.abs(psi).max())
        return [0.5 * (nrm_p + 1e-30) / (nrm_d + 1e-30)]

    def accept(self, psi, d, alpha):
        cand = self.feasible(psi + alpha * d)
        dc = self.denom(cand)
        if dc <= 0.0:
            return None, math.inf
        cand /= dc ** (1.0 / self.p)
        return cand, self.value(cand)


class _TorsionProblem(_DescentProblem):
    clamp = False

    def prepare(self, psi):
        return self.feasible(psi)

    def value(self, psi) -> float:
        num = grad_energy(psi, self.grid, self.norm, self.p, self.eps)
        return num / self.p - self.grid.cell_area * float(psi[self.grid.mask].sum())

    def value_grad(self, psi):
        num, gn = _grad_energy_with_grad(psi, self.grid, self.norm, self.p,
                                         self.eps)
        g = gn / self.p
        g[self.grid.mask] -= self.grid.cell_area
        g[~self.grid.mask] = 0.0
        val = num / self.p - self.grid.cell_area * float(psi[self.grid.mask].sum())
        return val, g

    def step_candidates(self, psi, d, f, slope, alpha0):
        if self.quadratic:
            n_d = grad_energy(d, self.grid, self.norm, self.p, self.eps)
            if n_d > 0:
                return [-slope / n_d]
        if alpha0 is not None and alpha0 > 0:
            return [alpha0]
        return [1.0]  # growth/backtracking probes fix a bad scale

    def accept(self, psi, d, alpha):
        cand = self.feasible(psi + alpha * d)
        return cand, self.value(cand)


def _rational_minimizers(a, b, c, dd, e, f) -> list[float]:
    """Positive stationary steps of (c + 2b t + a t^2)/(f + 2e t + dd t^2)."""
    a2 = a * e - b * dd
    a1 = a * f - c * dd
    a0 = b * f - c * e
    roots: list[float] = []
    if abs(a2) > 1e-300:
        disc = a1 * a1 - 4.0 * a2 * a0
        if disc >= 0.0:
            rt = math.sqrt(disc)
            roots = [(-a1 + rt) / (2.0 * a2), (-a1 - rt) / (2.0 * a2)]
    elif abs(a1) > 1e-300:
        roots = [-a0 / a1]

    def ratio(t):
        den = f + 2.0 * e * t + dd * t * t
        if den <= 0.0:
            return math.inf
        return (c + 2.0 * b * t + a * t * t) / den

    good = [t for t in roots if t > 0.0 and math.isfinite(ratio(t))]
    good.sort(key=ratio)
    return good


def _descend(problem: _DescentProblem, psi0: np.ndarray, tol: float,
             max_iter: int):
    """Monotone preconditioned CG descent; returns (psi, value, iters, residual, converged)."""
    psi = problem.prepare(psi0)
    f, g = problem.value_grad(psi)
    hist = [f]
    z = problem.precond(g)
    d = -z
    gz = float((g * z).sum())
    alpha_prev = None
    it = 0
    converged = False
    residual = math.inf
    while it < max_iter:
        it += 1
        if gz <= 0.0:  # zero projected gradient: stationary
            residual = _window_residual(hist)
            converged = True
            break
        slope = float((g * d).sum())
        if slope >= 0.0:
            d = -z
            slope = -gz
        accepted = False
        a = math.nan
        cand = fc = None
        for direction in (d, -z):
            for alpha in problem.step_candidates(psi, direction, f,
                                                 float((g * direction).sum()),
                                                 alpha_prev):
                a = alpha
                cand, fc = problem.accept(psi, direction, a)
                halvings = 0
                while (cand is None or not fc < f) and halvings < 60:
                    a *= 0.5
                    halvings += 1
                    cand, fc = problem.accept(psi, direction, a)
                if cand is None or not fc < f:
                    continue
                if halvings == 0 and not problem.quadratic:
                    for _ in range(40):  # a bad scale guess: probe growth
                        cand2, fc2 = problem.accept(psi, direction, 2.0 * a)
                        if cand2 is None or not fc2 < fc:
                            break
                        a *= 2.0
                        cand, fc = cand2, fc2
                accepted = True
                break
            if accepted:
                d = direction
                break
        if not accepted:
            # not even the preconditioned gradient improves the value at
            # float scale: the iterate is a numerical stationary point
            residual = float(np.finfo(float).eps)
            converged = True
            break
        alpha_prev = a
        psi = cand
        hist.append(fc)
        f, gn = problem.value_grad(psi)
        zn = problem.precond(gn)
        beta = float((gn * (zn - z)).sum()) / gz
        beta = max(beta, 0.0)
        if not math.isfinite(beta) or beta > 10.0:
            beta = 0.0
        d = -zn + beta * d
        g, z = gn, zn
        gz = float((g * z).sum())
        if len(hist) > WINDOW:
            residual = _window_residual(hist)
            if residual < tol:
                converged = True
                break
    else:
        residual = _window_residual(hist)
    return psi, hist[-1], it, residual, converged


def _window_residual(hist) -> float:
    if len(hist) < 2:
        return math.inf
    w = min(WINDOW, len(hist) - 1)
    drop = hist[-1 - w] - hist[-1]
    return abs(drop) / max(abs(hist[-1]), 1e-300)


def _grid_hierarchy(poly: ConvexPolygon, h: float, max_levels: int = 6):
    grids = [build_grid(poly, h)]
    while len(grids) < max_levels:
        try:
            grids.append(build_grid(poly, grids[-1].h * 2.0, min_axis=24))
        except CoarseGridError:
            break
    return grids  # fine -> coarse


# -- public solver results ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class EigenResult:
    """First Dirichlet eigenvalue and eigenfield, normalized to max u = 1."""

    lambda_: float
    u: GridField
    iterations: int
    residual: float
    p: float
    norm_id: str
    domain_id: str
    converged: bool


@dataclass(frozen=True, eq=False)
class TorsionResult:
    """Torsion field v, its integral T, maximum Mv, and the dual energy."""

    v: GridField
    T: float
    Mv: float
    T_dual: float
    iterations: int
    residual: float
    p: float
    norm_id: str
    domain_id: str
    converged: bool


def _eps_for(poly: ConvexPolygon, norm: MinkowskiNorm, p: float) -> float:
    if p == 2.0 and norm.is_quadratic():
        return 0.0  # the energy is already smooth (quadratic)
    return EPS_FACTOR * poly.diameter


def solve_eigen(poly: ConvexPolygon, norm: MinkowskiNorm, p: float, h: float,
                tol: float = 1e-8, max_iter: int = 50_000,
                raise_on_fail: bool = True) -> EigenResult:
    """Minimize the discrete Rayleigh quotient; returns max-normalized u.

    The reported eigenvalue re-evaluates the quotient of the minimizer at
    eps = 0.  Raises ConvergenceError (carrying the partial result) when
    the windowed tolerance is not met within ``max_iter`` total iterations,
    unless ``raise_on_fail`` is false.
    """
    if not (p > 1.0):
        raise ValueError("p must exceed 1")
    grids = _grid_hierarchy(poly, h)
    eps = _eps_for(poly, norm, p)
    psi = _bbox_seed(grids[-1])
    total_it = 0
    residual = math.inf
    converged = False
    for lvl in range(len(grids) - 1, -1, -1):
        grid = grids[lvl]
        budget = 3000 if lvl > 0 else max(max_iter - total_it, WINDOW + 5)
        prob = _EigenProblem(grid, norm, p, eps)
        psi, _, it, residual, converged = _descend(prob, psi, tol, budget)
        total_it += it
        if lvl > 0:
            psi = _prolong(psi, grid, grids[lvl - 1])
    grid = grids[0]
    umax = float(psi.max())
    if umax <= 0.0:
        raise ConvergenceError("eigen iteration produced a null field")
    u = psi / umax
    num = grad_energy(u, grid, norm, p, eps=0.0)
    den = grid.cell_area * float(_pow(u[grid.mask], p).sum())
    lam = num / den
    result = EigenResult(lambda_=lam, u=GridField(grid, u), iterations=total_it,
                         residual=residual, p=p, norm_id=norm.spec_string(),
                         domain_id=poly.provenance, converged=converged)
    if not converged and raise_on_fail:
        raise ConvergenceError(
            f"eigen solve on {poly.provenance} did not converge "
            f"(residual {residual:.2e} after {total_it} iterations)", result)
    return result


def solve_torsion(poly: ConvexPolygon, norm: MinkowskiNorm, p: float, h: float,
                  tol: float = 1e-8, max_iter: int = 50_000,
                  raise_on_fail: bool = True) -> TorsionResult:
    """Minimize J(v) = (1/p) sum F_eps(grad v)^p - sum v over zero-boundary fields."""
    if not (p > 1.0):
        raise ValueError("p must exceed 1")
    grids = _grid_hierarchy(poly, h)
    eps = _eps_for(poly, norm, p)
    psi = np.zeros((grids[-1].nx, grids[-1].ny))
    total_it = 0
    residual = math.inf
    converged = False
    for lvl in range(len(grids) - 1, -1, -1):
        grid = grids[lvl]
        budget = 3000 if lvl > 0 else max(max_iter - total_it, WINDOW + 5)
        prob = _TorsionProblem(grid, norm, p, eps)
        psi, _, it, residual, converged = _descend(prob, psi, tol, budget)
        total_it += it
        if lvl > 0:
            psi = _prolong(psi, grid, grids[lvl - 1])
    grid = grids[0]
    mv = float(psi.max())
    # clip pure float noise; genuine sign defects are left visible
    noise = psi < 0.0
    if noise.any() and float(psi.min()) > -1e-12 * max(mv, 1.0):
        psi = psi.copy()
        psi[noise] = 0.0
    t_int = grid.cell_area * float(psi[grid.mask].sum())
    t_dual = grad_energy(psi, grid, norm, p, eps=0.0)
    result = TorsionResult(v=GridField(grid, psi), T=t_int, Mv=mv,
                           T_dual=t_dual, iterations=total_it, residual=residual,
                           p=p, norm_id=norm.spec_string(),
                           domain_id=poly.provenance, converged=converged)
    if not converged and raise_on_fail:
        raise ConvergenceError(
            f"torsion solve on {poly.provenance} did not converge "
            f"(residual {residual:.2e} after {total_it} iterations)", result)
    return result


# -- derived checks ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PFunctionResult:
    """Gradient-maximum field (p-1)F^p(grad u) + lambda (u^p - 1).

    The interior maximum principle predicts nonpositive values away from
    the boundary; ``max_interior`` excludes the one-node collar where the
    central-difference stencil straddles the Dirichlet kink.
    """

    field: GridField
    valid: np.ndarray
    max_interior: float


def p_function(result: EigenResult, norm: MinkowskiNorm,
               p: float) -> PFunctionResult:
    grid = result.u.grid
    u = result.u.values
    gx = (u[2:, 1:-1] - u[:-2, 1:-1]) / (2.0 * grid.hx)
    gy = (u[1:-1, 2:] - u[1:-1, :-2]) / (2.0 * grid.hy)
    f = norm.value2(gx, gy)
    inner = (p - 1.0) * np.power(f, p) + result.lambda_ * (
        np.power(np.abs(u[1:-1, 1:-1]), p) - 1.0)
    values = np.zeros_like(u)
    values[1:-1, 1:-1] = inner
    m = grid.mask
    valid = np.zeros_like(m)
    valid[1:-1, 1:-1] = (m[1:-1, 1:-1] & m[2:, 1:-1] & m[:-2, 1:-1]
                         & m[1:-1, 2:] & m[1:-1, :-2])
    values[~m] = 0.0
    max_interior = float(values[valid].max()) if valid.any() else math.nan
    return PFunctionResult(field=GridField(grid, values), valid=valid,
                           max_interior=max_interior)


def phi_profile(s, p: float):
    """The comparison profile Phi(s) on [0, 1] (eigenfield normalized to 1).

    Phi(s) = (pi_p/2)^q - I(s)^q with q = p/(p-1) and I(s) the remaining
    arclength integral from s to the maximum; I reduces to an incomplete
    Beta function, so no quadrature is needed: I(s) = (pi_p/2) *
    (1 - betainc(1/p, 1 - 1/p, s^p)).  Phi(0) = 0 and Phi(1) = (pi_p/2)^q.
    """
    if not (p > 1.0):
        raise ValueError("p must exceed 1")
    s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
    q = p / (p - 1.0)
    half_pi_p = 0.5 * pi_p(p)
    inner = half_pi_p * (1.0 - betainc(1.0 / p, 1.0 - 1.0 / p, np.power(s, p)))
    out = half_pi_p**q - np.power(inner, q)
    return float(out) if out.ndim == 0 else out


def phi_check(eigen: EigenResult, torsion: TorsionResult,
              p: float) -> tuple[float, float]:
    """Pointwise comparison Phi(u) <= q lambda^(1/(p-1)) v and the slab constant.

    Returns (max over nodes of the left side minus the right side, which
    should not exceed the grid tolerance, and the one-dimensional lower
    bound ((p-1)/p)^(p-1) (pi_p/2)^p for comparison with lambda * Mv^(p-1)).
    """
    gu, gv = eigen.u.grid, torsion.v.grid
    if not gu.same_layout(gv):
        raise ValueError("eigen and torsion fields live on different grids")
    q = p / (p - 1.0)
    lhs = phi_profile(eigen.u.values, p)
    rhs = q * eigen.lambda_ ** (1.0 / (p - 1.0)) * torsion.v.values
    viol = lhs - rhs
    max_violation = float(viol[gu.mask].max())
    payne_lhs = ((p - 1.0) / p) ** (p - 1.0) * (0.5 * pi_p(p)) ** p
    return max_violation, payne_lhs


def efficiency_ratio(eigen: EigenResult, area: float, p: float) -> float:
    """E = (integral of u^(p-1))^(1/(p-1)) / (|domain|^(1/(p-1)) max u)."""
    s = eigen.u.integral(power=p - 1.0)
    return (s ** (1.0 / (p - 1.0))) / (area ** (1.0 / (p - 1.0)))


def mass_bound_check(eigen: EigenResult, area: float, p: float) -> float:
    """p * integral(u^p) / (max u^p * |domain|); at most 1 by the maximum principle."""
    return p * eigen.u.integral(power=p) / area
