"""Case harness: inequality audits, slab-limit sweeps, convergence studies.

``run_case`` solves one (domain, gauge, p) case end to end - eigenvalue,
torsion, distance field, Cheeger estimate - then scores the full set of
sixteen geometric/spectral inequalities with explicit slack against the
per-id tolerance budget.  Solver non-convergence marks the case
``inconclusive`` instead of failed, so numerical trouble never
masquerades as a counterexample.

Reports are plain dict/JSON-serializable structures whose serialized
form is byte-identical across reruns of the same spec (no timestamps,
sorted keys, deterministic reductions).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .cheeger import CheegerResult, cheeger_estimate
from .config import DEFAULTS, INEQUALITY_NAMES, ToleranceTable
from .geometry import ConvexPolygon, distance_field, parse_domain
from .norms import MinkowskiNorm, pi_p
from .pde import (ConvergenceError, EigenResult, TorsionResult,
                  efficiency_ratio, mass_bound_check, p_function, phi_check,
                  solve_eigen, solve_torsion)

N_DIM = 2


@dataclass(frozen=True)
class CaseSpec:
    """One catalog entry: domain grammar, gauge grammar, p, and overrides."""

    domain: str
    norm: str
    p: float
    h: float | None = None
    tol: float = DEFAULTS["tol"]
    sweep_m: int = DEFAULTS["sweep_m"]

    def __post_init__(self):
        if not (self.p > 1.0):
            raise ValueError("p must exceed 1")
        if self.h is not None and not (self.h > 0):
            raise ValueError("h must be positive")

    @property
    def case_id(self) -> str:
        return f"{self.domain}|{self.norm}|p={self.p:g}"

    def build(self) -> tuple[ConvexPolygon, MinkowskiNorm, float]:
        gauge = MinkowskiNorm.parse(self.norm)
        poly = parse_domain(self.domain, norm=gauge)
        h = self.h if self.h is not None else \
            poly.diameter * DEFAULTS["h_over_diameter"]
        return poly, gauge, h


def default_catalog() -> list[CaseSpec]:
    """Square, tall rectangle, hexagon, Wulff shape x three gauges x three p."""
    domains = ["rect:1,1", "rect:1,4", "regular:6,1",
               f"wulff:1,{DEFAULTS['wulff_vertices']}"]
    norms = ["lq:2", "lq:4", "ellipse:4,0,1"]
    ps = [1.5, 2.0, 3.0]
    return [CaseSpec(d, n, p) for d in domains for n in norms for p in ps]


@dataclass(frozen=True, eq=False)
class InequalityReport:
    """Scored inequality records plus case metadata and solver diagnostics."""

    case: dict
    geometry: dict
    solver: dict
    records: tuple[dict, ...]
    status: str  # "pass" | "fail" | "inconclusive"

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> str:
        payload = {
            "case": self.case,
            "geometry": self.geometry,
            "solver": self.solver,
            "records": list(self.records),
            "status": self.status,
        }
        return json.dumps(payload, sort_keys=True, indent=1)

    def record(self, ineq_id: str) -> dict:
        for rec in self.records:
            if rec["id"] == ineq_id:
                return rec
        raise KeyError(ineq_id)


def _record(ineq_id: str, lhs: float, rhs: float, tols: ToleranceTable,
            h: float, parts: list | None = None, note: str | None = None) -> dict:
    slack = rhs - lhs
    if parts:
        slack = min(p["rhs"] - p["lhs"] for p in parts)
    tol = tols.budget(ineq_id, rhs, h)
    rec = {
        "id": ineq_id,
        "name": INEQUALITY_NAMES[ineq_id],
        "lhs": lhs,
        "rhs": rhs,
        "slack": slack,
        "tolerance": tol,
        "passed": bool(slack >= -tol) and math.isfinite(slack),
    }
    if parts:
        rec["parts"] = parts
    if note:
        rec["note"] = note
    return rec


def evaluate_inequalities(poly: ConvexPolygon, gauge: MinkowskiNorm, p: float,
                          eigen: EigenResult, torsion: TorsionResult,
                          cheeger: CheegerResult, h: float,
                          tols: ToleranceTable) -> tuple[dict, ...]:
    """Score the sixteen checks from solved fields and exact geometry."""
    lam = eigen.lambda_
    mv = torsion.Mv
    t_rig = torsion.T
    area = poly.area
    per = poly.perimeter_F(gauge)
    r_f = cheeger.inradius
    kappa = gauge.wulff_area()
    r_vol = math.sqrt(area / kappa)
    q = p / (p - 1.0)
    half_pi = 0.5 * pi_p(p)
    h_est = cheeger.h_est
    eff = efficiency_ratio(eigen, area, p)
    mass = mass_bound_check(eigen, area, p)

    recs = [
        _record("hersch", half_pi**p / r_f**p, lam, tols, h),
        _record("cheeger", (h_est / p) ** p, lam, tols, h,
                note="left side uses the upper Cheeger estimate"),
        _record("better_cheeger", (half_pi * h_est / N_DIM) ** p, lam, tols, h,
                note="better than the classic constant iff p*pi_p >= 2N; "
                     f"here p*pi_p = {p * pi_p(p):.6g} vs 2N = {2 * N_DIM}"),
        _record("reverse_cheeger", lam, half_pi**p * h_est**p, tols, h),
        _record("perimeter_upper", lam, (half_pi * per / area) ** p, tols, h),
        _record("payne", ((p - 1.0) / p) ** (p - 1.0) * half_pi**p,
                lam * mv ** (p - 1.0), tols, h),
        _record("functional_chain", lam * (t_rig / area) ** (p - 1.0),
                (area * mv / t_rig) ** (p - 1.0), tols, h, parts=[
                    {"name": "torsion mean below max",
                     "lhs": lam * (t_rig / area) ** (p - 1.0),
                     "rhs": lam * mv ** (p - 1.0)},
                    {"name": "eigen-torsion product bound",
                     "lhs": lam * mv ** (p - 1.0),
                     "rhs": (area * mv / t_rig) ** (p - 1.0)},
                ]),
        _record("efficiency_power", eff**p, 1.0 / p, tols, h),
        _record("efficiency_sharp", eff,
                (p - 1.0) ** (-1.0 / p) * (1.0 / half_pi) ** (1.0 / (p - 1.0)),
                tols, h),
        _record("inradius_lower", 1.0 / r_f, h_est, tols, h),
        _record("inradius_upper", h_est, N_DIM / r_f, tols, h),
        _record("faber_krahn", N_DIM / r_vol, h_est, tols, h),
        _record("stability", h_est - N_DIM / r_vol,
                N_DIM * (1.0 / r_f - 1.0 / r_vol), tols, h),
        _record("torsion_max", r_f**q / (q * N_DIM ** (q - 1.0)), r_f**q / q,
                tols, h, parts=[
                    {"name": "torsion max lower bound",
                     "lhs": r_f**q / (q * N_DIM ** (q - 1.0)), "rhs": mv},
                    {"name": "torsion max upper bound",
                     "lhs": mv, "rhs": r_f**q / q},
                ]),
        _record("isoperimetric",
                N_DIM * kappa ** (1.0 / N_DIM) * area ** (1.0 - 1.0 / N_DIM),
                per, tols, h),
        _record("mass_concentration", mass, 1.0, tols, h),
    ]
    return tuple(recs)


def run_case(spec: CaseSpec,
             tols: ToleranceTable | None = None) -> InequalityReport:
    """Solve one case and score every inequality record.

    Solver non-convergence is caught: the partial fields still produce a
    report, but with status "inconclusive" so failures stay separated
    from numerics.
    """
    tols = tols or ToleranceTable()
    poly, gauge, h = spec.build()
    inconclusive = False
    try:
        eigen = solve_eigen(poly, gauge, spec.p, h, tol=spec.tol)
    except ConvergenceError as exc:
        eigen = exc.result
        inconclusive = True
    try:
        torsion = solve_torsion(poly, gauge, spec.p, h, tol=spec.tol)
    except ConvergenceError as exc:
        torsion = exc.result
        inconclusive = True

    xmin, xmax, ymin, ymax = poly.bounding_box
    h_dist = min(h, min(xmax - xmin, ymax - ymin)
                 / DEFAULTS["distance_axis_nodes"])
    field = distance_field(poly, gauge, h_dist)
    ch = cheeger_estimate(poly, gauge, m=spec.sweep_m)

    records = evaluate_inequalities(poly, gauge, spec.p, eigen, torsion, ch, h,
                                    tols)
    pf = p_function(eigen, gauge, spec.p)
    phi_viol, payne_lhs = phi_check(eigen, torsion, spec.p)

    case = {
        "id": spec.case_id,
        "domain": spec.domain,
        "norm": spec.norm,
        "p": spec.p,
        "h": h,
        "tol": spec.tol,
    }
    geometry = {
        "area": poly.area,
        "perimeter_F": poly.perimeter_F(gauge),
        "inradius_F": ch.inradius,
        "wulff_area": gauge.wulff_area(),
        "diameter": poly.diameter,
        "grid_inradius": field.inradius,
        "grid_argmax": [float(field.argmax[0]), float(field.argmax[1])],
        "cheeger_estimate": ch.h_est,
        "cheeger_lower": ch.lower,
        "cheeger_upper": ch.upper,
        "cheeger_r_star": ch.r_star,
    }
    solver = {
        "lambda": eigen.lambda_,
        "eigen_iterations": eigen.iterations,
        "eigen_residual": eigen.residual,
        "eigen_converged": eigen.converged,
        "T": torsion.T,
        "T_dual": torsion.T_dual,
        "Mv": torsion.Mv,
        "torsion_iterations": torsion.iterations,
        "torsion_residual": torsion.residual,
        "torsion_converged": torsion.converged,
        "efficiency": efficiency_ratio(eigen, poly.area, spec.p),
        "mass_ratio": mass_bound_check(eigen, poly.area, spec.p),
        "p_function_max": pf.max_interior,
        "phi_violation": phi_viol,
        "payne_slab_constant": payne_lhs,
        "h": h,
    }
    if inconclusive:
        status = "inconclusive"
    else:
        status = "pass" if all(r["passed"] for r in records) else "fail"
    return InequalityReport(case=case, geometry=geometry, solver=solver,
                            records=records, status=status)


def aggregate_csv_rows(reports: list[InequalityReport]) -> list[str]:
    """One CSV row per case x inequality, header first.

    Case ids carry commas (domain parameters), so that field is quoted.
    """
    rows = ["case,inequality,lhs,rhs,slack,tolerance,passed,status"]
    for rep in reports:
        for rec in rep.records:
            rows.append(
                f"\"{rep.case['id']}\",{rec['id']},{rec['lhs']:.12g},"
                f"{rec['rhs']:.12g},{rec['slack']:.12g},"
                f"{rec['tolerance']:.12g},{int(rec['passed'])},{rep.status}")
    return rows


# -- slab-limit optimality sweep ------------------------------------------------


def slab_sweep(a: float, gauge: MinkowskiNorm, p: float, ks: list[float],
               h: float | None = None, sweep_m: int = DEFAULTS["sweep_m"],
               tol: float = DEFAULTS["tol"]) -> list[dict]:
    """Optimality ratios of the rectangle family ]-a,a[ x ]-k,k[ per k.

    r1 = lambda R_F^p / (pi_p/2)^p            (inradius lower bound)
    r2 = h_est * R_F                          (Cheeger inradius lower bound)
    r3 = P_F R_F / area                       (perimeter-inradius bound)
    r4 = lambda Mv^(p-1) / slab constant      (torsion-max bound)

    All four tend to 1 from above as k grows; the grid is tied to the
    short side (h = 2a * slab_h_fraction by default) so the accuracy is
    k-independent.
    """
    from .geometry import rect_ratio_limit

    rect_ratio_limit(a, gauge)  # warns when the alignment identity fails
    half_pi = 0.5 * pi_p(p)
    payne_const = ((p - 1.0) / p) ** (p - 1.0) * half_pi**p
    h_eff = h if h is not None else 2.0 * a * DEFAULTS["slab_h_fraction"]
    rows = []
    for k in ks:
        poly = ConvexPolygon.rectangle(a, k)
        r_f, _ = poly.inradius_F(gauge)
        expect_rf = a * float(gauge.polar_eval(np.array([1.0, 0.0])))
        if abs(r_f - expect_rf) > 1e-9 * max(expect_rf, 1.0):
            import warnings

            warnings.warn(f"slab sweep at k={k:g}: inradius {r_f:g} is not "
                          f"a*F°(e1)={expect_rf:g}; the limit formulas assume "
                          "the short direction dominates", stacklevel=2)
        eigen = solve_eigen(poly, gauge, p, h_eff, tol=tol)
        torsion = solve_torsion(poly, gauge, p, h_eff, tol=tol)
        ch = cheeger_estimate(poly, gauge, m=sweep_m)
        rows.append({
            "k": float(k),
            "r1": eigen.lambda_ * r_f**p / half_pi**p,
            "r2": ch.h_est * r_f,
            "r3": poly.perimeter_F(gauge) * r_f / poly.area,
            "r4": eigen.lambda_ * torsion.Mv ** (p - 1.0) / payne_const,
        })
    return rows


def sweep_csv_rows(rows: list[dict]) -> list[str]:
    out = ["k,r1,r2,r3,r4"]
    for row in rows:
        out.append(f"{row['k']:g},{row['r1']:.12g},{row['r2']:.12g},"
                   f"{row['r3']:.12g},{row['r4']:.12g}")
    return out


# -- grid convergence study ----------------------------------------------------


@dataclass(frozen=True)
class ConvergenceEntry:
    quantity: str
    hs: tuple[float, ...]
    values: tuple[float, ...]
    order: float
    richardson: float
    monotone: bool


def convergence_study(spec: CaseSpec,
                      hs: list[float]) -> dict[str, ConvergenceEntry]:
    """Observed order and Richardson value for lambda, Mv, T over >= 3 grids.

    Grids must refine by a uniform factor (h[i]/h[i+1] constant); the
    order comes from the last three levels and a non-monotone value
    sequence is flagged via ``monotone``.
    """
    if len(hs) < 3:
        raise ValueError("convergence study needs at least 3 grid levels")
    hs = sorted(float(h) for h in hs)[::-1]  # coarse -> fine
    ratios = [hs[i] / hs[i + 1] for i in range(len(hs) - 1)]
    if any(abs(r - ratios[0]) > 1e-9 * ratios[0] for r in ratios):
        raise ValueError("grid levels must refine by a uniform ratio")
    rho = ratios[0]
    poly, gauge, _ = spec.build()
    lam, mvs, ts = [], [], []
    for h in hs:
        eigen = solve_eigen(poly, gauge, spec.p, h, tol=spec.tol)
        torsion = solve_torsion(poly, gauge, spec.p, h, tol=spec.tol)
        lam.append(eigen.lambda_)
        mvs.append(torsion.Mv)
        ts.append(torsion.T)

    out = {}
    for name, vals in (("lambda", lam), ("Mv", mvs), ("T", ts)):
        v1, v2, v3 = vals[-3], vals[-2], vals[-1]
        d12, d23 = v2 - v1, v3 - v2
        if d12 == 0.0 or d23 == 0.0 or (d12 > 0) != (d23 > 0):
            order = math.nan
            rich = v3
            monotone = False
        else:
            order = math.log(abs(d12) / abs(d23)) / math.log(rho)
            rich = v3 + d23 / (rho**order - 1.0)
            diffs = np.diff(vals)
            monotone = bool(np.all(diffs > 0) or np.all(diffs < 0))
        out[name] = ConvergenceEntry(quantity=name, hs=tuple(hs),
                                     values=tuple(vals), order=order,
                                     richardson=rich, monotone=monotone)
    return out
