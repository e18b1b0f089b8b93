"""Anisotropic spectral geometry on convex planar domains.

First Dirichlet eigenvalues and torsion functions of the anisotropic
p-Laplacian, Wulff-shape geometry (perimeter, distance, inradius,
erosion), Cheeger-constant bounds and estimates, and a harness that
audits the full family of sharp inequalities tying them together.
"""

from .cheeger import CheegerResult, cheeger_bounds, cheeger_estimate
from .config import DEFAULTS, INEQUALITY_IDS, ToleranceTable
from .geometry import (ConvexPolygon, DistanceField, GeometryError,
                       CoarseGridError, distance_field, parse_domain,
                       rect_ratio_limit, wulff_domain)
from .harness import (CaseSpec, InequalityReport, convergence_study,
                      default_catalog, run_case, slab_sweep)
from .norms import (GaugeError, MinkowskiNorm, WulffPolygon, pi_p,
                    pi_p_quadrature, wulff_polygon)
from .pde import (ConvergenceError, EigenResult, Grid, GridField,
                  PFunctionResult, TorsionResult, build_grid,
                  efficiency_ratio, mass_bound_check, p_function, phi_check,
                  phi_profile, solve_eigen, solve_torsion)

__version__ = "0.1.0"

__all__ = [
    "CaseSpec", "CheegerResult", "CoarseGridError", "ConvergenceError",
    "ConvexPolygon", "DEFAULTS", "DistanceField", "EigenResult", "GaugeError",
    "GeometryError", "Grid", "GridField", "INEQUALITY_IDS",
    "InequalityReport", "MinkowskiNorm", "PFunctionResult", "ToleranceTable",
    "TorsionResult", "WulffPolygon", "build_grid", "cheeger_bounds",
    "cheeger_estimate", "convergence_study", "default_catalog",
    "distance_field", "efficiency_ratio", "mass_bound_check", "p_function",
    "parse_domain", "phi_check", "phi_profile", "pi_p", "pi_p_quadrature",
    "rect_ratio_limit", "run_case", "slab_sweep", "solve_eigen",
    "solve_torsion", "wulff_domain", "wulff_polygon",
]
