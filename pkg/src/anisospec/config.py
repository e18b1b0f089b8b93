"""Central defaults and the per-inequality tolerance table.

Every tunable default lives here:

===================  =========  ==================================================
name                 default    meaning
===================  =========  ==================================================
h_over_diameter      1/128      grid spacing = diameter(domain) / 128 when unset
tol                  1e-8       solver window tolerance (relative, 25 iterations)
max_iter             50000      total iteration budget per solve
sweep_m              64         coarse samples of the Cheeger radius sweep
wulff_vertices       256        default polygon resolution of Wulff domains
distance_axis_nodes  36         distance fields refine h until >= this per axis
slab_h_fraction      1/128      slab sweeps: h = (short side) * this
===================  =========  ==================================================

An inequality check passes when  slack >= -(rel * |rhs| + c * h);  ``rel``
defaults to 1e-6 everywhere, and the grid coefficient ``c`` separates
records fed by solver output (c = 1) from records evaluated in exact
polygon arithmetic (c = 1e-3).  Both can be overridden per id via config
files.
"""

from __future__ import annotations

from dataclasses import dataclass, field

DEFAULTS = {
    "h_over_diameter": 1.0 / 128.0,
    "tol": 1e-8,
    "max_iter": 50_000,
    "sweep_m": 64,
    "wulff_vertices": 256,
    "distance_axis_nodes": 36,
    "slab_h_fraction": 1.0 / 128.0,
}

#: inequality id -> (relative part, grid coefficient c of the slack budget)
INEQUALITY_TOLERANCES: dict[str, tuple[float, float]] = {
    "hersch": (1e-6, 1.0),
    "cheeger": (1e-6, 1.0),
    "better_cheeger": (1e-6, 1.0),
    "reverse_cheeger": (1e-6, 1.0),
    "perimeter_upper": (1e-6, 1.0),
    "payne": (1e-6, 1.0),
    "functional_chain": (1e-6, 1.0),
    "efficiency_power": (1e-6, 1.0),
    "efficiency_sharp": (1e-6, 1.0),
    "inradius_lower": (1e-6, 1e-3),
    "inradius_upper": (1e-6, 1e-3),
    "faber_krahn": (1e-6, 1e-3),
    "stability": (1e-6, 1e-3),
    "torsion_max": (1e-6, 1.0),
    "isoperimetric": (1e-6, 1e-3),
    "mass_concentration": (1e-6, 1.0),
}

INEQUALITY_NAMES: dict[str, str] = {
    "hersch": "lambda >= (pi_p/(2 R_F))^p",
    "cheeger": "lambda >= (h_F/p)^p",
    "better_cheeger": "lambda >= (pi_p h_F/(2N))^p",
    "reverse_cheeger": "lambda <= (pi_p h_F/2)^p",
    "perimeter_upper": "lambda <= (pi_p P_F/(2 area))^p",
    "payne": "((p-1)/p)^(p-1) (pi_p/2)^p <= lambda Mv^(p-1)",
    "functional_chain":
        "lambda (T/area)^(p-1) <= lambda Mv^(p-1) <= (area Mv/T)^(p-1)",
    "efficiency_power": "E^p <= 1/p",
    "efficiency_sharp": "E <= (p-1)^(-1/p) (2/pi_p)^(1/(p-1))",
    "inradius_lower": "1/R_F <= h_F",
    "inradius_upper": "h_F <= N/R_F",
    "faber_krahn": "h_F >= h_F(Wulff shape of equal area)",
    "stability": "h_F - h_F(W_vol) <= N (1/R_F - 1/R_vol)",
    "isoperimetric": "P_F >= N kappa^(1/N) area^(1-1/N)",
    "torsion_max": "R_F^q/(q N^(q-1)) <= Mv <= R_F^q/q",
    "mass_concentration": "p integral(u^p) <= max(u)^p area",
}

INEQUALITY_IDS = tuple(INEQUALITY_TOLERANCES)


@dataclass
class ToleranceTable:
    """Resolved slack budgets; overrides shadow the module defaults."""

    overrides: dict[str, tuple[float, float]] = field(default_factory=dict)

    def budget(self, ineq_id: str, rhs: float, h: float) -> float:
        rel, c = self.overrides.get(ineq_id, INEQUALITY_TOLERANCES[ineq_id])
        return rel * abs(rhs) + c * h
