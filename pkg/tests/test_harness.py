"""Case reports, determinism, slab sweeps, and convergence studies."""

import math

import pytest

import anisospec.harness as harness
from anisospec.config import INEQUALITY_IDS, ToleranceTable
from anisospec.harness import (CaseSpec, aggregate_csv_rows, convergence_study,
                               default_catalog, run_case, slab_sweep,
                               sweep_csv_rows)
from anisospec.norms import MinkowskiNorm
from anisospec.pde import ConvergenceError

FAST = CaseSpec("rect:1,1", "lq:2", 2.0, h=1.0 / 24.0)


@pytest.fixture(scope="module")
def fast_report():
    return run_case(FAST)


class TestCaseSpec:
    def test_defaults(self):
        spec = CaseSpec("rect:1,1", "lq:2", 2.0)
        poly, gauge, h = spec.build()
        assert h == pytest.approx(poly.diameter / 128.0)
        assert spec.case_id == "rect:1,1|lq:2|p=2"

    def test_validation(self):
        with pytest.raises(ValueError):
            CaseSpec("rect:1,1", "lq:2", 1.0)
        with pytest.raises(ValueError):
            CaseSpec("rect:1,1", "lq:2", 2.0, h=-0.1)

    def test_catalog_shape(self):
        cat = default_catalog()
        assert len(cat) == 36
        assert len({c.case_id for c in cat}) == 36


class TestRunCase:
    def test_all_sixteen_records(self, fast_report):
        ids = [r["id"] for r in fast_report.records]
        assert ids == list(INEQUALITY_IDS)
        assert len(ids) == 16

    def test_record_schema(self, fast_report):
        for rec in fast_report.records:
            for key in ("id", "name", "lhs", "rhs", "slack", "tolerance",
                        "passed"):
                assert key in rec
            assert math.isfinite(rec["slack"])
            assert rec["passed"] == (rec["slack"] >= -rec["tolerance"])

    def test_status_pass(self, fast_report):
        assert fast_report.status == "pass"
        assert fast_report.passed

    def test_two_sided_records_have_parts(self, fast_report):
        assert len(fast_report.record("functional_chain")["parts"]) == 2
        assert len(fast_report.record("torsion_max")["parts"]) == 2

    def test_solver_block(self, fast_report):
        s = fast_report.solver
        assert s["eigen_converged"] and s["torsion_converged"]
        assert s["lambda"] == pytest.approx(math.pi**2 / 2.0, rel=1e-2)
        assert abs(s["T_dual"] - s["T"]) <= 1e-6 * s["T"]

    def test_deterministic_json(self, fast_report):
        again = run_case(FAST)
        assert again.to_json() == fast_report.to_json()

    def test_tolerance_override_can_fail(self):
        tols = ToleranceTable({"mass_concentration": (-2.0, 0.0)})
        rep = run_case(FAST, tols)
        assert rep.status == "fail"
        assert not rep.record("mass_concentration")["passed"]

    def test_inconclusive_on_nonconvergence(self, monkeypatch):
        import anisospec.pde as pde

        real = pde.solve_eigen

        def flaky(*args, **kwargs):
            res = real(*args, **{**kwargs, "raise_on_fail": False})
            raise ConvergenceError("forced", res)

        monkeypatch.setattr(harness, "solve_eigen", flaky)
        rep = run_case(FAST)
        assert rep.status == "inconclusive"

    def test_aggregate_rows(self, fast_report):
        rows = aggregate_csv_rows([fast_report])
        assert rows[0].startswith("case,inequality")
        assert len(rows) == 17
        # the case field is quoted so embedded commas stay one field
        assert rows[1].split('",')[0] == '"rect:1,1|lq:2|p=2'


@pytest.fixture(scope="module")
def rows():
    return slab_sweep(1.0, MinkowskiNorm.lq(2), 2.0, [1, 2, 4], h=1.0 / 24.0)


class TestSlabSweep:

    def test_columns(self, rows):
        for row in rows:
            assert set(row) == {"k", "r1", "r2", "r3", "r4"}

    def test_ratios_above_one(self, rows):
        for row in rows:
            for key in ("r1", "r2", "r3", "r4"):
                assert row[key] >= 1.0 - 1e-3

    def test_nonincreasing(self, rows):
        for key in ("r1", "r2", "r3", "r4"):
            vals = [row[key] for row in rows]
            assert all(a >= b - 1e-9 for a, b in zip(vals, vals[1:]))

    def test_r3_exact(self, rows):
        for row in rows:
            assert row["r3"] == pytest.approx(1.0 + 1.0 / row["k"], rel=1e-9)

    def test_r1_separation_of_variables(self, rows):
        for row in rows:
            assert row["r1"] == pytest.approx(1.0 + 1.0 / row["k"] ** 2,
                                              rel=3e-3)

    def test_csv(self, rows):
        lines = sweep_csv_rows(rows)
        assert lines[0] == "k,r1,r2,r3,r4"
        assert len(lines) == 4

    def test_unaligned_norm_warns(self):
        with pytest.warns(UserWarning):
            slab_sweep(1.0, MinkowskiNorm.ellipse(2, 0.5, 1), 2.0, [1],
                       h=1.0 / 16.0)


class TestConvergence:
    def test_square_second_order(self):
        out = convergence_study(FAST, [1 / 16, 1 / 32, 1 / 64])
        lam = out["lambda"]
        assert 1.8 <= lam.order <= 2.2
        assert lam.richardson == pytest.approx(math.pi**2 / 2.0, rel=5e-4)
        assert lam.monotone
        assert out["Mv"].richardson == pytest.approx(0.294685, rel=2e-3)
        assert out["T"].richardson == pytest.approx(0.562282, rel=2e-3)

    def test_needs_three_levels(self):
        with pytest.raises(ValueError):
            convergence_study(FAST, [1 / 16, 1 / 32])

    def test_uniform_ratio_required(self):
        with pytest.raises(ValueError):
            convergence_study(FAST, [1 / 16, 1 / 32, 1 / 40])

    def test_non_monotone_flagged(self, monkeypatch):
        vals = iter([(2.0, 0.3, 0.5), (1.0, 0.3, 0.5), (1.5, 0.3, 0.5)])

        class FakeEigen:
            def __init__(self, lam):
                self.lambda_ = lam

        class FakeTorsion:
            def __init__(self, mv, t):
                self.Mv, self.T = mv, t

        state = {}

        def fake_eigen(*a, **k):
            lam, mv, t = next(vals)
            state["mt"] = (mv, t)
            return FakeEigen(lam)

        def fake_torsion(*a, **k):
            return FakeTorsion(*state["mt"])

        monkeypatch.setattr(harness, "solve_eigen", fake_eigen)
        monkeypatch.setattr(harness, "solve_torsion", fake_torsion)
        out = convergence_study(FAST, [1 / 16, 1 / 32, 1 / 64])
        assert not out["lambda"].monotone
        assert math.isnan(out["lambda"].order)
