"""Command-line interface.

Subcommands
-----------
eigen / torsion / cheeger
    Solve one case given ``--domain``/``--norm``/``--p`` flags, print the
    headline numbers, and (with ``--out``) write the field or trace CSV.
verify
    Run a case catalog (default or from ``--config``), write one JSON
    report per case plus an aggregate CSV, and exit 0 only if every
    converged case passes every inequality.
sweep
    Slab-family optimality ratios; emits ``k,r1,r2,r3,r4`` CSV.

Exit codes: 0 success, 1 inequality failure (verify), 2 argument/config
error, 3 solver non-convergence (or inconclusive cases under
``--strict``).

Config files are either JSON or a flat key-value text with ``[case]``
sections; ``--dump-config`` prints the canonical text form, which parses
back to the identical run configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .cheeger import cheeger_estimate
from .config import DEFAULTS, INEQUALITY_TOLERANCES, ToleranceTable
from .geometry import GeometryError, parse_domain
from .harness import (CaseSpec, default_catalog, aggregate_csv_rows, run_case,
                      slab_sweep, sweep_csv_rows)
from .norms import GaugeError, MinkowskiNorm
from .pde import ConvergenceError, solve_eigen, solve_torsion

EXIT_OK = 0
EXIT_INEQUALITY = 1
EXIT_USAGE = 2
EXIT_NOT_CONVERGED = 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Parsed verify-run configuration."""

    cases: list[CaseSpec] = field(default_factory=list)
    tolerances: dict[str, tuple[float, float]] = field(default_factory=dict)
    out_dir: str | None = None
    jobs: int = 1
    strict: bool = False

    def dump_text(self) -> str:
        lines = ["[run]", f"jobs = {self.jobs}", f"strict = {int(self.strict)}"]
        if self.out_dir:
            lines.append(f"out = {self.out_dir}")
        if self.tolerances:
            lines.append("[tolerances]")
            for key in sorted(self.tolerances):
                rel, c = self.tolerances[key]
                lines.append(f"{key} = {rel:.12g}, {c:.12g}")
        for case in self.cases:
            lines.append("[case]")
            lines.append(f"domain = {case.domain}")
            lines.append(f"norm = {case.norm}")
            lines.append(f"p = {case.p:.12g}")
            if case.h is not None:
                lines.append(f"h = {case.h:.12g}")
            if case.tol != DEFAULTS["tol"]:
                lines.append(f"tol = {case.tol:.12g}")
            if case.sweep_m != DEFAULTS["sweep_m"]:
                lines.append(f"sweep_m = {case.sweep_m}")
        return "\n".join(lines) + "\n"


def _case_from_mapping(entry: dict) -> CaseSpec:
    try:
        return CaseSpec(
            domain=str(entry["domain"]),
            norm=str(entry["norm"]),
            p=float(entry["p"]),
            h=float(entry["h"]) if entry.get("h") is not None else None,
            tol=float(entry.get("tol", DEFAULTS["tol"])),
            sweep_m=int(entry.get("sweep_m", DEFAULTS["sweep_m"])),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad case entry {entry!r}: {exc}") from None


def parse_config_text(text: str) -> RunConfig:
    """Parse the flat key-value format (JSON is detected and delegated)."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return parse_config_json(text)
    cfg = RunConfig()
    section = None
    current: dict | None = None

    def flush():
        nonlocal current
        if current is not None:
            cfg.cases.append(_case_from_mapping(current))
            current = None

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            flush()
            section = line[1:-1].strip().lower()
            if section == "case":
                current = {}
            elif section not in ("run", "tolerances"):
                raise ConfigError(f"line {lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, val = (part.strip() for part in line.split("=", 1))
        if section == "case":
            current[key] = val
        elif section == "tolerances":
            try:
                rel, c = (float(tok) for tok in val.split(","))
            except ValueError:
                raise ConfigError(
                    f"line {lineno}: tolerance needs 'rel, c'") from None
            if key not in INEQUALITY_TOLERANCES:
                raise ConfigError(f"line {lineno}: unknown inequality {key!r}")
            cfg.tolerances[key] = (rel, c)
        elif section == "run":
            if key == "jobs":
                cfg.jobs = int(val)
            elif key == "strict":
                cfg.strict = bool(int(val))
            elif key == "out":
                cfg.out_dir = val
            else:
                raise ConfigError(f"line {lineno}: unknown run key {key!r}")
        else:
            raise ConfigError(f"line {lineno}: key outside of a section")
    flush()
    return cfg


def parse_config_json(text: str) -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON config: {exc}") from None
    cfg = RunConfig()
    run = data.get("run", {})
    cfg.jobs = int(run.get("jobs", 1))
    cfg.strict = bool(run.get("strict", False))
    cfg.out_dir = run.get("out")
    for key, pair in data.get("tolerances", {}).items():
        if key not in INEQUALITY_TOLERANCES:
            raise ConfigError(f"unknown inequality {key!r}")
        cfg.tolerances[key] = (float(pair[0]), float(pair[1]))
    for entry in data.get("cases", []):
        cfg.cases.append(_case_from_mapping(entry))
    return cfg


def _add_case_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--domain", required=True,
                     help="rect:a,k | regular:n,R | wulff:r,n | poly:x,y;...")
    sub.add_argument("--norm", required=True, help="lq:q | ellipse:a11,a12,a22")
    sub.add_argument("--p", type=float, default=2.0)
    sub.add_argument("--h", type=float, default=None,
                     help="grid spacing (default: diameter/128)")
    sub.add_argument("--tol", type=float, default=DEFAULTS["tol"])
    sub.add_argument("--out", default=None, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="anisospec",
        description="anisotropic eigenvalues, torsion, Cheeger constants, "
                    "and inequality audits on convex planar domains")
    subs = ap.add_subparsers(dest="command", required=True)

    for name in ("eigen", "torsion", "cheeger"):
        sub = subs.add_parser(name)
        _add_case_flags(sub)

    ver = subs.add_parser("verify")
    ver.add_argument("--config", default=None, help="config file (text or JSON)")
    ver.add_argument("--out", default=None)
    ver.add_argument("--jobs", type=int, default=1)
    ver.add_argument("--strict", action="store_true",
                     help="inconclusive cases fail the run with exit 3")
    ver.add_argument("--dump-config", action="store_true",
                     help="print the canonical config text and exit")

    sw = subs.add_parser("sweep")
    sw.add_argument("--family", default="slab", choices=["slab"])
    sw.add_argument("--a", type=float, default=1.0)
    sw.add_argument("--k", default="1,2,4,8,16",
                    help="comma-separated half-lengths")
    sw.add_argument("--norm", default="lq:2")
    sw.add_argument("--p", type=float, default=2.0)
    sw.add_argument("--h", type=float, default=None)
    sw.add_argument("--out", default=None)
    return ap


def _build_case(args) -> tuple:
    gauge = MinkowskiNorm.parse(args.norm)
    poly = parse_domain(args.domain, norm=gauge)
    h = args.h if args.h is not None else \
        poly.diameter * DEFAULTS["h_over_diameter"]
    return poly, gauge, h


def _cmd_eigen(args) -> int:
    poly, gauge, h = _build_case(args)
    res = solve_eigen(poly, gauge, args.p, h, tol=args.tol)
    print(f"lambda = {res.lambda_:.10g}")
    print(f"iterations = {res.iterations}  residual = {res.residual:.3e}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        res.u.to_csv(out / "eigen_field.csv")
        print(f"field written to {out / 'eigen_field.csv'}")
    return EXIT_OK


def _cmd_torsion(args) -> int:
    poly, gauge, h = _build_case(args)
    res = solve_torsion(poly, gauge, args.p, h, tol=args.tol)
    print(f"T = {res.T:.10g}")
    print(f"Mv = {res.Mv:.10g}")
    print(f"iterations = {res.iterations}  residual = {res.residual:.3e}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        res.v.to_csv(out / "torsion_field.csv")
        print(f"field written to {out / 'torsion_field.csv'}")
    return EXIT_OK


def _cmd_cheeger(args) -> int:
    poly, gauge, _ = _build_case(args)
    res = cheeger_estimate(poly, gauge)
    print(f"h_est = {res.h_est:.10g}  (r* = {res.r_star:.6g})")
    print(f"bounds: {res.lower:.10g} <= h <= {res.upper:.10g}")
    if res.degenerate:
        print("warning: every rolling body degenerated; upper bound reported")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        res.trace_csv(out / "cheeger_trace.csv")
        print(f"trace written to {out / 'cheeger_trace.csv'}")
    return EXIT_OK


def _run_one(payload):
    spec, overrides = payload
    return run_case(spec, ToleranceTable(overrides))


def _cmd_verify(args) -> int:
    if args.config:
        try:
            cfg = parse_config_text(Path(args.config).read_text())
        except (OSError, ConfigError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        if not cfg.cases:
            print("config error: empty catalog", file=sys.stderr)
            return EXIT_USAGE
    else:
        cfg = RunConfig(cases=default_catalog())
    if args.jobs:
        cfg.jobs = args.jobs
    if args.strict:
        cfg.strict = True
    if args.out:
        cfg.out_dir = args.out
    if args.dump_config:
        sys.stdout.write(cfg.dump_text())
        return EXIT_OK

    payloads = [(spec, cfg.tolerances) for spec in cfg.cases]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            reports = list(pool.map(_run_one, payloads))
    else:
        reports = [_run_one(p) for p in payloads]
    reports.sort(key=lambda rep: rep.case["id"])

    if cfg.out_dir:
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for rep in reports:
            safe = rep.case["id"].replace(":", "_").replace("|", "__") \
                .replace(",", "-").replace("=", "")
            (out / f"case_{safe}.json").write_text(rep.to_json() + "\n")
        (out / "aggregate.csv").write_text(
            "\n".join(aggregate_csv_rows(reports)) + "\n")

    n_fail = n_inc = 0
    for rep in reports:
        bad = [r["id"] for r in rep.records if not r["passed"]]
        line = f"{rep.status.upper():12s} {rep.case['id']}"
        if bad and rep.status == "fail":
            line += f"  violated: {','.join(bad)}"
        print(line)
        n_fail += rep.status == "fail"
        n_inc += rep.status == "inconclusive"
    print(f"{len(reports)} cases: {len(reports) - n_fail - n_inc} pass, "
          f"{n_fail} fail, {n_inc} inconclusive")
    if n_fail:
        return EXIT_INEQUALITY
    if n_inc and cfg.strict:
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _cmd_sweep(args) -> int:
    gauge = MinkowskiNorm.parse(args.norm)
    ks = [float(tok) for tok in args.k.split(",") if tok.strip()]
    if not ks:
        raise GaugeError("sweep needs at least one k")
    rows = slab_sweep(args.a, gauge, args.p, ks, h=args.h)
    text = "\n".join(sweep_csv_rows(rows)) + "\n"
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "slab_sweep.csv").write_text(text)
        print(f"sweep written to {out / 'slab_sweep.csv'}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


_COMMANDS = {
    "eigen": _cmd_eigen,
    "torsion": _cmd_torsion,
    "cheeger": _cmd_cheeger,
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
}


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except (GaugeError, GeometryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"solver did not converge: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED


if __name__ == "__main__":
    sys.exit(main())
