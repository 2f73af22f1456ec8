"""Command-line entry point.

Subcommands:

* ``run``: solve one problem and print its relative errors.
* ``tables``: recompute every published error table into CSV files.
* ``verify``: numerical checks of the inverse estimate and of GLS coercivity.
* ``sample``: dump a solution and the exact solution on a lattice as CSV.

Exit codes: 0 on success, 1 on solver failure or a failed check, 2 on bad
arguments.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from . import golden
from .analysis import (
    H1_DEFINITIONS,
    ErrorReport,
    error_norms,
    sample_field,
    verify_coercivity,
    verify_inverse_inequality,
)
from .formulations import GLS_H_CHOICES, SUPG_RESIDUALS, ConfigurationError, Method, SolverError, solve
from .linalg import ConvergenceError
from .meshes import MeshSpecError, parse_mesh, uniform_mesh
from .problems import eval_exact, get_problem, problem_ej, problem_one
from .quadrature import MAX_POINTS

DEFAULT_MESH = {"p1": "uniform:10x10", "ej": "uniform:10x4"}
REPORT_FIELDS = ("problem", "method", "mesh", "epsilon", "l2_rel_percent", "h1_rel_percent", "h1_definition", "dofs")
VERIFY_SIZES = (4, 8, 10, 16)
COERCIVITY_SIZES = (8, 10, 16)
COERCIVITY_EPSILONS = (1e-3, 5e-4, 1e-4, 0.1)
RATIO_FLOOR = 0.5 - 1e-8


class UsageError(Exception):
    """Arguments parse but do not describe a valid configuration (exit code 2)."""


@dataclass(frozen=True)
class RunConfig:
    problem: str
    method: str
    mesh: str
    epsilon: float
    quad: int | None = None
    norm_quad: int | None = None
    h1: str = "full"
    supg_residual: str = "paper"
    gls_h: str = "edge"
    output_format: str = "text"


def fmt(x) -> str:
    """Shortest round-trip text for floats, ``str`` for anything else."""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def run_experiment(cfg: RunConfig) -> ErrorReport:
    try:
        mesh = parse_mesh(cfg.mesh)
        spec = get_problem(cfg.problem, cfg.epsilon)
    except (MeshSpecError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    field = solve(cfg.method, mesh, spec, quad=cfg.quad, supg_residual=cfg.supg_residual, gls_h=cfg.gls_h)
    return error_norms(field, spec, h1=cfg.h1, quad=cfg.norm_quad, method=Method.parse(cfg.method).value)


def render_report(report: ErrorReport, output_format: str) -> str:
    d = report.to_dict()
    if output_format == "json":
        return json.dumps({k: d[k] for k in REPORT_FIELDS}, indent=2) + "\n"
    if output_format == "csv":
        return ",".join(REPORT_FIELDS) + "\n" + ",".join(fmt(d[k]) for k in REPORT_FIELDS) + "\n"
    return "".join(f"{k}: {fmt(d[k])}\n" for k in REPORT_FIELDS)


def write_atomic(path: str, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


# -- run ---------------------------------------------------------------------


def cmd_run(args) -> int:
    cfg = _config_from_args(args)
    report = run_experiment(cfg)
    text = render_report(report, cfg.output_format)
    if args.out:
        ext = {"text": "txt", "csv": "csv", "json": "json"}[cfg.output_format]
        os.makedirs(args.out, exist_ok=True)
        name = f"{cfg.problem}_{report.method}_{fmt(cfg.epsilon)}.{ext}"
        write_atomic(os.path.join(args.out, name), text)
    sys.stdout.write(text)
    return 0


# -- tables ------------------------------------------------------------------


@dataclass
class CellResult:
    table_id: str
    epsilon: float
    l2: float
    h1: float
    printed_l2: float
    printed_h1: float
    ok: bool


def _deviation(l2: float, h1: float, printed_l2: float, printed_h1: float, tol) -> float:
    """Largest deviation in units of the cell tolerance (<= 1 passes)."""
    return max(abs(l2 - printed_l2) / max(tol[0], tol[1] * abs(printed_l2)),
               abs(h1 - printed_h1) / max(tol[0], tol[1] * abs(printed_h1)))


def compute_table(table_id: str, base: RunConfig) -> list[CellResult]:
    table = golden.TABLES[table_id]
    tol = golden.tolerance_for(table_id)
    out = []
    for eps, l2, h1 in table.rows:
        cfg = RunConfig(table.problem, table.method, table.mesh, eps, base.quad, base.norm_quad,
                        base.h1, base.supg_residual, base.gls_h)
        try:
            rep = run_experiment(cfg)
        except (SolverError, ConfigurationError) as exc:
            raise SolverError(f"table {table_id} failed for {cfg}: {exc}") from exc
        ok = golden.within_tolerance(rep.l2_rel_percent, l2, tol) and golden.within_tolerance(rep.h1_rel_percent, h1, tol)
        out.append(CellResult(table_id, eps, rep.l2_rel_percent, rep.h1_rel_percent, l2, h1, ok))
    return out


def variant_results(table_id: str, epsilon: float, base: RunConfig) -> list[tuple[str, str, float, float]]:
    """``(supg_residual, h1, L2, H1)`` for every residual sign and H1 definition."""
    table = golden.TABLES[table_id]
    rows = []
    for residual in SUPG_RESIDUALS:
        mesh = parse_mesh(table.mesh)
        spec = get_problem(table.problem, epsilon)
        field = solve(table.method, mesh, spec, quad=base.quad, supg_residual=residual, gls_h=base.gls_h)
        for h1 in H1_DEFINITIONS:
            rep = error_norms(field, spec, h1=h1, quad=base.norm_quad)
            rows.append((residual, h1, rep.l2_rel_percent, rep.h1_rel_percent))
    return rows


def cmd_tables(args) -> int:
    base = _config_from_args(args, need_problem=False)
    out_dir = args.out or "tables"
    os.makedirs(out_dir, exist_ok=True)
    results: dict[str, list[CellResult]] = {}
    for table_id in golden.TABLE_ORDER:
        cells = compute_table(table_id, base)
        results[table_id] = cells
        write_atomic(os.path.join(out_dir, f"{table_id}.csv"),
                     _csv_text(("epsilon", "l2_rel_percent", "h1_rel_percent"), ((c.epsilon, c.l2, c.h1) for c in cells)))
    for name, ids in golden.COMPARISONS.items():
        header = ["epsilon"] + [f"{lab}_{k}" for lab in golden.COMPARISON_LABELS for k in ("l2", "h1")]
        eps_rows = [c.epsilon for c in results[ids[0]]]
        rows = []
        for eps in eps_rows:
            row = [eps]
            for tid in ids:
                cell = next(c for c in results[tid] if c.epsilon == eps)
                row += [cell.l2, cell.h1]
            rows.append(row)
        write_atomic(os.path.join(out_dir, f"{name}.csv"), _csv_text(header, rows))

    flagged = [c for cells in results.values() for c in cells if not c.ok]
    total = sum(len(c) for c in results.values())
    for c in flagged:
        tol = golden.tolerance_for(c.table_id)
        variants = variant_results(c.table_id, c.epsilon, base)
        best = min(variants, key=lambda v: _deviation(v[2], v[3], c.printed_l2, c.printed_h1, tol))
        listing = "; ".join(f"{r}/{h}: {v2:.2f}/{v1:.2f}" for r, h, v2, v1 in variants)
        print(f"FLAG {c.table_id} eps={fmt(c.epsilon)} computed {c.l2:.2f}/{c.h1:.2f} "
              f"printed {c.printed_l2}/{c.printed_h1} | variants {listing} | nearest {best[0]}/{best[1]}")
    print(f"summary: {total - len(flagged)}/{total} cells within tolerance, {len(flagged)} flagged; CSVs in {out_dir}")
    return 0


# -- verify ------------------------------------------------------------------


def cmd_verify(args) -> int:
    failures = 0
    sizes = args.sizes or list(VERIFY_SIZES)
    observed: dict[int, float] = {}
    for n in sizes:
        mesh = uniform_mesh(n, n)
        obs, bound = verify_inverse_inequality(mesh)
        edge_obs, _ = verify_inverse_inequality(mesh, h=1.0 / n)
        observed[n] = obs
        ok = 0.0 < obs <= bound
        failures += not ok
        print(f"inverse {mesh.label}: bound {bound:.6f} observed {obs:.6f} (h = diameter) "
              f"ratio {obs / bound:.4f} {'ok' if ok else 'FAIL'}; with h = edge {edge_obs:.6f}")
    for n in args.coercivity_sizes or list(COERCIVITY_SIZES):
        mesh = uniform_mesh(n, n)
        for eps in args.epsilons or list(COERCIVITY_EPSILONS):
            for spec in (problem_one(eps), problem_ej(eps)):
                rep = verify_coercivity(mesh, spec, observed_constant=observed.get(n))
                if rep.condition_satisfied:
                    ok = rep.coercivity_min_ratio >= RATIO_FLOOR
                    failures += not ok
                    verdict = "ok" if ok else "FAIL"
                else:
                    verdict = "not asserted"
                print(f"coercivity {mesh.label} beta={list(spec.beta)} eps={fmt(eps)}: "
                      f"ratio {rep.coercivity_min_ratio:.6f} threshold {rep.epsilon_threshold:.6f} "
                      f"condition_satisfied={str(rep.condition_satisfied).lower()} {verdict}")
    print(f"verify: {failures} failed check(s)")
    return 1 if failures else 0


# -- sample ------------------------------------------------------------------


def cmd_sample(args) -> int:
    cfg = _config_from_args(args)
    if args.nx < 2 or args.ny < 2:
        raise UsageError("--nx and --ny must be at least 2")
    try:
        mesh = parse_mesh(cfg.mesh)
        spec = get_problem(cfg.problem, cfg.epsilon)
    except (MeshSpecError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    field = solve(cfg.method, mesh, spec, quad=cfg.quad, supg_residual=cfg.supg_residual, gls_h=cfg.gls_h)
    pts = sample_field(field, args.nx, args.ny)
    exact = eval_exact(spec, pts[:, 0], pts[:, 1])[0]
    rows = ((x, y, uh, ue, abs(uh - ue)) for (x, y, uh), ue in zip(pts, exact))
    text = _csv_text(("x", "y", "u_h", "u_exact", "abs_err"), rows)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        write_atomic(args.out, text)
    return 0


# -- argument handling -------------------------------------------------------


def _config_from_args(args, need_problem: bool = True) -> RunConfig:
    if need_problem and args.epsilon is None:
        raise UsageError("--epsilon is required")
    if args.epsilon is not None and not args.epsilon > 0:
        raise UsageError(f"--epsilon must be positive, got {args.epsilon}")
    for flag in ("quad", "norm_quad"):
        q = getattr(args, flag)
        if q is not None and not 1 <= q <= MAX_POINTS:
            raise UsageError(f"--{flag.replace('_', '-')} must be in [1, {MAX_POINTS}]")
    problem = getattr(args, "problem", "p1")
    mesh = getattr(args, "mesh", None) or DEFAULT_MESH[problem]
    method = getattr(args, "method", "galerkin")
    try:
        Method.parse(method)
    except ConfigurationError as exc:
        raise UsageError(str(exc)) from exc
    return RunConfig(problem, method, mesh, args.epsilon if args.epsilon is not None else 1.0,
                     args.quad, args.norm_quad, args.h1, args.supg_residual, args.gls_h,
                     getattr(args, "format", "text"))


def _add_numerics(p: argparse.ArgumentParser) -> None:
    p.add_argument("--quad", type=int, help="Gauss points per direction for assembly (default p+2)")
    p.add_argument("--norm-quad", type=int, help="Gauss points per direction for error norms (default p+1)")
    p.add_argument("--h1", choices=H1_DEFINITIONS, default="full", help="H1 quantity in the relative error")
    p.add_argument("--supg-residual", choices=SUPG_RESIDUALS, default="paper",
                   help="sign of the diffusion term in the SUPG residual")
    p.add_argument("--gls-h", choices=GLS_H_CHOICES, default="edge", help="element size in the GLS weight 1/h")


def _add_problem(p: argparse.ArgumentParser) -> None:
    p.add_argument("--problem", choices=("p1", "ej"), required=True)
    p.add_argument("--method", default="galerkin", help="galerkin, ls, gls or supg")
    p.add_argument("--mesh", help="uniform:N, uniform:NXxNY, refined-p1 or refined-ej "
                                  "(default uniform:10x10 for p1, uniform:10x4 for ej)")
    p.add_argument("--epsilon", type=float, required=True)
    _add_numerics(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="igastab", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="solve one configuration and report relative errors")
    _add_problem(p)
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.add_argument("--out", metavar="DIR", help="also write the report into DIR")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("tables", help="recompute all published tables as CSV")
    _add_numerics(p)
    p.add_argument("--out", metavar="DIR", help="output directory (default ./tables)")
    p.set_defaults(func=cmd_tables, epsilon=None)

    p = sub.add_parser("verify", help="inverse-estimate and coercivity checks")
    p.add_argument("--sizes", type=int, nargs="+", help=f"meshes for the inverse estimate (default {VERIFY_SIZES})")
    p.add_argument("--coercivity-sizes", type=int, nargs="+",
                   help=f"meshes for the coercivity check (default {COERCIVITY_SIZES})")
    p.add_argument("--epsilons", type=float, nargs="+", help=f"diffusion values (default {COERCIVITY_EPSILONS})")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sample", help="write u_h and u_exact on an nx x ny lattice as CSV")
    _add_problem(p)
    p.add_argument("--nx", type=int, default=101)
    p.add_argument("--ny", type=int, default=101)
    p.add_argument("--out", metavar="PATH", help="CSV file (default stdout)")
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits with status 2
    except (ConfigurationError, MeshSpecError) as exc:
        parser.error(str(exc))
    except (SolverError, ConvergenceError, np.linalg.LinAlgError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
