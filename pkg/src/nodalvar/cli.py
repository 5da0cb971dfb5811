"""Command-line front end.

Exit codes: 0 success, 1 configuration or validation error, 2 numeric
non-convergence or results outside tolerance.
"""
from __future__ import annotations

import argparse
import itertools
import sys
from pathlib import Path

from . import csvio
from .analysis import (DegeneratePatchError, InvalidPartitionError, InvalidSubsetError,
                       build_composite, error_report, local_energy_profile, per_region_csv,
                       reports_to_csv)
from .config import BENCHMARK_STATES, RunConfig, grid_scale_from_env, load_config
from .jacobi import DegenerateScalingError, rows_to_csv, verify_multiplicative_identity
from .optimize import NodeObjective, optimize_nodes
from .problems import (ConfigurationError, DegenerateFunctionError, ProblemKind,
                       UnsupportedStateError, exact_state, make_problem)
from .scaling import DisallowedScalingError
from .solver import InsufficientResolutionError, NumericFailureError
from .tables import TABLE_IDS, diff, reproduce

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2

CONFIG_ERRORS = (ConfigurationError, InvalidPartitionError, InvalidSubsetError,
                 UnsupportedStateError, DisallowedScalingError, InsufficientResolutionError,
                 DegeneratePatchError, DegenerateScalingError, DegenerateFunctionError)


class CommandFailure(Exception):
    """Numeric outcome that should end the run with exit code 2."""


def _emit(args, cfg: RunConfig | None, files: dict[str, str], main: str):
    """Write every file to the output directory (if any) and the main one to stdout."""
    out = args.out or (cfg.output_dir if cfg else None)
    if out:
        for name, text in files.items():
            csvio.write(Path(out) / name, text)
    sys.stdout.write(files[main])


def _precision(args, cfg):
    if args.precision is not None:
        return args.precision
    return cfg.precision if cfg else csvio.DEFAULT_PRECISION


def _meta(cfg: RunConfig, **extra):
    p = cfg.problem
    meta = {"problem": f"{p.kind.value} x_max={p.x_max:g} n_points={p.n_points} h={p.h:.6g}"}
    if cfg.nodes:
        meta["nodes"] = " ".join(repr(float(n)) for n in cfg.nodes)
    meta.update(extra)
    return meta


def cmd_solve(args, cfg: RunConfig) -> int:
    cfg.require_nodes()
    c = build_composite(cfg.problem, cfg.nodes)
    rows = [(j, s.interval.a, s.interval.b, s.energy, p)
            for j, (s, p) in enumerate(zip(c.region_solutions, c.weights), 1)]
    text = csvio.render(["region", "a", "b", "E", "p"], rows, _meta(cfg), _precision(args, cfg))
    _emit(args, cfg, {"regions.csv": text}, "regions.csv")
    return EXIT_OK


def cmd_analyze(args, cfg: RunConfig) -> int:
    cfg.require_nodes()
    prec = _precision(args, cfg)
    c = build_composite(cfg.problem, cfg.nodes)
    if cfg.subsets is None:
        subsets = [s for k in range(1, c.m + 1) for s in itertools.combinations(range(1, c.m + 1), k)]
    else:
        subsets = list(cfg.subsets)
    reports = [error_report(c, s, cfg.reference, cfg.scaling_set or None) for s in subsets]
    meta = _meta(cfg, reference=getattr(cfg.reference, "value", cfg.reference))
    files = {"report.csv": reports_to_csv(reports, prec, meta)}
    full = error_report(c, None, cfg.reference)
    if cfg.exact_energy is not None:
        rows = [(r, a, b, e, p, (e - cfg.exact_energy) ** 2) for r, a, b, e, p, _ in full.per_region]
        full = type(full)(full.regions, full.average_energy, cfg.exact_energy, full.err1, full.err2,
                          tuple(rows))
    files["regions.csv"] = per_region_csv(full, prec, _meta(cfg))
    x, psi = c.on_grid()
    prof = local_energy_profile(c)
    plots = {"wavefunction.csv": (x, psi), "kinetic.csv": (prof.x, prof.kinetic),
             "potential.csv": (prof.x, prof.potential), "total.csv": (prof.x, prof.total)}
    for name, (px, py) in plots.items():
        files[name] = csvio.render(["x", "value"], zip(px, py), None, prec)
    _emit(args, cfg, files, "report.csv")
    return EXIT_OK


def cmd_optimize(args, cfg: RunConfig) -> int:
    cfg.require_nodes()
    objective = NodeObjective(cfg.objective_kind, cfg.problem, cfg.scaling_set)
    res = optimize_nodes(objective, cfg.nodes, cfg.options)
    prec = _precision(args, cfg)
    meta = _meta(cfg, objective=objective.kind.value, converged=str(res.converged).lower(),
                 iterations=res.iterations)
    header = [f"node_{k}" for k in range(1, len(res.nodes) + 1)] + ["objective", "iterations", "converged"]
    files = {
        "result.csv": csvio.render(header, [res.nodes + (res.objective_value, res.iterations, res.converged)],
                                   meta, prec),
        "trace.csv": res.trace_csv(prec, meta),
    }
    _emit(args, cfg, files, "result.csv")
    if not res.converged:
        raise CommandFailure(f"node optimization did not converge: {res.message}")
    return EXIT_OK


def cmd_verify_jacobi(args, cfg: RunConfig) -> int:
    problem = cfg.problem
    label = cfg.jacobi_state
    if label is None:
        if problem is None:
            raise ConfigurationError("config needs [jacobi] state or a [problem] section")
        label = BENCHMARK_STATES[problem.kind]
    if problem is None:
        kind = next((k for k, v in BENCHMARK_STATES.items() if v == label), None)
        if kind is None:
            raise UnsupportedStateError(f"unsupported state {label!r}")
        problem = make_problem(kind)
    state = exact_state(problem, label)
    scaling = cfg.jacobi_scaling
    if not scaling:
        from .config import NAMED_SCALING
        scaling = NAMED_SCALING["hydrogen" if problem.kind is ProblemKind.HYDROGEN_RADIAL else "oscillator"]
    reports = [verify_multiplicative_identity(state, g, cfg.refinement_levels, cfg.base_refinement,
                                              g_id=f"g{k}") for k, g in enumerate(scaling, 1)]
    worst = max(r.finest.residual for r in reports)
    ok = worst < cfg.jacobi_tolerance and all(r.inequality_holds() for r in reports)
    rows = [row for r in reports for row in r.rows + r.regions + r.printed_rows]
    meta = {"state": label, "energy": state.energy, "tolerance": cfg.jacobi_tolerance,
            "max_finest_residual": f"{worst:.3e}", "passed": str(ok).lower()}
    for k, g in enumerate(scaling, 1):
        meta[f"g{k}"] = g.describe()
    _emit(args, cfg, {"residuals.csv": rows_to_csv(rows, _precision(args, cfg), meta)}, "residuals.csv")
    if not ok:
        raise CommandFailure(f"identity residual {worst:.3e} not below {cfg.jacobi_tolerance:g}")
    return EXIT_OK


def cmd_reproduce(args, cfg: RunConfig | None) -> int:
    table = args.table or args.table_id
    if table is None:
        raise ConfigurationError("reproduce needs a table id (--table)")
    rep = reproduce(table, grid_scale_from_env())
    prec = _precision(args, cfg)
    stem = f"table_{rep.table_id}" if not rep.table_id.startswith("Fig") else rep.table_id.lower()
    files = {f"{stem}.csv": rep.csv(prec)}
    files.update({f"{name}.csv": text for name, text in rep.plot_csvs(prec).items()})
    main = f"{stem}.csv"
    if args.diff:
        report = diff(rep)
        files[f"{stem}_diff.csv"] = report.csv(prec)
        main = f"{stem}_diff.csv"
        total = len(report.cells)
        print(f"{rep.table_id}: {total - len(report.failures)}/{total} cells within tolerance, "
              f"max relative deviation {report.max_relative_deviation:.4g}", file=sys.stderr)
        _emit(args, cfg, files, main)
        if not report.passed:
            raise CommandFailure(f"{len(report.failures)} cell(s) of {rep.table_id} outside tolerance")
        return EXIT_OK
    _emit(args, cfg, files, main)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="INI run configuration")
    common.add_argument("--out", type=Path, help="directory for output CSV files")
    common.add_argument("--precision", type=int, help="significant digits in CSV output")
    parser = argparse.ArgumentParser(prog="nodalvar",
                                     description="Fixed-node region energies and nodal error analysis.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="region energies and weights")
    sub.add_parser("analyze", parents=[common], help="error reports and plot data")
    sub.add_parser("optimize-nodes", parents=[common], help="minimize an error expression over nodes")
    sub.add_parser("verify-jacobi", parents=[common], help="multiplicative-variation identity residuals")
    rp = sub.add_parser("reproduce", parents=[common], help="recompute a reference table or figure")
    rp.add_argument("table_id", nargs="?", metavar="TABLE", help=f"one of {', '.join(TABLE_IDS)}")
    rp.add_argument("--table", choices=TABLE_IDS)
    rp.add_argument("--diff", action="store_true", help="compare against the bundled expected values")
    return parser


COMMANDS = {
    "solve": cmd_solve,
    "analyze": cmd_analyze,
    "optimize-nodes": cmd_optimize,
    "verify-jacobi": cmd_verify_jacobi,
    "reproduce": cmd_reproduce,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.precision is not None and not 1 <= args.precision <= 17:
            raise ConfigurationError("--precision must be between 1 and 17")
        cfg = None
        if args.config is not None:
            cfg = load_config(args.config)
        elif args.command != "reproduce":
            raise ConfigurationError(f"{args.command} needs --config")
        if args.command == "reproduce" and args.table_id and args.table_id not in TABLE_IDS:
            raise ConfigurationError(f"unknown table id {args.table_id!r}; choose from {', '.join(TABLE_IDS)}")
        return COMMANDS[args.command](args, cfg)
    except CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CommandFailure, NumericFailureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
