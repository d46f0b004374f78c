"""``levelcs`` command line: solve, ricl, guarantee, phase-line, phase-grid.

Exit status is 0 on success, 1 on a usage error and 2 on a runtime error.
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import analysis
from .experiments import (ALGORITHMS, NORMALIZATIONS, ExperimentConfig,
                          STRUCTURE_RULES, one_level, rule_from_name,
                          sweep_phase_grid, sweep_phase_line)
from .levels import LevelStructure, parse_structure
from .linalg import normalize_columns, read_csv, spectral_norm, write_csv
from .report import emit_svg_heatmap, format_csv, format_trials_csv
from .solvers import SOLVERS, DivergenceError, SolveOptions


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _range(text: str) -> list[int]:
    try:
        lo, step, hi = (int(v) for v in text.split(":"))
    except ValueError:
        raise UsageError(f"bad range {text!r}; expected lo:step:hi") from None
    if step < 1 or hi < lo:
        raise UsageError(f"bad range {text!r}")
    return list(range(lo, hi + 1, step))


def _values(single, rng, name):
    if single and rng:
        raise UsageError(f"give --{name} or --{name}-range, not both")
    if rng:
        return _range(rng)
    if single:
        return _int_list(single)
    raise UsageError(f"one of --{name} or --{name}-range is required")


def _structure(text: str) -> LevelStructure:
    try:
        return parse_structure(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _add_solver_flags(p):
    p.add_argument("--algorithm", choices=ALGORITHMS, required=True)
    p.add_argument("--tol", type=float, default=1e-4,
                   help="relative iterate-change stopping tolerance (default 1e-4)")
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--normalization", choices=NORMALIZATIONS, default="auto",
                   help="auto: columns for omp, spectral for iht, none otherwise")


def _add_sweep_flags(p):
    _add_solver_flags(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--m", help="comma-separated measurement counts")
    p.add_argument("--m-range", help="lo:step:hi, inclusive")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--success-tol", type=float, default=1e-2)
    p.add_argument("--noise-sigma", type=float, default=0.0)
    p.add_argument("--identity", action="store_true",
                   help="test mode: A = I (requires m = N)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="summary CSV path (default stdout)")
    p.add_argument("--dump-trials", help="per-trial CSV path")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="levelcs", description="Sparse-in-levels recovery tools")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("solve", help="recover x from y = Ax")
    p.add_argument("--matrix", required=True)
    p.add_argument("--measurements", required=True)
    p.add_argument("--structure", required=True)
    p.add_argument("--out", help="solution CSV path (default stdout)")
    _add_solver_flags(p)

    p = sub.add_parser("ricl", help="brute-force restricted isometry constant in levels")
    p.add_argument("--matrix", required=True)
    p.add_argument("--structure", required=True)
    p.add_argument("--cap", type=int, default=analysis.DEFAULT_CAP)

    p = sub.add_parser("guarantee", help="recovery-guarantee constants")
    p.add_argument("--theorem", choices=("iht", "cosamp", "qcbp"), required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--structure", help="needed for qcbp")
    p.add_argument("--weights", default="optimal",
                   help="qcbp weights: optimal, unit, or comma-separated values")

    p = sub.add_parser("phase-line", help="success rate against m")
    _add_sweep_flags(p)
    p.add_argument("--structure", required=True)
    p.add_argument("--solver-structure",
                   help="structure handed to the solver, or 'one-level'")

    p = sub.add_parser("phase-grid", help="success rate over (s, m)")
    _add_sweep_flags(p)
    p.add_argument("--s", help="comma-separated total sparsities")
    p.add_argument("--s-range", help="lo:step:hi, inclusive")
    p.add_argument("--rule", required=True,
                   help=f"one of {', '.join(STRUCTURE_RULES)} or 'levels;sparsities' "
                        "in s and N, e.g. 'N/4,N;s/2,s/2'")
    p.add_argument("--solver-rule", help="solver structure rule (default: --rule)")
    p.add_argument("--svg", help="heat map output path")
    return parser


def _emit(text: str, path):
    if path:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_solve(args):
    ls = _structure(args.structure)
    A = np.atleast_2d(read_csv(args.matrix))
    y = np.ravel(read_csv(args.measurements))
    opts = SolveOptions(max_iter=args.max_iter, rel_change_tol=args.tol)
    norm = args.normalization
    if norm == "auto":
        norm = {"omp": "columns", "iht": "spectral"}.get(args.algorithm, "none")
    solver = SOLVERS[args.algorithm]
    scales = None
    if norm == "spectral":
        sigma = spectral_norm(A)
        A, y = A / sigma, y / sigma
    elif norm == "columns":
        A, scales = normalize_columns(A)
    res = solver(A, y, ls, opts)
    x = res.xhat if scales is None else res.xhat / scales
    if args.out:
        write_csv(args.out, x)
    else:
        for v in x:
            print(repr(float(v)))
    print(f"# iterations={res.iterations} stop_reason={res.stop_reason}", file=sys.stderr)


def _cmd_ricl(args):
    ls = _structure(args.structure)
    A = np.atleast_2d(read_csv(args.matrix))
    delta, support = analysis.ricl_worst_case(A, ls, cap=args.cap)
    print(f"{delta:.12f}")
    print("support " + ",".join(map(str, support.indices)))


def _fmt(v: float) -> str:
    return "inf" if math.isinf(v) else f"{v:.12g}"


def _cmd_guarantee(args):
    if args.theorem == "qcbp":
        if not args.structure:
            raise UsageError("--structure is required for --theorem qcbp")
        ls = _structure(args.structure)
        w = analysis.weights_from_name(args.weights, ls)
        thr = analysis.qcbp_threshold(ls, w)
        print("theorem qcbp")
        print(f"threshold {_fmt(thr)}")
        print(f"condition_met {str(args.delta < thr).lower()}")
        return
    fn = analysis.iht_guarantee if args.theorem == "iht" else analysis.cosamp_guarantee
    rep = fn(args.delta)
    print(f"theorem {args.theorem}")
    print(f"threshold {_fmt(rep.condition_threshold)}")
    print(f"condition_met {str(rep.condition_met).lower()}")
    print(f"rho {_fmt(rep.rho)}")
    print(f"tau_bound {_fmt(rep.tau_bound)}")
    print(f"notes {rep.notes}")


def _sweep_config(args, structure, solver_structure, m_values):
    opts = SolveOptions(max_iter=args.max_iter, rel_change_tol=args.tol)
    return ExperimentConfig(
        algorithm=args.algorithm, N=args.N, structure=structure,
        m_values=tuple(m_values), trials=args.trials, base_seed=args.seed,
        solver_structure=solver_structure, success_rel_err=args.success_tol,
        solve_opts=opts, noise_sigma=args.noise_sigma,
        normalization=args.normalization, identity=args.identity)


def _cmd_phase_line(args):
    ls = _structure(args.structure)
    if args.solver_structure == "one-level":
        solver_ls = one_level(ls)
    elif args.solver_structure:
        solver_ls = _structure(args.solver_structure)
    else:
        solver_ls = None
    m_values = _values(args.m, args.m_range, "m")
    try:
        cfg = _sweep_config(args, ls, solver_ls, m_values)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = sweep_phase_line(cfg, jobs=args.jobs)
    _emit(format_csv(result), args.out)
    if args.dump_trials:
        _emit(format_trials_csv(result), args.dump_trials)


def _cmd_phase_grid(args):
    m_values = _values(args.m, args.m_range, "m")
    s_values = _values(args.s, args.s_range, "s")
    try:
        rule = rule_from_name(args.rule)
        solver_rule = rule_from_name(args.solver_rule) if args.solver_rule else None
    except (ValueError, SyntaxError) as exc:
        raise UsageError(f"bad rule: {exc}") from None
    placeholder = LevelStructure((args.N,), (0,))
    try:
        cfg = _sweep_config(args, placeholder, None, m_values)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    grid = sweep_phase_grid(cfg, s_values, rule, solver_rule, jobs=args.jobs)
    _emit(format_csv(grid.sweep), args.out)
    if args.dump_trials:
        _emit(format_trials_csv(grid.sweep), args.dump_trials)
    if args.svg:
        emit_svg_heatmap(grid, args.svg,
                         title=f"{args.algorithm} N={args.N} rule={args.rule}")


COMMANDS = {
    "solve": _cmd_solve,
    "ricl": _cmd_ricl,
    "guarantee": _cmd_guarantee,
    "phase-line": _cmd_phase_line,
    "phase-grid": _cmd_phase_grid,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits on usage errors and --help
        return exc.code if isinstance(exc.code, int) else 1
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"levelcs: error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, RuntimeError, DivergenceError) as exc:
        print(f"levelcs: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
