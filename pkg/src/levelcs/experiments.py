"""Reproducible recovery trials and phase-transition sweeps.

Each trial seed is derived from ``(base_seed, trial_index, cell_tag)``. The
tag names N, m, the signal structure and the noise level, but neither the
algorithm nor the solver structure, so two sweeps that differ only in the
decoder see the same ``(A, x, e)`` trial by trial.
"""
from __future__ import annotations

import ast
import math
import operator
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .gen import derive_trial_seed, gaussian_matrix, random_levels_signal, standard_normal
from .levels import LevelStructure
from .linalg import normalize_columns, spectral_norm
from .solvers import SOLVERS, DivergenceError, SolveOptions

__all__ = [
    "ALGORITHMS",
    "NORMALIZATIONS",
    "ExperimentConfig",
    "TrialOutcome",
    "SummaryRow",
    "SweepResult",
    "PhaseGrid",
    "StructureRule",
    "STRUCTURE_RULES",
    "run_trial",
    "run_trials",
    "aggregate",
    "sweep_phase_line",
    "sweep_phase_grid",
    "one_level",
]

ALGORITHMS = tuple(SOLVERS)
NORMALIZATIONS = ("auto", "none", "columns", "spectral")
DEFAULT_NORMALIZATION = {"omp": "columns", "iht": "spectral",
                         "niht": "none", "cosamp": "none"}


def one_level(ls: LevelStructure) -> LevelStructure:
    return LevelStructure((ls.N,), (ls.total,))


@dataclass(frozen=True)
class ExperimentConfig:
    algorithm: str
    N: int
    structure: LevelStructure
    m_values: tuple[int, ...]
    trials: int = 100
    base_seed: int = 0
    solver_structure: Optional[LevelStructure] = None
    success_rel_err: float = 1e-2
    solve_opts: SolveOptions = field(default_factory=SolveOptions)
    noise_sigma: float = 0.0
    normalization: str = "auto"
    identity: bool = False

    def __post_init__(self):
        object.__setattr__(self, "m_values", tuple(int(m) for m in self.m_values))
        if self.algorithm not in SOLVERS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"unknown normalization {self.normalization!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.m_values:
            raise ValueError("m_values must be nonempty")
        if any(not 1 <= m <= self.N for m in self.m_values):
            raise ValueError(f"every m must lie in [1, {self.N}]")
        if not self.success_rel_err > 0:
            raise ValueError("success_rel_err must be positive")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be non-negative")
        if self.structure.N != self.N:
            raise ValueError("structure does not match N")
        if self.solver_structure is not None and self.solver_structure.N != self.N:
            raise ValueError("solver structure does not match N")
        if self.identity and any(m != self.N for m in self.m_values):
            raise ValueError("identity mode needs m = N")

    @property
    def decoder_structure(self) -> LevelStructure:
        return self.solver_structure or self.structure

    @property
    def effective_normalization(self) -> str:
        if self.normalization == "auto":
            return DEFAULT_NORMALIZATION[self.algorithm]
        return self.normalization

    def cell_tag(self, m: int) -> str:
        return (f"N={self.N};m={m};structure={self.structure};"
                f"noise={self.noise_sigma!r};identity={int(self.identity)}")

    def canonical(self) -> str:
        o = self.solve_opts
        return ";".join([
            f"algorithm={self.algorithm}",
            f"N={self.N}",
            f"structure={self.structure}",
            f"solver_structure={self.decoder_structure}",
            "m=" + ",".join(map(str, self.m_values)),
            f"trials={self.trials}",
            f"success_tol={self.success_rel_err!r}",
            f"tol={o.rel_change_tol!r}",
            f"max_iter={o.max_iter}",
            f"noise_sigma={self.noise_sigma!r}",
            f"normalization={self.effective_normalization}",
            f"identity={int(self.identity)}",
        ])


@dataclass(frozen=True)
class TrialOutcome:
    m: int
    trial_index: int
    rel_err: float
    success: bool
    iterations: int
    stop_reason: str
    s_total: int = 0


@dataclass(frozen=True)
class SummaryRow:
    m: int
    s_total: int
    trials: int
    successes: int
    success_rate: float
    mean_rel_err: float


@dataclass
class SweepResult:
    rows: list[SummaryRow]
    outcomes: list[TrialOutcome]
    seed: int
    config: str


def _problem(cfg: ExperimentConfig, m: int, trial_index: int):
    seed = derive_trial_seed(cfg.base_seed, trial_index, cfg.cell_tag(m))
    if cfg.identity:
        A = np.eye(cfg.N)
    else:
        A = gaussian_matrix(m, cfg.N, derive_trial_seed(seed, 0, "matrix"))
    x = random_levels_signal(cfg.structure, derive_trial_seed(seed, 0, "signal"))
    y = A @ x
    if cfg.noise_sigma > 0:
        y = y + cfg.noise_sigma * standard_normal(derive_trial_seed(seed, 0, "noise"), m)
    return A, x, y


def _solve(cfg: ExperimentConfig, A, y):
    solver = SOLVERS[cfg.algorithm]
    norm = cfg.effective_normalization
    ls = cfg.decoder_structure
    if norm == "spectral":
        sigma = spectral_norm(A, tol=1e-10)
        res = solver(A / sigma, y / sigma, ls, cfg.solve_opts)
    elif norm == "columns":
        An, scales = normalize_columns(A)
        res = solver(An, y, ls, cfg.solve_opts)
        res.xhat = res.xhat / scales
    else:
        res = solver(A, y, ls, cfg.solve_opts)
    return res


def run_trial(cfg: ExperimentConfig, m: int, trial_index: int) -> TrialOutcome:
    A, x, y = _problem(cfg, m, trial_index)
    try:
        res = _solve(cfg, A, y)
    except DivergenceError as exc:
        return TrialOutcome(m, trial_index, math.inf, False, exc.iterations,
                            "Diverged", cfg.structure.total)
    err = float(np.linalg.norm(x - res.xhat))
    nx = float(np.linalg.norm(x))
    rel = err / nx if nx > 0 else err
    if not math.isfinite(rel):
        rel = math.inf
    return TrialOutcome(m, trial_index, rel, rel < cfg.success_rel_err,
                        res.iterations, str(res.stop_reason), cfg.structure.total)


def _run_task(task):
    cfg, m, t = task
    return run_trial(cfg, m, t)


def run_trials(tasks: Sequence[tuple[ExperimentConfig, int, int]],
               jobs: int = 1) -> list[TrialOutcome]:
    """Run ``(cfg, m, trial_index)`` tasks, in parallel when ``jobs > 1``.

    Output order always matches ``tasks``.
    """
    if jobs <= 1 or len(tasks) < 2:
        return [_run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


def aggregate(outcomes: Sequence[TrialOutcome]) -> list[SummaryRow]:
    """One row per ``(s_total, m)`` cell, in order of first appearance."""
    cells: dict[tuple[int, int], list[TrialOutcome]] = {}
    for o in outcomes:
        cells.setdefault((o.s_total, o.m), []).append(o)
    rows = []
    for (s_total, m), group in cells.items():
        group = sorted(group, key=lambda o: o.trial_index)
        errs = [o.rel_err for o in group]
        mean = math.inf if any(math.isinf(e) for e in errs) else math.fsum(errs) / len(errs)
        succ = sum(o.success for o in group)
        rows.append(SummaryRow(m, s_total, len(group), succ, succ / len(group), mean))
    return rows


def sweep_phase_line(cfg: ExperimentConfig, jobs: int = 1) -> SweepResult:
    """Success rate against m for a fixed signal structure."""
    tasks = [(cfg, m, t) for m in cfg.m_values for t in range(cfg.trials)]
    outcomes = run_trials(tasks, jobs)
    return SweepResult(aggregate(outcomes), outcomes, cfg.base_seed, cfg.canonical())


# structure templates ------------------------------------------------------

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.FloorDiv: operator.floordiv}


def _eval(node, env):
    if isinstance(node, ast.Expression):
        return _eval(node.body, env)
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return Fraction(node.value)
    if isinstance(node, ast.Name) and node.id in env:
        return Fraction(env[node.id])
    if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
        return _OPS[type(node.op)](_eval(node.left, env), _eval(node.right, env))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return -_eval(node.operand, env)
    raise ValueError(f"unsupported expression: {ast.dump(node)}")


@dataclass(frozen=True)
class StructureRule:
    """Level structure as a function of total sparsity ``s`` and ``N``.

    Written ``"<levels>;<sparsities>"`` with comma-separated arithmetic in
    ``s`` and ``N``, e.g. ``"N/4,N/2,3*N/4,N;s/2,0,s/2,0"``.
    """

    text: str

    def __post_init__(self):
        if self.text.count(";") != 1:
            raise ValueError(f"rule {self.text!r} needs exactly one ';'")
        for part in self._parts():
            for expr in part:
                _eval(ast.parse(expr, mode="eval"), {"s": 1, "N": 1})

    def _parts(self):
        lev, spa = self.text.split(";")
        return [e.strip() for e in lev.split(",")], [e.strip() for e in spa.split(",")]

    def __call__(self, s: int, N: int) -> Optional[LevelStructure]:
        """Concrete structure, or ``None`` if it is non-integral or invalid."""
        env = {"s": s, "N": N}
        values = []
        for part in self._parts():
            vals = [_eval(ast.parse(e, mode="eval"), env) for e in part]
            if any(v.denominator != 1 for v in vals):
                return None
            values.append(tuple(int(v) for v in vals))
        try:
            ls = LevelStructure(*values)
        except ValueError:
            return None
        if ls.N != N or ls.total != s:
            return None
        return ls


STRUCTURE_RULES = {
    "graded": StructureRule("N/4,N/2,3*N/4,N;3*s/8,s/8,3*s/8,s/8"),
    "alternating": StructureRule("N/4,N/2,3*N/4,N;s/2,0,s/2,0"),
    "saturated-first": StructureRule("3*s/4,N;3*s/4,s/4"),
    "one-level": StructureRule("N;s"),
    "two-level": StructureRule("N/4,N;s/2,s/2"),
}


def rule_from_name(text: str) -> StructureRule:
    return STRUCTURE_RULES.get(text) or StructureRule(text)


@dataclass
class PhaseGrid:
    s_values: list[int]
    m_values: list[int]
    rates: np.ndarray  # (len(s_values), len(m_values)); NaN where skipped
    skipped: np.ndarray  # bool, same shape
    sweep: SweepResult


def sweep_phase_grid(cfg: ExperimentConfig, s_totals: Sequence[int],
                     structure_rule: Callable[[int, int], Optional[LevelStructure]],
                     solver_rule: Optional[Callable[[int, int], Optional[LevelStructure]]] = None,
                     jobs: int = 1) -> PhaseGrid:
    """Success rate over a grid of total sparsities (rows) and m (columns).

    Rows whose rule yields no valid structure are skipped. ``cfg.structure``
    and ``cfg.solver_structure`` are replaced per row.
    """
    s_values = [int(s) for s in s_totals]
    if len(set(s_values)) != len(s_values):
        raise ValueError("duplicate sparsity values")
    m_values = list(cfg.m_values)
    skipped = np.zeros((len(s_values), len(m_values)), dtype=bool)
    tasks, where = [], []
    for i, s in enumerate(s_values):
        ls = structure_rule(s, cfg.N)
        solver_ls = ls if solver_rule is None else solver_rule(s, cfg.N)
        if ls is None or solver_ls is None:
            skipped[i, :] = True
            continue
        row_cfg = replace(cfg, structure=ls, solver_structure=solver_ls)
        for j, m in enumerate(m_values):
            tasks.extend((row_cfg, m, t) for t in range(cfg.trials))
            where.append((i, j))
    if not where:
        raise ValueError("every grid cell is infeasible")
    outcomes = run_trials(tasks, jobs)
    rows = aggregate(outcomes)
    rates = np.full(skipped.shape, np.nan)
    for (i, j), row in zip(where, rows):
        rates[i, j] = row.success_rate
    config = cfg.canonical() + f";s_totals={','.join(map(str, s_values))}"
    if isinstance(structure_rule, StructureRule):
        config += f";rule={structure_rule.text}"
    if isinstance(solver_rule, StructureRule):
        config += f";solver_rule={solver_rule.text}"
    return PhaseGrid(s_values, m_values, rates, skipped,
                     SweepResult(rows, outcomes, cfg.base_seed, config))
