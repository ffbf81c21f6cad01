"""Monte-Carlo trials, error statistics and report emission."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from scipy import stats

from .basis import CHELYSHKOV, SHIFTED_LEGENDRE, build_basis
from .opmat import build_operational_matrices
from .problems import ProblemSpec
from .quadproj import QuadratureRule, default_rule
from .solver import SolveResult, solve_sivfie
from .stochastic import DEFAULT_GRID, sample_brownian_path

DIAGONAL_POINTS = tuple((round(0.05 + 0.1 * k, 2),) * 2 for k in range(10))

STATS_COLUMNS = ("n", "N", "mean", "sd", "ci_lo", "ci_hi")
TABLE_COLUMNS = ("zeta", "eta", "approx", "exact", "abs_error")


class ReportError(OSError):
    pass


@dataclass(frozen=True)
class ErrorRow:
    zeta: float
    eta: float
    approx: float
    exact: float
    abs_error: float


@dataclass(frozen=True)
class ErrorTable:
    rows: tuple
    basis: str = ""
    N: int = -1
    seed: int | None = None

    @property
    def mae(self) -> float:
        return float(np.mean([r.abs_error for r in self.rows]))

    def to_dict(self) -> dict:
        return {"basis": self.basis, "N": self.N, "seed": self.seed,
                "rows": [asdict(r) for r in self.rows]}

    @classmethod
    def from_dict(cls, d) -> "ErrorTable":
        return cls(tuple(ErrorRow(**r) for r in d["rows"]), d.get("basis", ""),
                   d.get("N", -1), d.get("seed"))


@dataclass(frozen=True)
class TrialStatistics:
    n: int
    N: int
    per_trial_mae: tuple
    mean: float
    sd: float
    ci_lo: float
    ci_hi: float
    seeds: tuple
    problem: str = ""
    basis: str = ""
    grid: int = DEFAULT_GRID

    def to_dict(self) -> dict:
        d = asdict(self)
        d["per_trial_mae"] = list(self.per_trial_mae)
        d["seeds"] = list(self.seeds)
        return d

    @classmethod
    def from_dict(cls, d) -> "TrialStatistics":
        d = dict(d)
        d["per_trial_mae"] = tuple(float(x) for x in d["per_trial_mae"])
        d["seeds"] = tuple(int(s) for s in d["seeds"])
        return cls(**d)


@dataclass(frozen=True)
class BasisComparison:
    chelyshkov: ErrorTable
    slp: ErrorTable

    def to_dict(self) -> dict:
        return {"chelyshkov": self.chelyshkov.to_dict(), "slp": self.slp.to_dict()}


def absolute_errors(result: SolveResult, problem: ProblemSpec,
                    points=DIAGONAL_POINTS) -> ErrorTable:
    if problem.exact is None:
        raise ValueError(f"problem {problem.name!r} has no exact solution")
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    approx = np.atleast_1d(result(pts[:, 0], pts[:, 1]))
    exact = np.atleast_1d(problem.exact(pts[:, 0], pts[:, 1]))
    rows = tuple(
        ErrorRow(float(z), float(e), float(a), float(x), float(abs(a - x)))
        for (z, e), a, x in zip(pts, approx, exact)
    )
    return ErrorTable(rows, result.basis_kind, result.degree, result.seed)


def confidence_interval(mean: float, sd: float, n: int, level: float = 0.95):
    """Student-t interval ``mean -/+ t_{(1+level)/2, n-1} sd / sqrt(n)``."""
    if n < 2:
        raise ValueError("a confidence interval needs at least two trials")
    if sd < 0:
        raise ValueError("standard deviation must be nonnegative")
    half = stats.t.ppf(0.5 * (1.0 + level), n - 1) * sd / np.sqrt(n)
    return float(mean - half), float(mean + half)


def summarize(per_trial, seeds, N, problem="", basis="", grid=DEFAULT_GRID) -> TrialStatistics:
    x = np.asarray(per_trial, dtype=float)
    n = len(x)
    mean = float(np.mean(x))
    sd = float(np.std(x, ddof=1))
    lo, hi = confidence_interval(mean, sd, n)
    return TrialStatistics(n, N, tuple(float(v) for v in x), mean, sd, lo, hi,
                           tuple(int(s) for s in seeds), problem, basis, grid)


def run_trials(problem: ProblemSpec, basis_kind: str, N: int, n: int, seed0: int = 0,
               M: int = DEFAULT_GRID, rule: QuadratureRule | None = None,
               points=DIAGONAL_POINTS, seeds=None) -> TrialStatistics:
    """Solve ``n`` independent realisations and aggregate the per-trial MAE.

    Trial ``i`` uses seed ``seed0 + i`` unless ``seeds`` is given explicitly.
    A singular system aborts the run; the exception carries the seed.
    """
    if n < 2:
        raise ValueError("run_trials needs n >= 2")
    seeds = list(seeds) if seeds is not None else [seed0 + i for i in range(n)]
    if len(seeds) != n:
        raise ValueError("number of seeds must equal n")
    basis = build_basis(basis_kind, N)
    rule = rule or default_rule(N)
    omset = build_operational_matrices(basis, rule)
    maes = []
    for seed in seeds:
        path = sample_brownian_path(M, seed)
        result = solve_sivfie(problem, basis, path, rule, omset)
        maes.append(absolute_errors(result, problem, points).mae)
    return summarize(maes, seeds, N, problem.name, basis.kind, M)


def compare_bases(problem: ProblemSpec, N: int, seed: int, M: int = DEFAULT_GRID,
                  points=DIAGONAL_POINTS, kinds=(CHELYSHKOV, SHIFTED_LEGENDRE)) -> BasisComparison:
    """Solve one realisation with two bases on the identical path."""
    path = sample_brownian_path(M, seed)
    tables = []
    for kind in kinds:
        basis = build_basis(kind, N)
        tables.append(absolute_errors(solve_sivfie(problem, basis, path), problem, points))
    return BasisComparison(tables[0], tables[1])


# Emission -----------------------------------------------------------------

def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def render(obj, fmt: str = "csv") -> str:
    """Serialise statistics, error tables or basis comparisons deterministically."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    if fmt == "json":
        if isinstance(obj, (TrialStatistics, ErrorTable, BasisComparison)):
            payload = obj.to_dict()
        else:
            payload = obj
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if isinstance(obj, TrialStatistics):
        return _csv_text(STATS_COLUMNS, [[getattr(obj, c) for c in STATS_COLUMNS]])
    if isinstance(obj, ErrorTable):
        return _csv_text(TABLE_COLUMNS,
                         [[getattr(r, c) for c in TABLE_COLUMNS] for r in obj.rows])
    if isinstance(obj, BasisComparison):
        header = ("zeta", "eta", "exact", "approx_chelyshkov", "abs_error_chelyshkov",
                  "approx_slp", "abs_error_slp")
        rows = [[a.zeta, a.eta, a.exact, a.approx, a.abs_error, b.approx, b.abs_error]
                for a, b in zip(obj.chelyshkov.rows, obj.slp.rows)]
        return _csv_text(header, rows)
    raise TypeError(f"cannot render {type(obj).__name__} as csv")


def emit_report(obj, fmt: str, destination) -> None:
    text = render(obj, fmt)
    destination = Path(destination)
    try:
        with destination.open("w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ReportError(f"cannot write report to {destination}: {exc}") from exc


def load_report(source):
    """Inverse of the JSON branch of :func:`emit_report`."""
    d = json.loads(Path(source).read_text())
    if "per_trial_mae" in d:
        return TrialStatistics.from_dict(d)
    if "rows" in d:
        return ErrorTable.from_dict(d)
    if "chelyshkov" in d and "slp" in d:
        return BasisComparison(ErrorTable.from_dict(d["chelyshkov"]),
                               ErrorTable.from_dict(d["slp"]))
    return d

