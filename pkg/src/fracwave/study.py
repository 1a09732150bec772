"""Convergence studies: one solve per mesh size, errors and observed rates."""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass

from .norms import DEFAULT_SAMPLES_PER_CELL, NORM_NAMES, ErrorReport, convergence_rate, measure
from .problems import get_problem
from .stepper import SchemeConfig, run

CSV_COLUMNS = (
    "N", "dt",
    "l2_err", "l2_rate", "linf_err", "linf_rate", "h1_err", "h1_rate",
    "h2_err", "h2_rate", "nodal_err", "nodal_rate", "wall_seconds",
)


def parse_dt_rule(rule: str) -> str:
    if rule in ("h3", "h"):
        return rule
    if rule.startswith("fixed:"):
        try:
            value = float(rule.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad fixed time step in {rule!r}") from None
        if not value > 0:
            raise ValueError("fixed time step must be positive")
        return rule
    raise ValueError(f"dt rule must be 'h3', 'h' or 'fixed:<value>', got {rule!r}")


def time_step(rule: str, n: int) -> float:
    """Time step for ``n`` elements: ``1/n^3`` (h3), ``1/n`` (h) or a fixed value."""
    if rule == "h3":
        return 1.0 / n**3
    if rule == "h":
        return 1.0 / n
    return float(rule.split(":", 1)[1])


@dataclass(frozen=True)
class StudySpec:
    problem: str
    alpha: float
    ns: tuple[int, ...]
    dt_rule: str = "h3"
    norms: tuple[str, ...] = NORM_NAMES
    samples_per_cell: int = DEFAULT_SAMPLES_PER_CELL
    t_final: float = 1.0
    threads: int = 1

    def __post_init__(self):
        ns = tuple(int(n) for n in self.ns)
        if not ns:
            raise ValueError("need at least one mesh size")
        if any(n < 1 for n in ns) or any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError(f"mesh sizes must be positive and strictly increasing, got {ns}")
        object.__setattr__(self, "ns", ns)
        parse_dt_rule(self.dt_rule)
        unknown = set(self.norms) - set(NORM_NAMES)
        if unknown:
            raise ValueError(f"unknown norms {sorted(unknown)}")
        get_problem(self.problem, self.alpha)


def solve_and_measure(problem_name: str, alpha: float, n: int, dt: float, t_final: float = 1.0,
                      norms=NORM_NAMES, samples_per_cell: int = DEFAULT_SAMPLES_PER_CELL,
                      threads: int = 1):
    """Run one solve and measure its error at the final time; returns ``(report, state)``."""
    problem = get_problem(problem_name, alpha)
    if problem.exact is None:
        raise ValueError(f"problem {problem_name!r} has no exact solution to measure against")
    config = SchemeConfig(problem, dt=dt, nx=n, t_final=t_final, threads=threads)
    state = run(config)
    exact = problem.exact.at(state.t)
    report = measure(state.coeffs, exact, norms, samples_per_cell, n=n, dt=dt, alpha=alpha)
    return report, state


@dataclass(frozen=True)
class StudyRow:
    report: ErrorReport
    rates: dict
    wall_seconds: float


def run_study(spec: StudySpec, progress=None) -> list[StudyRow]:
    rows: list[StudyRow] = []
    for n in spec.ns:
        dt = time_step(spec.dt_rule, n)
        start = time.perf_counter()
        report, _ = solve_and_measure(spec.problem, spec.alpha, n, dt, spec.t_final, spec.norms,
                                      spec.samples_per_cell, spec.threads)
        wall = time.perf_counter() - start
        rates = {}
        if rows:
            prev = rows[-1].report
            # rates are in h = 1/N; under the "h" rule this is also dt
            h_prev, h_cur = 1.0 / prev.n, 1.0 / n
            for name in spec.norms:
                e0, e1 = prev.get(name), report.get(name)
                rates[name] = convergence_rate(e0, e1, h_prev, h_cur) if e0 > 0 and e1 > 0 else float("nan")
        rows.append(StudyRow(report, rates, wall))
        if progress is not None:
            progress(rows[-1])
    return rows


def _fmt(value) -> str:
    if value is None:
        return ""
    return f"{value:.5e}"


def csv_records(rows: list[StudyRow]) -> list[dict]:
    out = []
    for row in rows:
        r = row.report
        rec = {"N": str(r.n), "dt": _fmt(r.dt), "wall_seconds": f"{row.wall_seconds:.3f}"}
        for name in NORM_NAMES:
            rec[f"{name}_err"] = _fmt(r.get(name))
            rec[f"{name}_rate"] = _fmt(row.rates.get(name))
        out.append(rec)
    return out


def to_csv(rows: list[StudyRow]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(csv_records(rows))
    return buf.getvalue()
