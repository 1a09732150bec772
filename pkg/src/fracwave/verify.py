"""Self-checks run by ``fracwave verify``.

Each check returns a :class:`CheckResult`; all randomness comes from one
seeded generator so reports are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import abd
from .caputo import build_weights
from .hermite import hermite_interpolant_2d
from .mesh import uniform_partition
from .oracle import dense_kron_solve, naive_l1_history
from .problems import PROBLEMS
from .stepper import AdiOscSolver, SchemeConfig

ALPHA_GRID = tuple(round(1.01 + 0.05 * k, 2) for k in range(20))


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def l1_coefficient_violations(b: np.ndarray, alpha: float, rtol: float = 1e-12) -> list[str]:
    """Names of the coefficient properties that ``b`` violates.

    Checks monotone decay from ``b_0 = 1``, the two-sided power bounds, the
    telescoping identity and ``sum_{j<n} b_j = n^(2-alpha)`` for every ``n``.
    """
    bad = []
    j = np.arange(1, b.size, dtype=float)
    if b[0] != 1.0 or np.any(np.diff(b) >= 0) or np.any(b <= 0):
        bad.append("(i) monotone decay from 1")
    beta = 2.0 - alpha
    if np.any(beta * (j + 1) ** (1 - alpha) >= b[1:]) or np.any(b[1:] >= beta * j ** (1 - alpha)):
        bad.append("(ii) power bounds")
    # (iii): sum_{j=0}^{n} (b_j - b_{j+1}) + b_{n+1} for every n, summed in order
    diffs = b[:-1] - b[1:]
    tele = np.cumsum(diffs) + b[1:]
    if np.any(np.abs(tele - 1.0) > rtol):
        bad.append("(iii) telescoping")
    # (iv): compensated running sum
    total, comp = 0.0, 0.0
    worst = 0.0
    for n, value in enumerate(b, start=1):
        y = value - comp
        t = total + y
        comp = (t - total) - y
        total = t
        worst = max(worst, abs(total - n**beta) / n**beta)
    if worst > rtol:
        bad.append(f"(iv) partial sums (rel. err {worst:.2e})")
    return bad


def check_l1_coefficients(steps: int = 10_000, weight_fault: float = 0.0) -> CheckResult:
    failures = []
    for alpha in ALPHA_GRID:
        b = build_weights(alpha, 1.0 / steps, steps).b.copy()
        b[0] += weight_fault
        for problem in l1_coefficient_violations(b, alpha):
            failures.append(f"alpha={alpha}: {problem}")
    detail = f"{len(ALPHA_GRID)} orders, n <= {steps}"
    return CheckResult("l1-coefficients", not failures, "; ".join(failures[:3]) or detail)


def check_adi_vs_dense(n: int = 3, steps: int = 5, alpha: float = 1.5) -> CheckResult:
    problem = PROBLEMS["paper-example"](alpha)
    config = SchemeConfig(problem, dt=1.0 / steps, nx=n)
    worst = 0.0
    with AdiOscSolver(config) as solver:
        state = solver.init_state()
        for _ in range(steps):
            rhs = solver.assemble_rhs(state)
            nu = solver.adi_increment(rhs)
            ref = dense_kron_solve(solver.mx.A, solver.mx.B, solver.my.A, solver.my.B, solver.mu, rhs)
            worst = max(worst, float(np.abs(nu - ref).max() / np.abs(ref).max()))
            solver.step(state)
    return CheckResult("adi-equals-dense-kron", worst <= 1e-10, f"max relative difference {worst:.2e}")


def check_history(rng, n: int = 3, steps: int = 50, alpha: float = 1.5, points: int = 5) -> CheckResult:
    problem = PROBLEMS["paper-example"](alpha)
    config = SchemeConfig(problem, dt=1.0 / steps, nx=n)
    gx, gy = 2 * n, 2 * n
    picks = [(int(rng.integers(gx)), int(rng.integers(gy))) for _ in range(points)]
    worst = 0.0
    with AdiOscSolver(config) as solver:
        state = solver.init_state()
        series = [solver.collocation_values(state.gamma)]
        for _ in range(steps):
            fast = solver.history_sum(state)
            for i, j in picks:
                ref = config.dt * naive_l1_history([u[i, j] for u in series], solver.weights, state.n + 1)
                scale = max(abs(ref), 1e-300)
                worst = max(worst, abs(fast[i, j] - ref) / scale if ref else abs(fast[i, j]))
            solver.step(state)
            series.append(series[-1] + state.history[state.n - 1])
    return CheckResult("history-vs-naive", worst <= 1e-12, f"{points} points, {steps} steps, worst {worst:.2e}")


def check_basis_reproduction(rng, n: int = 5) -> CheckResult:
    def u(x, y):
        return x * (1 - x) * y * (1 - y)

    c = hermite_interpolant_2d(
        u,
        lambda x, y: (1 - 2 * x) * y * (1 - y),
        lambda x, y: x * (1 - x) * (1 - 2 * y),
        lambda x, y: (1 - 2 * x) * (1 - 2 * y),
        uniform_partition(n),
        uniform_partition(n + 2),
    )
    x, y = rng.random(1000), rng.random(1000)
    err = float(np.abs(c(x, y) - u(x, y)).max())
    return CheckResult("bicubic-reproduction", err <= 1e-13, f"max error {err:.2e} at 1000 points")


def check_pde_residuals(rng, points: int = 100) -> CheckResult:
    worst = {}
    for name, factory in sorted(PROBLEMS.items()):
        for alpha in (1.1, 1.5, 1.9):
            problem = factory(alpha)
            x, y, t = rng.random(points), rng.random(points), rng.random(points)
            res = np.abs(problem.residual(x, y, t))
            worst[name] = max(worst.get(name, 0.0), float(res.max()))
    ok = all(v <= 1e-10 for v in worst.values())
    return CheckResult("pde-residuals", ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def check_solvers_agree(rng, trials: int = 50) -> CheckResult:
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, 12))
        tiles = rng.uniform(-1, 1, size=(n, 2, 4))
        m = abd.AbdMatrix(tiles)
        dense = m.to_dense() + 4.0 * np.eye(2 * n)
        m = abd.AbdMatrix.from_dense(dense)
        rhs = rng.standard_normal((2 * n, 3))
        x1 = abd.factor(m, "abd").solve(rhs)
        x2 = abd.factor(m, "banded").solve(rhs)
        worst = max(worst, float(np.abs(x1 - x2).max() / np.abs(x2).max()))
    return CheckResult("abd-vs-banded", worst <= 1e-10, f"{trials} random matrices, worst {worst:.2e}")


def run_checks(seed: int = 0, weight_fault: float = 0.0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    return [
        check_l1_coefficients(weight_fault=weight_fault),
        check_adi_vs_dense(),
        check_history(rng),
        check_basis_reproduction(rng),
        check_pde_residuals(rng),
        check_solvers_agree(rng),
    ]

