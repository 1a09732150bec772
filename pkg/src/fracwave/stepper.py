"""ADI orthogonal spline collocation Crank-Nicolson time stepping.

Each step solves for the increment ``E^n = U^n - U^{n-1}`` from

    (B_x + mu/2 A_x) (x) (B_y + mu/2 A_y) nu = F^n

as two sweeps of independent 1D almost block diagonal solves.  The right-hand
side is

    F^n = sum_{j<n} (b_{n-j-1} - b_{n-j}) E^j + dt b_{n-1} phi
          + mu Laplace U^{n-1} + mu f(t_{n-1/2})

evaluated at the Gauss points; the ``mu^2/4 d^4/dx^2dy^2`` perturbation lives
only in the factored operator on the left.
"""

from __future__ import annotations

from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import abd
from .caputo import L1Weights, build_weights, check_alpha
from .hermite import (
    CollocationMatrices,
    HermiteBasis1D,
    SplineCoeffs2D,
    SplineSpace2D,
    apply_tiles,
    assemble_matrices,
    hermite_interpolant_2d,
)
from .mesh import CollocationGrid, collocation_grid, uniform_partition
from .problems import Problem


@dataclass(frozen=True)
class SchemeConfig:
    problem: Problem
    dt: float
    nx: int
    ny: int | None = None
    t_final: float | None = None
    init_mode: str = "interpolant"
    solver: str = "abd"
    threads: int = 1

    def __post_init__(self):
        check_alpha(self.problem.alpha)
        if self.ny is None:
            object.__setattr__(self, "ny", self.nx)
        if self.t_final is None:
            object.__setattr__(self, "t_final", self.problem.t_final)
        if not self.dt > 0:
            raise ValueError(f"time step must be positive, got {self.dt}")
        if not self.t_final > 0:
            raise ValueError(f"final time must be positive, got {self.t_final}")
        ratio = self.t_final / self.dt
        if abs(ratio - round(ratio)) > 1e-12 * max(1.0, ratio) or round(ratio) < 1:
            raise ValueError(f"t_final / dt = {ratio!r} is not a positive integer")
        if self.init_mode not in ("interpolant", "zero"):
            raise ValueError(f"init_mode must be 'interpolant' or 'zero', got {self.init_mode!r}")
        if self.solver not in abd.SOLVERS:
            raise ValueError(f"unknown solver {self.solver!r}")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")

    @property
    def alpha(self) -> float:
        return self.problem.alpha

    @property
    def steps(self) -> int:
        return int(round(self.t_final / self.dt))


@dataclass
class SolverState:
    """Coefficients of ``U^n`` plus the increment history at the Gauss points.

    ``history[j-1]`` holds ``E^j`` at the collocation grid; only the first
    ``n`` entries are meaningful.
    """

    n: int
    t: float
    coeffs: SplineCoeffs2D
    history: np.ndarray = field(repr=False)

    @property
    def gamma(self) -> np.ndarray:
        return self.coeffs.gamma

    def increments(self) -> np.ndarray:
        return self.history[: self.n]


def _chunks(size: int, workers: int) -> list[slice]:
    workers = max(1, min(workers, size))
    edges = np.linspace(0, size, workers + 1).astype(int)
    return [slice(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]


class AdiOscSolver:
    """Set-up shared by all steps: meshes, matrices, weights and factorizations.

    ``increment_solver`` replaces the two-sweep solve ``F -> nu``; it exists so
    reference schemes can reuse the right-hand side assembly.
    """

    def __init__(self, config: SchemeConfig, increment_solver: Callable | None = None):
        self.config = config
        self.px = uniform_partition(config.nx)
        self.py = uniform_partition(config.ny)
        self.grid: CollocationGrid = collocation_grid(self.px, self.py)
        self.space = SplineSpace2D(HermiteBasis1D(self.px), HermiteBasis1D(self.py))
        self.mx: CollocationMatrices = assemble_matrices(self.space.bx)
        self.my: CollocationMatrices = assemble_matrices(self.space.by)
        self.weights: L1Weights = build_weights(config.alpha, config.dt, config.steps)
        mu = self.weights.mu
        self.mu = mu
        self.fact_x = abd.factor(abd.AbdMatrix(self.mx.tiles(mu)), config.solver)
        self.fact_y = abd.factor(abd.AbdMatrix(self.my.tiles(mu)), config.solver)
        X, Y = self.grid.mesh()
        self._X, self._Y = X, Y
        self.phi_grid = np.broadcast_to(config.problem.phi(X, Y), X.shape).astype(float)
        self._increment_solver = increment_solver or self.adi_increment
        self._pool = ThreadPoolExecutor(config.threads) if config.threads > 1 else None

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def _map(self, func, size):
        parts = _chunks(size, self.config.threads)
        if self._pool is None or len(parts) == 1:
            for s in parts:
                func(s)
        else:
            list(self._pool.map(func, parts))

    # initial state -----------------------------------------------------

    def init_state(self) -> SolverState:
        problem = self.config.problem
        if self.config.init_mode == "zero":
            coeffs = SplineCoeffs2D(self.space, np.zeros(self.space.shape))
        else:
            if problem.varphi_derivatives is None:
                raise ValueError(
                    f"problem {problem.name!r} lacks the derivatives of varphi needed by the Hermite interpolant"
                )
            vx, vy, vxy = problem.varphi_derivatives
            coeffs = hermite_interpolant_2d(problem.varphi, vx, vy, vxy, self.px, self.py)
        history = np.zeros((self.config.steps,) + self.grid.shape)
        return SolverState(0, 0.0, coeffs, history)

    # grid operators ----------------------------------------------------

    def collocation_values(self, gamma, dx2: bool = False, dy2: bool = False) -> np.ndarray:
        """Values (or negated second derivatives) of a coefficient tensor at the Gauss points."""
        tx = self.mx.tiles_a if dx2 else self.mx.tiles_b
        ty = self.my.tiles_a if dy2 else self.my.tiles_b
        tmp = apply_tiles(tx, self.space.bx.local_dofs, gamma)
        return apply_tiles(ty, self.space.by.local_dofs, tmp.T).T

    def laplacian_values(self, gamma) -> np.ndarray:
        return -(self.collocation_values(gamma, dx2=True) + self.collocation_values(gamma, dy2=True))

    def adi_increment(self, rhs: np.ndarray) -> np.ndarray:
        """Two-sweep solve of the factored operator for the coefficient increment."""
        workers = self.config.threads
        half = self.fact_x.solve(rhs, workers=workers)
        return self.fact_y.solve(half.T, workers=workers).T

    # stepping ----------------------------------------------------------

    def history_sum(self, state: SolverState) -> np.ndarray:
        """``sum_{j=1}^{n-1} d_j E^j`` for the step being computed, ascending in ``j``."""
        n = state.n + 1
        d, _ = self.weights.history_weights(n)
        out = np.zeros(self.grid.shape)
        hist = state.history

        def accumulate(s):
            acc = out[s]
            tmp = np.empty_like(acc)
            for j in range(1, n):
                np.multiply(hist[j - 1, s], d[j - 1], out=tmp)
                acc += tmp

        self._map(accumulate, self.grid.shape[0])
        return out

    def assemble_rhs(self, state: SolverState) -> np.ndarray:
        """Right-hand side at the Gauss points for step ``state.n + 1``."""
        n = state.n + 1
        if n > self.config.steps:
            raise IndexError(f"step {n} beyond the final step {self.config.steps}")
        w = self.weights
        _, tail = w.history_weights(n)
        dt = self.config.dt
        t_half = (n - 0.5) * dt
        rhs = self.history_sum(state)
        rhs += dt * tail * self.phi_grid
        rhs += self.mu * self.laplacian_values(state.gamma)
        rhs += self.mu * np.broadcast_to(self.config.problem.f(self._X, self._Y, t_half), rhs.shape)
        return rhs

    def step(self, state: SolverState) -> SolverState:
        """Advance ``state`` by one step in place and return it."""
        rhs = self.assemble_rhs(state)
        try:
            nu = self._increment_solver(rhs)
        except np.linalg.LinAlgError as exc:
            raise RuntimeError(f"linear solve failed at step {state.n + 1}: {exc}") from exc
        state.history[state.n] = self.collocation_values(nu)
        state.coeffs = SplineCoeffs2D(self.space, state.gamma + nu)
        state.n += 1
        state.t = state.n * self.config.dt
        return state

    def run(self, callback: Callable | None = None) -> SolverState:
        """March to the final time; ``callback(n, t_n, state)`` is called after every step."""
        state = self.init_state()
        for _ in range(self.config.steps):
            self.step(state)
            if callback is not None:
                callback(state.n, state.t, state)
        return state


def run(config: SchemeConfig, callback: Callable | None = None) -> SolverState:
    """Build the solver for ``config`` and run it to the final time."""
    with AdiOscSolver(config) as solver:
        return solver.run(callback)

