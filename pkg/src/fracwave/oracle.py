"""Brute-force reference computations for testing the fast paths.

Nothing here is used by the solver itself.  Dense Kronecker systems cost
O((N_x N_y)^3), so these are only meant for small meshes.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .caputo import L1Weights
from .stepper import AdiOscSolver, SchemeConfig

MAX_DENSE_SIDE = 16


def kron_apply(P, Q, X) -> np.ndarray:
    """``(P (x) Q) vec(X)`` with x-major (row-major) vectorization, returned as a matrix.

    Equals ``P @ X @ Q.T``.
    """
    return (np.kron(P, Q) @ np.asarray(X, dtype=float).ravel()).reshape(P.shape[0], Q.shape[0])


def dense_kron_solve(Ax, Bx, Ay, By, mu: float, F) -> np.ndarray:
    """Solve ``(B_x + mu/2 A_x) (x) (B_y + mu/2 A_y) nu = F`` as one dense system."""
    Ax, Bx, Ay, By = (np.asarray(m, dtype=float) for m in (Ax, Bx, Ay, By))
    if max(Ax.shape[0], Ay.shape[0]) > MAX_DENSE_SIDE:
        raise ValueError(f"dense reference limited to {MAX_DENSE_SIDE} unknowns per direction")
    K = np.kron(Bx + 0.5 * mu * Ax, By + 0.5 * mu * Ay)
    F = np.asarray(F, dtype=float)
    return scipy.linalg.solve(K, F.ravel()).reshape(F.shape)


def unfactored_operator(solver: AdiOscSolver) -> np.ndarray:
    """``B_x (x) B_y + mu/2 (A_x (x) B_y + B_x (x) A_y)``: the 2D operator without the ADI term."""
    mx, my, mu = solver.mx, solver.my, solver.mu
    return np.kron(mx.B, my.B) + 0.5 * mu * (np.kron(mx.A, my.B) + np.kron(mx.B, my.A))


def unfactored_cn_solve(config: SchemeConfig):
    """Run the Crank-Nicolson collocation scheme without the ADI perturbation.

    Uses the stepper's right-hand side assembly; only the increment solve is
    replaced by a dense LU of the full 2D operator.  Returns the final state.
    """
    if max(config.nx, config.ny) > 8:
        raise ValueError("unfactored reference limited to 8 elements per direction")
    if config.steps > 200:
        raise ValueError("unfactored reference limited to 200 time steps")
    probe = AdiOscSolver(config)
    lu = scipy.linalg.lu_factor(unfactored_operator(probe))
    probe.close()

    def dense_increment(rhs):
        return scipy.linalg.lu_solve(lu, rhs.ravel()).reshape(rhs.shape)

    with AdiOscSolver(config, increment_solver=dense_increment) as solver:
        return solver.run()


def naive_l1_history(values, weights: L1Weights, n: int) -> float:
    """``sum_{j=1}^{n-1} (b_{n-j-1} - b_{n-j}) (v^j - v^{j-1}) / dt`` from scratch.

    ``values`` is the time series ``v^0, v^1, ...`` at one point; only entries
    up to ``v^{n-1}`` are used.
    """
    v = [float(x) for x in values]
    if not 1 <= n <= len(v):
        raise IndexError(f"step {n} needs at least {n} samples")
    b = weights.b
    total = 0.0
    for j in range(1, n):
        coeff = b[n - j - 1] - b[n - j]
        slope = 0.0
        for sign, k in ((1.0, j), (-1.0, j - 1)):
            slope += sign * v[k]
        total += coeff * (slope / weights.dt)
    return total
