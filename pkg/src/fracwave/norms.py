"""Error measurement for spline solutions against exact solutions.

``exact`` callables take ``(x, y, dx, dy)`` with broadcastable arrays and
return the partial derivative of order ``(dx, dy)`` at the measurement time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hermite import SplineCoeffs2D
from .mesh import CollocationGrid, composite_points, gauss_rule

NORM_QUADRATURE_POINTS = 10
DEFAULT_SAMPLES_PER_CELL = 100
_LINF_CHUNK = 2_000_000


def discrete_inner(u_vals, v_vals, grid: CollocationGrid) -> float:
    """Discrete inner product over the Gauss collocation grid."""
    u_vals = np.asarray(u_vals, dtype=float)
    v_vals = np.asarray(v_vals, dtype=float)
    if u_vals.shape != grid.shape or v_vals.shape != grid.shape:
        raise ValueError(f"grid values must have shape {grid.shape}, got {u_vals.shape} and {v_vals.shape}")
    return float(grid.wx @ (u_vals * v_vals) @ grid.wy)


def discrete_norm(v_vals, grid: CollocationGrid) -> float:
    return math.sqrt(discrete_inner(v_vals, v_vals, grid))


def _multi_indices(level: int):
    return [(a, s - a) for s in range(level + 1) for a in range(s, -1, -1)]


def hnorm_error(c: SplineCoeffs2D, exact, level: int, points: int = NORM_QUADRATURE_POINTS,
                ordered: bool = True) -> float:
    """H^level norm (level 0..2) of ``exact - U`` by composite Gauss quadrature.

    The squared norm sums the squared L2 norms of all partial derivatives of
    total order at most ``level``.  With ``ordered=True`` derivatives are
    counted as ordered sequences, so the mixed second derivative enters twice
    (as d_xy and d_yx, i.e. the full Hessian); ``ordered=False`` counts each
    multi-index once.
    """
    if level not in (0, 1, 2):
        raise ValueError(f"norm level must be 0, 1 or 2, got {level}")
    rule = gauss_rule(points)
    qx, wx = composite_points(c.space.bx.partition, rule)
    qy, wy = composite_points(c.space.by.partition, rule)
    X, Y = np.meshgrid(qx, qy, indexing="ij")
    total = 0.0
    for dx, dy in _multi_indices(level):
        diff = np.broadcast_to(exact(X, Y, dx, dy), X.shape) - c.evaluate_grid(qx, qy, dx, dy)
        weight = 2.0 if ordered and dx == 1 and dy == 1 else 1.0
        total += weight * float(wx @ (diff * diff) @ wy)
    return math.sqrt(total)


def sample_points(partition, samples_per_cell: int) -> np.ndarray:
    """Equally spaced points per element, endpoints included, merged across elements."""
    if samples_per_cell < 2:
        raise ValueError("need at least two samples per cell")
    s = np.linspace(0.0, 1.0, samples_per_cell)
    h = partition.element_widths
    pts = partition.nodes[:-1, None] + h[:, None] * s[None, :]
    pts[:, -1] = partition.nodes[1:]
    return np.unique(pts.ravel())


def linf_error(c: SplineCoeffs2D, exact, samples_per_cell: int = DEFAULT_SAMPLES_PER_CELL) -> float:
    """Maximum of ``|exact - U|`` over an equally spaced sample grid in every cell."""
    xs = sample_points(c.space.bx.partition, samples_per_cell)
    ys = sample_points(c.space.by.partition, samples_per_cell)
    mx = c.space.bx.basis_matrix(xs)
    my = c.space.by.basis_matrix(ys)
    partial = np.asarray(mx @ c.gamma)  # (len(xs), My)
    rows = max(1, _LINF_CHUNK // ys.size)
    worst = 0.0
    for start in range(0, xs.size, rows):
        sl = slice(start, start + rows)
        vals = np.asarray(my @ partial[sl].T).T
        X, Y = np.meshgrid(xs[sl], ys, indexing="ij")
        err = np.abs(np.broadcast_to(exact(X, Y, 0, 0), X.shape) - vals)
        worst = max(worst, float(err.max()))
    return worst


def nodal_derivative_error(c: SplineCoeffs2D, exact_x, exact_y) -> float:
    """Largest error of ``U_x`` and ``U_y`` over all partition nodes.

    ``exact_x`` and ``exact_y`` take ``(x, y)`` arrays.
    """
    xn = c.space.bx.partition.nodes
    yn = c.space.by.partition.nodes
    X, Y = np.meshgrid(xn, yn, indexing="ij")
    ex = np.abs(np.broadcast_to(exact_x(X, Y), X.shape) - c.evaluate_grid(xn, yn, 1, 0))
    ey = np.abs(np.broadcast_to(exact_y(X, Y), X.shape) - c.evaluate_grid(xn, yn, 0, 1))
    return float(max(ex.max(), ey.max()))


def convergence_rate(e_coarse: float, e_fine: float, h_coarse: float, h_fine: float) -> float:
    """Observed order ``log(e_coarse/e_fine) / log(h_coarse/h_fine)``."""
    if not (e_coarse > 0 and e_fine > 0):
        raise ValueError(f"errors must be positive to take logarithms, got {e_coarse}, {e_fine}")
    if not (h_coarse > 0 and h_fine > 0) or not h_coarse > h_fine:
        raise ValueError(f"need h_coarse > h_fine > 0, got {h_coarse}, {h_fine}")
    return math.log(e_coarse / e_fine) / math.log(h_coarse / h_fine)


NORM_NAMES = ("l2", "linf", "h1", "h2", "nodal")


@dataclass(frozen=True)
class ErrorReport:
    """Errors of one run; norms that were not requested are ``None``."""

    n: int
    dt: float
    alpha: float
    l2: float | None = None
    linf: float | None = None
    h1: float | None = None
    h2: float | None = None
    nodal: float | None = None
    samples_per_cell: int | None = None
    extra: dict = field(default_factory=dict)

    def get(self, name: str) -> float | None:
        return getattr(self, name)


def measure(c: SplineCoeffs2D, exact, norms=NORM_NAMES, samples_per_cell: int = DEFAULT_SAMPLES_PER_CELL,
            n: int = 0, dt: float = 0.0, alpha: float = 0.0) -> ErrorReport:
    """Compute the requested error norms of ``c`` against the snapshot ``exact``."""
    unknown = set(norms) - set(NORM_NAMES)
    if unknown:
        raise ValueError(f"unknown norms {sorted(unknown)}; choose from {NORM_NAMES}")
    vals = {}
    if "l2" in norms:
        vals["l2"] = hnorm_error(c, exact, 0)
    if "h1" in norms:
        vals["h1"] = hnorm_error(c, exact, 1)
    if "h2" in norms:
        vals["h2"] = hnorm_error(c, exact, 2)
    if "linf" in norms:
        vals["linf"] = linf_error(c, exact, samples_per_cell)
    if "nodal" in norms:
        vals["nodal"] = nodal_derivative_error(
            c, lambda x, y: exact(x, y, 1, 0), lambda x, y: exact(x, y, 0, 1)
        )
    return ErrorReport(n=n, dt=dt, alpha=alpha, samples_per_cell=samples_per_cell if "linf" in norms else None,
                       **vals)
