"""Partitions of the unit interval, Gauss-Legendre rules and collocation grids."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MAX_GAUSS_POINTS = 16
QUASI_UNIFORM_WARN = 10.0


@dataclass(frozen=True)
class Partition1D:
    """A partition ``0 = x_0 < x_1 < ... < x_N = 1`` of [0, 1]."""

    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("a partition needs at least two nodes")
        if nodes[0] != 0.0 or nodes[-1] != 1.0:
            raise ValueError("partition must start at 0 and end at 1 exactly")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("partition nodes must be strictly increasing")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        if self.quasi_uniformity > QUASI_UNIFORM_WARN:
            warnings.warn(
                f"partition is far from quasi-uniform (h_max/h_min = {self.quasi_uniformity:.3g})",
                RuntimeWarning,
                stacklevel=3,
            )

    @property
    def n_elements(self) -> int:
        return self.nodes.size - 1

    @property
    def element_widths(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def h_max(self) -> float:
        return float(self.element_widths.max())

    @property
    def quasi_uniformity(self) -> float:
        """Ratio ``h_max / h_min``; measured only, never enforced."""
        h = self.element_widths
        return float(h.max() / h.min())

    def locate(self, x):
        """Element index (0-based) containing each point of ``x``.

        Points on an interior node are assigned to the element on their right,
        the right endpoint 1 to the last element.
        """
        x = np.asarray(x, dtype=float)
        if np.any(x < 0.0) or np.any(x > 1.0):
            raise ValueError("points must lie in [0, 1]")
        k = np.searchsorted(self.nodes, x, side="right") - 1
        return np.clip(k, 0, self.n_elements - 1)


def uniform_partition(n: int) -> Partition1D:
    """Uniform partition of [0, 1] into ``n`` elements."""
    if int(n) != n or n < 1:
        raise ValueError(f"number of elements must be a positive integer, got {n!r}")
    n = int(n)
    nodes = np.arange(n + 1, dtype=float) / n
    return Partition1D(nodes)


@dataclass(frozen=True)
class GaussRule:
    """Gauss-Legendre rule on [0, 1] (nodes increasing, weights summing to 1)."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def count(self) -> int:
        return self.nodes.size

    def integrate(self, func, a: float = 0.0, b: float = 1.0) -> float:
        x = a + (b - a) * self.nodes
        return float((b - a) * np.sum(self.weights * func(x)))


def _legendre_with_derivative(n: int, x: float) -> tuple[float, float]:
    p_prev, p = 1.0, x
    for k in range(2, n + 1):
        p_prev, p = p, ((2 * k - 1) * x * p - (k - 1) * p_prev) / k
    dp = n * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


@lru_cache(maxsize=None)
def _gauss_legendre_symmetric(count: int) -> tuple[tuple[float, ...], tuple[float, ...]]:
    # Roots on [-1, 1] by Newton iteration from the Chebyshev-like initial guess.
    if count == 1:
        return (0.0,), (2.0,)
    roots = []
    weights = []
    for i in range(1, count + 1):
        x = math.cos(math.pi * (i - 0.25) / (count + 0.5))
        for _ in range(100):
            p, dp = _legendre_with_derivative(count, x)
            dx = p / dp
            x -= dx
            if abs(dx) < 1e-16:
                break
        p, dp = _legendre_with_derivative(count, x)
        if abs(p) > 1e-15 * count:
            raise RuntimeError(f"Newton iteration for Legendre root {i} of degree {count} did not converge")
        roots.append(x)
        weights.append(2.0 / ((1.0 - x * x) * dp * dp))
    # descending cos -> ascending roots after reversal
    return tuple(reversed(roots)), tuple(reversed(weights))


def gauss_rule(count: int) -> GaussRule:
    """Gauss-Legendre rule with ``count`` points mapped to [0, 1].

    Nodes are the Legendre roots found by Newton iteration (cached per count),
    then symmetrized about 1/2.
    """
    if int(count) != count or not 1 <= count <= MAX_GAUSS_POINTS:
        raise ValueError(f"Gauss rule size must be in 1..{MAX_GAUSS_POINTS}, got {count!r}")
    roots, weights = _gauss_legendre_symmetric(int(count))
    t = np.array(roots)
    w = np.array(weights)
    t = 0.5 * (t - t[::-1])
    w = 0.5 * (w + w[::-1])
    nodes = 0.5 * (1.0 + t)
    weights01 = 0.5 * w
    nodes.setflags(write=False)
    weights01.setflags(write=False)
    return GaussRule(nodes, weights01)


def composite_points(partition: Partition1D, rule: GaussRule) -> tuple[np.ndarray, np.ndarray]:
    """Gauss points of every element, element-major, with their weights ``h_i * w_k``."""
    h = partition.element_widths
    pts = partition.nodes[:-1, None] + h[:, None] * rule.nodes[None, :]
    wts = h[:, None] * rule.weights[None, :]
    return pts.ravel(), wts.ravel()


@dataclass(frozen=True)
class CollocationGrid:
    """Tensor grid of Gauss collocation points over the unit square."""

    px: Partition1D
    py: Partition1D
    rule: GaussRule
    xi_x: np.ndarray = field(init=False)
    xi_y: np.ndarray = field(init=False)
    wx: np.ndarray = field(init=False)
    wy: np.ndarray = field(init=False)

    def __post_init__(self):
        xi_x, wx = composite_points(self.px, self.rule)
        xi_y, wy = composite_points(self.py, self.rule)
        for name, value in (("xi_x", xi_x), ("xi_y", xi_y), ("wx", wx), ("wy", wy)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def shape(self) -> tuple[int, int]:
        return self.xi_x.size, self.xi_y.size

    @property
    def weights(self) -> np.ndarray:
        """2D weights ``h_i^x h_j^y w_k w_l``, indexed like the point grid."""
        return np.outer(self.wx, self.wy)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.xi_x, self.xi_y, indexing="ij")


def collocation_grid(px: Partition1D, py: Partition1D, rule: GaussRule | None = None) -> CollocationGrid:
    """Collocation points for piecewise Hermite cubics: the 2-point Gauss rule per element."""
    rule = gauss_rule(2) if rule is None else rule
    if rule.count != 2:
        raise ValueError("Hermite cubic collocation uses the 2-point Gauss rule")
    return CollocationGrid(px, py, rule)
