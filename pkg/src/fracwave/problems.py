"""Manufactured test problems for the fractional diffusion-wave equation.

Each problem has the separable exact solution ``u = t^p g(x, y)`` with ``g``
vanishing on the boundary of the unit square.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .caputo import check_alpha, gamma


def caputo_power(alpha: float, p: float, t):
    """Exact Caputo derivative of order ``alpha`` of ``t^p``."""
    alpha = check_alpha(alpha)
    if not p > 1.0:
        raise ValueError(f"power must exceed 1 for an integrable second derivative, got {p}")
    t = np.asarray(t, dtype=float)
    return gamma(p + 1.0) / gamma(p + 1.0 - alpha) * t ** (p - alpha)


@dataclass(frozen=True)
class SeparableSolution:
    """``u(x, y, t) = t^power * spatial(x, y)``.

    ``spatial(x, y, dx, dy)`` returns the partial derivative of order
    ``(dx, dy)``, with ``dx, dy`` in 0..2.
    """

    alpha: float
    power: float
    spatial: Callable

    def __call__(self, x, y, t, dx: int = 0, dy: int = 0):
        return t**self.power * self.spatial(x, y, dx, dy)

    def at(self, t: float) -> Callable:
        """Spatial snapshot ``(x, y, dx, dy) -> d^{dx+dy} u(x, y, t)``."""
        return lambda x, y, dx=0, dy=0: self(x, y, t, dx, dy)

    def time_derivative(self, x, y, t):
        return self.power * t ** (self.power - 1.0) * self.spatial(x, y, 0, 0)

    def caputo(self, x, y, t):
        return caputo_power(self.alpha, self.power, t) * self.spatial(x, y, 0, 0)

    def laplacian(self, x, y, t):
        return t**self.power * (self.spatial(x, y, 2, 0) + self.spatial(x, y, 0, 2))


@dataclass(frozen=True)
class Problem:
    """Data of the initial-boundary value problem on the unit square.

    ``varphi`` and ``phi`` are the initial value and initial velocity,
    ``f`` the source.  ``varphi_derivatives`` supplies ``(u_x, u_y, u_xy)`` of
    ``varphi`` for the Hermite interpolant; ``exact`` is optional.
    """

    name: str
    alpha: float
    varphi: Callable
    phi: Callable
    f: Callable
    varphi_derivatives: tuple[Callable, Callable, Callable] | None = None
    exact: SeparableSolution | None = None
    t_final: float = 1.0

    def residual(self, x, y, t):
        """PDE residual of the exact solution, ``D^alpha u - Laplace u - f``."""
        if self.exact is None:
            raise ValueError(f"problem {self.name!r} has no exact solution")
        u = self.exact
        return u.caputo(x, y, t) - u.laplacian(x, y, t) - self.f(x, y, t)


def _zero(x, y):
    return np.zeros(np.broadcast(x, y).shape)


def _sine_mode(x, y, dx=0, dy=0):
    px, py = np.pi * np.asarray(x, dtype=float), np.pi * np.asarray(y, dtype=float)
    fx = (np.sin, np.cos, lambda z: -np.sin(z))[dx](px)
    fy = (np.sin, np.cos, lambda z: -np.sin(z))[dy](py)
    return np.pi ** (dx + dy) * fx * fy


def _bubble(x, y, dx=0, dy=0):
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    fx = (x * (1 - x), 1 - 2 * x, np.full_like(x, -2.0))[dx]
    fy = (y * (1 - y), 1 - 2 * y, np.full_like(y, -2.0))[dy]
    return fx * fy


def paper_example(alpha: float) -> Problem:
    """``u = t^(2+alpha) sin(pi x) sin(pi y)`` on ``T = 1`` with zero initial data."""
    alpha = check_alpha(alpha)
    scale = gamma(3.0 + alpha) / 2.0

    def f(x, y, t):
        t = np.asarray(t, dtype=float)
        return (scale * t**2 + 2.0 * np.pi**2 * t ** (2.0 + alpha)) * _sine_mode(x, y)

    exact = SeparableSolution(alpha, 2.0 + alpha, _sine_mode)
    return Problem("paper-example", alpha, _zero, _zero, f, (_zero, _zero, _zero), exact)


def polynomial_problem(alpha: float) -> Problem:
    """``u = t^(2+alpha) x(1-x) y(1-y)``; the spatial part lies in the spline space."""
    alpha = check_alpha(alpha)
    p = 2.0 + alpha

    def f(x, y, t):
        g = _bubble(x, y)
        neg_lap = 2.0 * np.asarray(y) * (1 - np.asarray(y)) + 2.0 * np.asarray(x) * (1 - np.asarray(x))
        return caputo_power(alpha, p, t) * g + np.asarray(t, dtype=float) ** p * neg_lap

    exact = SeparableSolution(alpha, p, _bubble)
    return Problem("polynomial", alpha, _zero, _zero, f, (_zero, _zero, _zero), exact)


PROBLEMS = {"paper-example": paper_example, "polynomial": polynomial_problem}


def get_problem(name: str, alpha: float) -> Problem:
    try:
        factory = PROBLEMS[name]
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; available: {', '.join(sorted(PROBLEMS))}") from None
    return factory(alpha)
