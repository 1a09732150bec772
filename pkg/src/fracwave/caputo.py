"""L1 discretization of the Caputo derivative of order 1 < alpha < 2."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma(x: float) -> float:
    """Gamma function by the Lanczos approximation (relative error ~1e-15)."""
    x = float(x)
    if x <= 0.0 and x == math.floor(x):
        raise ValueError(f"gamma has a pole at {x}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))
    x -= 1.0
    acc = _LANCZOS_COEFFS[0]
    for i, c in enumerate(_LANCZOS_COEFFS[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 1.0 < alpha < 2.0:
        raise ValueError(f"fractional order must satisfy 1 < alpha < 2, got {alpha}")
    return alpha


def l1_coefficients(alpha: float, count: int) -> np.ndarray:
    """``b_j = (j+1)^(2-alpha) - j^(2-alpha)`` for ``j = 0..count-1``.

    Evaluated as ``j^(2-alpha) * expm1((2-alpha) * log1p(1/j))`` to avoid
    cancellation for large ``j``.
    """
    beta = 2.0 - alpha
    j = np.arange(1, count, dtype=float)
    b = np.empty(count)
    b[0] = 1.0
    b[1:] = j**beta * np.expm1(beta * np.log1p(1.0 / j))
    return b


@dataclass(frozen=True)
class L1Weights:
    """L1 coefficients for a run of ``steps`` uniform time steps of size ``dt``."""

    alpha: float
    dt: float
    b: np.ndarray
    diffs: np.ndarray
    mu: float

    @property
    def steps(self) -> int:
        return self.b.size

    @property
    def prefactor(self) -> float:
        """``dt^(1-alpha) / Gamma(3-alpha)``."""
        return self.dt ** (1.0 - self.alpha) / gamma(3.0 - self.alpha)

    def history_weights(self, n: int) -> tuple[np.ndarray, float]:
        """Weights ``d_j = b_{n-j-1} - b_{n-j}`` (j = 1..n-1) and the tail ``b_{n-1}``.

        ``d`` is a read-only view into the cached differences, indexed so that
        ``d[j-1]`` multiplies the increment of step ``j``.
        """
        if not 1 <= n <= self.steps:
            raise IndexError(f"step index {n} outside 1..{self.steps}")
        return self.diffs[n - 1 : 0 : -1] if n > 1 else self.diffs[:0], float(self.b[n - 1])


def build_weights(alpha: float, dt: float, steps: int) -> L1Weights:
    """Cache the L1 coefficients and the scale ``mu = Gamma(3-alpha) dt^alpha``."""
    alpha = check_alpha(alpha)
    if not dt > 0.0:
        raise ValueError(f"time step must be positive, got {dt}")
    if int(steps) != steps or steps < 1:
        raise ValueError(f"number of steps must be a positive integer, got {steps}")
    b = l1_coefficients(alpha, int(steps))
    # diffs[k] = b_{k-1} - b_k, diffs[0] unused
    diffs = np.zeros_like(b)
    diffs[1:] = b[:-1] - b[1:]
    b.setflags(write=False)
    diffs.setflags(write=False)
    return L1Weights(alpha, float(dt), b, diffs, gamma(3.0 - alpha) * dt**alpha)


def l1_caputo_apply(w: L1Weights, samples, phi_value: float) -> float:
    """L1 approximation of the Caputo derivative of a scalar series at ``t_{n-1/2}``.

    ``samples`` holds ``v^0..v^n`` on the uniform grid; ``phi_value`` is the
    initial slope ``v'(0)``.
    """
    v = np.asarray(samples, dtype=float)
    if v.size < 2:
        raise ValueError("need at least two samples")
    n = v.size - 1
    slopes = (v[1:] - v[:-1]) / w.dt
    d, tail = w.history_weights(n)
    hist = 0.0
    for j in range(1, n):
        hist += d[j - 1] * slopes[j - 1]
    return w.prefactor * (w.b[0] * slopes[n - 1] - hist - tail * phi_value)
