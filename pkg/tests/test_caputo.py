import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fracwave.caputo import build_weights, check_alpha, gamma, l1_caputo_apply, l1_coefficients
from fracwave.verify import ALPHA_GRID, l1_coefficient_violations

alphas = st.floats(1.01, 1.99)


@pytest.mark.parametrize("x", [0.5, 1.0, 1.5, 2.5, 3.7, 0.01, -0.5, -2.3, 10.2])
def test_gamma_matches_stdlib(x):
    assert gamma(x) == pytest.approx(math.gamma(x), rel=1e-13)


def test_gamma_anchor_values():
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert gamma(1.0) == pytest.approx(1.0, rel=1e-14)
    assert gamma(1.5) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-14)


@pytest.mark.parametrize("alpha", [1.0, 2.0, 0.5, float("nan")])
def test_alpha_range(alpha):
    with pytest.raises(ValueError):
        check_alpha(alpha)


def test_first_coefficients():
    w = build_weights(1.5, 0.1, 10)
    assert w.b[0] == 1.0
    assert w.b[1] == pytest.approx(math.sqrt(2) - 1, abs=1e-15)
    assert w.mu == pytest.approx(0.02802495, abs=1e-8)
    assert w.mu == pytest.approx(math.gamma(1.5) * 0.1**1.5, rel=1e-14)


def test_history_weights_examples():
    w = build_weights(1.5, 0.1, 10)
    d, tail = w.history_weights(1)
    assert d.size == 0 and tail == 1.0
    d, tail = w.history_weights(2)
    np.testing.assert_allclose(d, [2 - math.sqrt(2)], atol=1e-15)
    assert tail == pytest.approx(math.sqrt(2) - 1)
    with pytest.raises(IndexError):
        w.history_weights(11)


@pytest.mark.parametrize("alpha", [1.1, 1.5, 1.9])
def test_history_weights_telescope(alpha):
    w = build_weights(alpha, 1e-3, 500)
    for n in range(1, 501):
        d, tail = w.history_weights(n)
        assert d.sum() + tail == pytest.approx(1.0, abs=1e-13)


def test_history_weights_order():
    w = build_weights(1.3, 0.01, 20)
    n = 7
    d, _ = w.history_weights(n)
    expect = [w.b[n - j - 1] - w.b[n - j] for j in range(1, n)]
    np.testing.assert_array_equal(d, expect)


def test_coefficient_properties_on_grid():
    for alpha in ALPHA_GRID:
        assert l1_coefficient_violations(l1_coefficients(alpha, 10_000), alpha) == []


def test_cancellation_safe_form():
    alpha, j = 1.99, 9_999
    b = l1_coefficients(alpha, j + 1)[j]
    exact = float(sum(s * (j + e) ** (2 - alpha) for s, e in [(1, 1), (-1, 0)]))  # naive for reference
    assert b == pytest.approx(exact, rel=1e-9)
    assert b > 0


@given(alphas, st.integers(2, 400))
def test_partial_sums(alpha, n):
    b = l1_coefficients(alpha, n)
    assert math.fsum(b) == pytest.approx(n ** (2 - alpha), rel=1e-12)


def test_apply_constant_and_linear_series():
    w = build_weights(1.5, 0.1, 10)
    assert l1_caputo_apply(w, np.full(8, 3.0), 0.0) == 0.0
    t = np.arange(11) * 0.1
    for n in range(1, 11):
        assert l1_caputo_apply(w, t[: n + 1], 1.0) == pytest.approx(0.0, abs=1e-12)


def _t_squared_residual(alpha, dt, t_end):
    steps = round(t_end / dt)
    w = build_weights(alpha, dt, steps)
    t = np.arange(steps + 1) * dt
    approx = l1_caputo_apply(w, t**2, 0.0)
    exact = 2.0 / math.gamma(3 - alpha) * ((steps - 0.5) * dt) ** (2 - alpha)
    return abs(approx - exact)


def test_t_squared_residual():
    assert _t_squared_residual(1.5, 0.01, 0.5) < 5e-3


@pytest.mark.parametrize("alpha", [1.2, 1.5, 1.8])
def test_truncation_order(alpha):
    errs = [_t_squared_residual(alpha, 0.5 / m, 0.5) for m in (50, 100, 200, 400)]
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert rates[-1] >= 3 - alpha - 0.1
