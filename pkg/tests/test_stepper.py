import numpy as np
import pytest

from fracwave.hermite import hermite_interpolant_2d
from fracwave.norms import hnorm_error
from fracwave.oracle import dense_kron_solve, kron_apply, naive_l1_history, unfactored_cn_solve
from fracwave.problems import Problem, paper_example, polynomial_problem
from fracwave.stepper import AdiOscSolver, SchemeConfig, run


def zero(x, y, *args):
    return 0.0 * x * y


def homogeneous(alpha=1.5):
    return Problem("zero", alpha, zero, zero, lambda x, y, t: 0.0 * x * y, (zero, zero, zero))


def test_config_validation():
    pb = paper_example(1.5)
    with pytest.raises(ValueError, match="integer"):
        SchemeConfig(pb, dt=0.3, nx=2)
    with pytest.raises(ValueError):
        SchemeConfig(pb, dt=0.1, nx=2, t_final=0.0)
    with pytest.raises(ValueError):
        SchemeConfig(pb, dt=0.1, nx=2, init_mode="projection")
    cfg = SchemeConfig(pb, dt=1 / 64, nx=4)
    assert cfg.steps == 64 and cfg.ny == 4


def test_initial_state_of_example_is_zero():
    for mode in ("interpolant", "zero"):
        with AdiOscSolver(SchemeConfig(paper_example(1.5), dt=0.25, nx=3, init_mode=mode)) as s:
            assert not s.init_state().gamma.any()


def test_interpolant_initial_state_reproduces_bubble():
    bub = polynomial_problem(1.5).exact.spatial
    pb = Problem("bubble-start", 1.5, lambda x, y: bub(x, y), zero, lambda x, y, t: 0 * x,
                 (lambda x, y: bub(x, y, 1, 0), lambda x, y: bub(x, y, 0, 1), lambda x, y: bub(x, y, 1, 1)))
    with AdiOscSolver(SchemeConfig(pb, dt=0.5, nx=3, ny=4)) as s:
        c = s.init_state().coeffs
    assert hnorm_error(c, lambda x, y, dx=0, dy=0: bub(x, y, dx, dy), 2) <= 1e-12


def test_first_rhs_is_source_only():
    pb = paper_example(1.5)
    dt = 0.1
    with AdiOscSolver(SchemeConfig(pb, dt=dt, nx=3)) as s:
        X, Y = s.grid.mesh()
        rhs = s.assemble_rhs(s.init_state())
        np.testing.assert_allclose(rhs, s.mu * pb.f(X, Y, dt / 2), rtol=1e-14)


def test_homogeneous_problem_stays_zero():
    with AdiOscSolver(SchemeConfig(homogeneous(), dt=0.1, nx=3)) as s:
        state = s.init_state()
        assert not s.assemble_rhs(state).any()
        s.step(state)
        assert not state.gamma.any()
    assert not run(SchemeConfig(homogeneous(1.2), dt=0.05, nx=2)).gamma.any()


def test_history_cache_and_factorization_residual():
    pb = paper_example(1.5)
    cfg = SchemeConfig(pb, dt=1 / 20, nx=3)
    with AdiOscSolver(cfg) as s:
        state = s.init_state()
        prev = state.gamma.copy()
        for n in range(1, cfg.steps + 1):
            rhs = s.assemble_rhs(state)
            s.step(state)
            nu = state.gamma - prev
            # stored increment equals the increment evaluated at the Gauss points
            np.testing.assert_allclose(state.history[n - 1], s.collocation_values(nu), atol=1e-14)
            if n % 10 == 1:
                applied = kron_apply(s.mx.operator(s.mu), s.my.operator(s.mu), nu)
                assert np.abs(applied - rhs).max() <= 1e-10 * np.abs(rhs).max()
            prev = state.gamma.copy()
        assert state.increments().shape == (cfg.steps,) + s.grid.shape
        assert state.t == pytest.approx(1.0)


def test_increment_matches_dense_solve():
    cfg = SchemeConfig(paper_example(1.5), dt=1 / 5, nx=3)
    with AdiOscSolver(cfg) as s:
        state = s.init_state()
        for _ in range(5):
            rhs = s.assemble_rhs(state)
            ref = dense_kron_solve(s.mx.A, s.mx.B, s.my.A, s.my.B, s.mu, rhs)
            np.testing.assert_allclose(s.adi_increment(rhs), ref, rtol=0, atol=1e-10 * np.abs(ref).max())
            s.step(state)


def test_history_sum_at_step_three():
    cfg = SchemeConfig(paper_example(1.7), dt=0.1, nx=2)
    with AdiOscSolver(cfg) as s:
        state = s.init_state()
        values = [s.collocation_values(state.gamma)]
        for _ in range(2):
            s.step(state)
            values.append(s.collocation_values(state.gamma))
        got = s.history_sum(state)
        for i, j in [(0, 0), (1, 2), (3, 3)]:
            ref = cfg.dt * naive_l1_history([v[i, j] for v in values], s.weights, 3)
            assert got[i, j] == pytest.approx(ref, rel=1e-13, abs=1e-18)


def test_boundary_stays_homogeneous():
    state = run(SchemeConfig(paper_example(1.5), dt=1 / 8, nx=4))
    s = np.linspace(0, 1, 33)
    for x, y in [(s, 0 * s), (s, 0 * s + 1), (0 * s, s), (0 * s + 1, s)]:
        assert np.abs(state.coeffs(x, y)).max() <= 1e-12


def test_threads_and_solver_choice_are_bitwise_neutral():
    pb = paper_example(1.5)
    base = run(SchemeConfig(pb, dt=1 / 16, nx=5)).gamma
    np.testing.assert_array_equal(run(SchemeConfig(pb, dt=1 / 16, nx=5, threads=4)).gamma, base)
    banded = run(SchemeConfig(pb, dt=1 / 16, nx=5, solver="banded")).gamma
    np.testing.assert_allclose(banded, base, rtol=0, atol=1e-12 * np.abs(base).max())


def test_callback_sees_every_step():
    seen = []
    run(SchemeConfig(paper_example(1.5), dt=0.25, nx=2), lambda n, t, st: seen.append((n, t)))
    assert seen == [(1, 0.25), (2, 0.5), (3, 0.75), (4, 1.0)]


def test_solver_failure_reports_step():
    def broken(rhs):
        raise np.linalg.LinAlgError("boom")

    with AdiOscSolver(SchemeConfig(paper_example(1.5), dt=0.5, nx=2), increment_solver=broken) as s:
        with pytest.raises(RuntimeError, match="step 1"):
            s.step(s.init_state())


def test_nonzero_initial_data():
    # u = (1 + t) x(1-x) y(1-y): exercises varphi, phi and the interpolant start.
    # L1 and the collocation are exact for it, so only the ADI perturbation is left.
    alpha = 1.5
    bub = polynomial_problem(alpha).exact.spatial

    def f(x, y, t):
        return -(1 + t) * (bub(x, y, 2, 0) + bub(x, y, 0, 2))

    pb = Problem("linear-in-time", alpha, lambda x, y: bub(x, y), lambda x, y: bub(x, y), f,
                 (lambda x, y: bub(x, y, 1, 0), lambda x, y: bub(x, y, 0, 1), lambda x, y: bub(x, y, 1, 1)))
    x = np.linspace(0, 1, 11)
    exact = 2 * np.outer(x * (1 - x), x * (1 - x))
    cn = unfactored_cn_solve(SchemeConfig(pb, dt=1 / 10, nx=2))
    assert np.abs(cn.coeffs.evaluate_grid(x, x) - exact).max() <= 1e-12
    errs = [np.abs(run(SchemeConfig(pb, dt=dt, nx=2)).coeffs.evaluate_grid(x, x) - exact).max()
            for dt in (1 / 10, 1 / 20, 1 / 40)]
    assert errs[0] > errs[1] > errs[2] > 0
