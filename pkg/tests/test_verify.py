"""Certificate checks and barrier builders on closed-form problems."""

import math

import numpy as np
import pytest

from maflow import grid as gridmod
from maflow import background as bgmod
from maflow import parabolic
from maflow import verify


def _full(grid, broadcastable):
    return np.ascontiguousarray(np.broadcast_to(broadcastable, grid.shape))


def _cos_values(grid, amp):
    x = grid.axis_coords(0)
    return _full(grid, amp * np.cos(2.0 * np.pi * x))


def _flat_problem(m=16, alpha=0.0, T=1.0, phi0_amp=0.0, mu=None):
    grid = gridmod.TorusGrid(1, m)
    family = bgmod.ConstantFamily(np.array([[1.0]]))
    if mu is None:
        mu = parabolic.DensitySpec(f=1.0)
    phi0 = gridmod.ScalarField(grid, _cos_values(grid, phi0_amp))
    forcing = parabolic.ForcingSpec("linear", alpha=alpha)
    return grid, parabolic.FlowProblem(family, mu, forcing, phi0, T)


def test_constant_barrier_residual_closed_form():
    # on omega = I, mu = 1, F = 0 a constant-in-space barrier c + r t
    # has residual 1 - e^r at every node and time
    grid, problem = _flat_problem()
    down = verify.AffineBarrier(grid, np.zeros(grid.shape), -1.0)
    rep = verify.check_subsolution(down, problem, tol=1e-12, times=[0.5])
    assert rep.passed
    assert rep.worst_residual == pytest.approx(1.0 - math.exp(-1.0),
                                               rel=1e-14)
    assert rep.worst_time == 0.5
    assert rep.worst_node == (0, 0)

    up = verify.AffineBarrier(grid, np.zeros(grid.shape), 1.0)
    rep = verify.check_supersolution(up, problem, tol=1e-12, times=[0.5])
    assert rep.passed
    assert rep.worst_residual == pytest.approx(1.0 - math.e, rel=1e-14)
    assert rep.excluded_nodes == 0


def test_wrong_direction_fails():
    grid, problem = _flat_problem()
    up = verify.AffineBarrier(grid, np.zeros(grid.shape), 1.0)
    rep = verify.check_subsolution(up, problem, tol=0.1)
    assert not rep.passed
    down = verify.AffineBarrier(grid, np.zeros(grid.shape), -1.0)
    rep = verify.check_supersolution(down, problem, tol=0.1)
    assert not rep.passed


def test_stationary_zero_is_both():
    grid, problem = _flat_problem()
    flat = verify.AffineBarrier(grid, np.zeros(grid.shape), 0.0)
    assert verify.check_subsolution(flat, problem, tol=1e-15).passed
    assert verify.check_supersolution(flat, problem, tol=1e-15).passed


def test_cosine_residual_matches_discrete_symbol():
    # base a cos(2 pi x) with zero rate: residual is -(a lam/4) cos where
    # lam = (4/h^2) sin^2(pi h) is the second-difference symbol at k=1
    m = 16
    grid, problem = _flat_problem(m=m)
    a = 0.01
    lam = 4.0 / grid.h ** 2 * math.sin(math.pi * grid.h) ** 2
    peak = a * lam / 4.0
    bar = verify.AffineBarrier(grid, _cos_values(grid, a), 0.0)
    sub = verify.check_subsolution(bar, problem, tol=1.0, times=[0.5])
    sup = verify.check_supersolution(bar, problem, tol=1.0, times=[0.5])
    assert sub.worst_residual == pytest.approx(-peak, rel=1e-13)
    assert sup.worst_residual == pytest.approx(peak, rel=1e-13)
    assert sub.worst_node == (0, 0)
    assert sup.worst_node == (m // 2, 0)


def test_function_barrier_with_forcing():
    grid, problem = _flat_problem(alpha=1.0)
    ones = np.ones(grid.shape)
    bar = verify.FunctionBarrier(grid,
                                 fn=lambda t: math.sin(t) * ones,
                                 dfn=lambda t: math.cos(t) * ones)
    times = [0.3, 1.2]
    rep = verify.check_subsolution(bar, problem, tol=10.0, times=times)
    expect = min(1.0 - math.exp(math.cos(t) + math.sin(t)) for t in times)
    assert rep.worst_residual == pytest.approx(expect, rel=1e-13)


def test_per_node_rate_array():
    grid, _ = _flat_problem()
    rate = _cos_values(grid, 0.5)
    bar = verify.AffineBarrier(grid, np.zeros(grid.shape), rate)
    f = bar.field_at(2.0)
    assert np.array_equal(f.values, 2.0 * rate)
    assert np.array_equal(bar.dfield_dt(0.0), rate)


def test_vanishing_density_nodes_are_excluded():
    # canonical weight that is exactly zero on a block: those nodes are
    # excluded from the supersolution verdict and counted separately
    m = 16
    grid = gridmod.TorusGrid(1, m)
    e_u = np.ones(grid.shape)
    e_u[:4, :4] = 0.0
    mu = parabolic.DensitySpec(kind="canonical", f=1.0,
                               e_u=gridmod.ScalarField(grid, e_u))
    _, problem = _flat_problem(m=m, mu=mu)
    bar = verify.AffineBarrier(grid, np.zeros(grid.shape), 0.0)
    rep = verify.check_supersolution(bar, problem, tol=1e-12, times=[0.5])
    assert rep.passed
    assert rep.worst_residual == 0.0
    assert rep.excluded_nodes == 16
    assert rep.excluded_worst == pytest.approx(1.0, rel=1e-14)


def test_trajectory_candidate_self_certifies():
    grid, problem = _flat_problem(m=16, alpha=1.0, T=0.5, phi0_amp=0.0)
    phi0 = gridmod.ScalarField(grid, 0.3 * np.ones(grid.shape))
    problem = parabolic.FlowProblem(problem.family, problem.mu,
                                    problem.forcing, phi0, T=0.5)
    cfg = parabolic.SolverConfig(dt_rule="cfl", cfl_c=0.4,
                                 snapshot_times=[0.25, 0.5])
    traj = parabolic.solve(problem, cfg)
    assert verify.check_subsolution(traj, problem, tol=0.02).passed
    assert verify.check_supersolution(traj, problem, tol=0.02).passed


def test_trajectory_needs_two_snapshots():
    grid, problem = _flat_problem()
    traj = parabolic.Trajectory(problem, None)
    traj.record(0.0, problem.phi0.values, 0, math.nan)
    with pytest.raises(ValueError, match="two snapshots"):
        verify.check_subsolution(traj, problem, tol=1.0)


def test_subbarrier_brackets_initial_data():
    grid, problem = _flat_problem(m=32, alpha=1.0, phi0_amp=0.05)
    eps = 0.1
    bar, rep = verify.build_subbarrier(problem.phi0, problem, eps)
    assert rep.passed
    assert 0.0 < rep.eta < 1.0
    assert rep.drift >= 0.0
    assert rep.boundary_below_ok and rep.boundary_close_ok
    assert np.all(bar.base <= problem.phi0.values)
    assert np.all(bar.base >= problem.phi0.values - eps)
    # drifts downward, never upward
    assert bar.rate <= 0.0


def test_superbarrier_brackets_initial_data():
    grid, problem = _flat_problem(m=32, alpha=1.0, phi0_amp=0.05)
    eps = 0.1
    bar, rep = verify.build_superbarrier(problem.phi0, problem, eps)
    assert rep.passed
    assert rep.boundary_above_ok and rep.boundary_close_ok
    assert rep.bandwidth >= 0.0
    assert np.all(bar.base >= problem.phi0.values)
    assert np.all(bar.base <= problem.phi0.values + eps)


def test_superbarrier_eps_zero_keeps_data_bitwise():
    grid, problem = _flat_problem(m=16, alpha=1.0, phi0_amp=0.02)
    bar, rep = verify.build_superbarrier(problem.phi0, problem, 0.0)
    assert np.array_equal(bar.base, problem.phi0.values)
    assert rep.boundary_close_ok


def test_superbarrier_rejects_open_vanishing_density():
    m = 16
    grid = gridmod.TorusGrid(1, m)
    mask = np.zeros(grid.shape, dtype=bool)
    mu = parabolic.DensitySpec(kind="open_vanishing",
                               f=np.ones(grid.shape), mask=mask)
    _, problem = _flat_problem(m=m, mu=mu)
    with pytest.raises(ValueError, match="open-vanishing"):
        verify.build_superbarrier(problem.phi0, problem, 0.1)


def test_envelopes_bracket_and_certify():
    grid, problem = _flat_problem(m=16, alpha=1.0, phi0_amp=0.05)
    lower, upper, lo_rep, hi_rep = verify.build_envelopes(problem)
    assert lo_rep.passed and hi_rep.passed
    assert np.all(lower.base == np.min(problem.phi0.values))
    assert np.all(upper.base == np.max(problem.phi0.values))
    for t in (0.0, 0.5, 1.0):
        assert np.all(lower.field_at(t).values
                      <= upper.field_at(t).values)
    assert lower.rate <= 0.0 and upper.rate >= 0.0


def test_comparison_gap_closed_form():
    grid, problem = _flat_problem(m=16, phi0_amp=0.05)
    times = [0.0, 0.5, 1.0]
    lo = verify.AffineBarrier(grid, np.full(grid.shape, -0.05), 0.0)
    hi = verify.AffineBarrier(grid, np.full(grid.shape, 0.05), 0.0)
    a = verify.sample_barrier(lo, times, problem)
    b = verify.sample_barrier(hi, times, problem)
    # ordered pair: separation stays 0.1, gap is -0.1 after the positive
    # part of the initial separation (zero) is removed
    assert verify.comparison_gap(a, b) == pytest.approx(-0.1)
    # reversed pair: initial separation 0.1 is subtracted exactly
    assert verify.comparison_gap(b, a) == 0.0


def test_comparison_gap_requires_matching_times():
    grid, problem = _flat_problem(m=16)
    bar = verify.AffineBarrier(grid, np.zeros(grid.shape), 0.0)
    a = verify.sample_barrier(bar, [0.0, 0.5], problem)
    b = verify.sample_barrier(bar, [0.0, 0.75], problem)
    with pytest.raises(ValueError, match="times do not match"):
        verify.comparison_gap(a, b)


def test_sample_barrier_snapshots_bitwise():
    grid, problem = _flat_problem(m=16)
    bar = verify.AffineBarrier(grid, _cos_values(grid, 0.03), -0.7)
    times = [0.1, 0.4]
    traj = verify.sample_barrier(bar, times, problem)
    assert traj.times == times
    for t, snap in zip(times, traj.snapshots):
        assert np.array_equal(snap.values, bar.field_at(t).values)
