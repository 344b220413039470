import math

import numpy as np
import pytest

import iitopt as it

from conftest import random_reduced_params


def test_m_star_benchmark_value(table1):
    # closed form at the critical proportion: K p* (d2 b1 (1-s_h p*) - d1 b2) / (b1 (1-s_h p*))
    assert math.isclose(it.m_star(table1), 1.0 / 300.0, rel_tol=1e-12)
    # the rate bound used in the benchmark dwarfs it
    assert it.m_star(table1) < 10.0


def test_m_star_matches_grid_search(table1, rng):
    for params in [table1] + [random_reduced_params(rng) for _ in range(5)]:
        th = it.theta(params)
        grid = np.linspace(0.0, th, 100_000)
        best = max(-it.f_reduced(p, params) / it.g_reduced(p, params) for p in grid)
        assert math.isclose(it.m_star(params), best, rel_tol=1e-6)


def test_ratio_vanishes_at_interval_ends(table1):
    th = it.theta(table1)
    assert it.f_reduced(0.0, table1) == 0.0
    assert abs(-it.f_reduced(th, table1) / it.g_reduced(th, table1)) < 1e-12


def test_t_star_benchmark_value(table1):
    assert abs(it.t_star(10.0, table1) - 0.0238122) < 1e-5


def test_t_star_monotone_in_rate(table1):
    rates = np.linspace(0.5, 12.0, 10)
    times = [it.t_star(r, table1) for r in rates]
    assert all(b < a for a, b in zip(times, times[1:]))
    assert it.t_star(20.0, table1) < it.t_star(10.0, table1)


def test_t_star_consistent_with_integration(table1):
    ts = it.t_star(10.0, table1)
    u = it.ControlProfile.constant(10.0, it.TimeGrid(0.0, ts, 400), 10.0)
    traj = it.integrate_reduced(u, 0.0, table1)
    assert abs(traj.final_state - it.theta(table1)) < 1e-4


def test_infeasible_rate_rejected(table1):
    with pytest.raises(it.InfeasibleRate):
        it.t_star(it.m_star(table1), table1)
    with pytest.raises(it.InfeasibleRate):
        it.feasibility_time(0.5 * it.m_star(table1), table1)


def test_feasibility_time_equals_t_star_at_bound(table1):
    # same quadrature, same code path
    assert it.feasibility_time(10.0, table1) == it.t_star(10.0, table1)


def test_feasibility_time_decreasing_and_divergent(table1):
    ms = it.m_star(table1)
    assert it.feasibility_time(5.0, table1) > it.t_star(10.0, table1)
    near = it.feasibility_time(ms * 1.001, table1)
    assert near > 10.0 * it.t_star(10.0, table1)


def test_policy_requires_feasible_horizon(table1):
    ts = it.t_star(10.0, table1)
    with pytest.raises(it.InfeasibleHorizon):
        it.min_cost_policy(0.0, 0.5 * ts, 10.0, table1)
    with pytest.raises(it.InvalidControl):
        it.min_cost_policy(0.49, 0.5, 10.0, table1)  # offset beyond T - t*


def test_policy_cost_invariant_under_shift(table1):
    ts = it.t_star(10.0, table1)
    T = 0.5
    costs = []
    for xi in (0.0, (T - ts) / 2.0, T - ts):
        pol = it.min_cost_policy(xi, T, 10.0, table1)
        assert pol.release_cost == 10.0 * ts
        costs.append(pol.profile(300).release_cost())
    assert max(costs) - min(costs) < 1e-10
    assert abs(costs[0] - 10.0 * ts) < 1e-10


def test_policy_reaches_threshold_for_every_shift(table1):
    T = 0.5
    ts = it.t_star(10.0, table1)
    th = it.theta(table1)
    for xi in (0.0, 0.21):
        pol = it.min_cost_policy(xi, T, 10.0, table1)
        traj = it.integrate_reduced(pol.profile(600), 0.0, table1)
        assert abs(traj.final_state - th) < 1e-3
    # minimal horizon: the burst fills the whole window
    pol = it.min_cost_policy(0.0, ts, 10.0, table1)
    assert pol.xi == 0.0 and math.isclose(pol.duration, ts, rel_tol=1e-12)


def test_threshold_attained_for_random_parameter_sets(rng):
    for _ in range(20):
        params = random_reduced_params(rng, min_m_star=0.05)
        M = 2.0 * it.m_star(params) + 1.0
        ts = it.t_star(M, params)
        pol = it.min_cost_policy(0.0, ts, M, params)
        traj = it.integrate_reduced(pol.profile(600), 0.0, params)
        assert abs(traj.final_state - it.theta(params)) < 1e-3


def test_free_horizon_value_formula(table1):
    ts = it.t_star(10.0, table1)
    pol, value = it.min_cost_time_policy(0.01, 10.0, table1)
    assert pol.xi == 0.0
    assert math.isclose(pol.duration, ts, rel_tol=1e-12)
    assert math.isclose(value.combined, ts * (0.99 * 10.0 + 0.01), rel_tol=1e-12)
    assert abs(value.combined - 0.23598) < 1e-4
    _, v1 = it.min_cost_time_policy(1.0, 10.0, table1)
    assert math.isclose(v1.combined, ts, rel_tol=1e-12)
    _, vsmall = it.min_cost_time_policy(1e-9, 10.0, table1)
    assert math.isclose(vsmall.combined, 10.0 * ts, rel_tol=1e-6)


def test_free_horizon_rejects_zero_weight(table1):
    with pytest.raises(it.InvalidControl):
        it.min_cost_time_policy(0.0, 10.0, table1)


def test_padding_never_beats_the_free_optimum(table1):
    # burst of the same mass on a longer horizon pays extra time cost
    ts = it.t_star(10.0, table1)
    for alpha in (0.01, 0.3, 1.0):
        _, best = it.min_cost_time_policy(alpha, 10.0, table1)
        for T in (1.5 * ts, 3.0 * ts, 10.0 * ts):
            padded = (1.0 - alpha) * 10.0 * ts + alpha * T
            assert padded > best.combined
