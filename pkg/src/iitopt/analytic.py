"""Closed-form optimal release policies for the scalar proportion model.

For a release rate bound M above the minimal sustaining rate m*, the
cheapest way to drive the proportion from 0 to the invasion threshold is
a single full-rate burst whose length is the threshold-crossing time

    t*(M) = integral over [0, theta] of dp / (f(p) + M g(p)),

and with a fixed horizon T >= t*(M) any placement of that burst inside
[0, T] is optimal, all with release cost M t*(M).  When the horizon is
free and weighted into the objective (weight alpha > 0 on time, 1-alpha
on released mass), the optimum is unique: burst immediately, stop at
t*(M), with value t*(M) ((1-alpha) M + alpha).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .dynamics import ReducedParams, f_reduced, g_reduced, p_star, theta
from .errors import InfeasibleHorizon, InfeasibleRate, InvalidControl, InvalidParameters
from .integrate import ControlProfile, TimeGrid

__all__ = [
    "BangBangPolicy",
    "OptimalValue",
    "m_star",
    "t_star",
    "feasibility_time",
    "min_cost_policy",
    "min_cost_time_policy",
]


@dataclass(frozen=True)
class BangBangPolicy:
    """Full-rate burst of given duration starting at offset xi inside [0, horizon]."""

    M: float
    xi: float
    duration: float
    horizon: float

    def __post_init__(self):
        if self.duration <= 0.0 or self.M <= 0.0:
            raise InvalidControl("need positive duration and rate")
        if self.xi < -1e-15 or self.xi > self.horizon - self.duration + 1e-12:
            raise InvalidControl("burst must fit inside the horizon")

    @property
    def release_cost(self) -> float:
        """Released mass M * duration, independent of the offset."""
        return self.M * self.duration

    def value_at(self, t: float) -> float:
        return self.M if self.xi <= t < self.xi + self.duration else 0.0

    def profile(self, n: int) -> ControlProfile:
        """Discretize on n uniform intervals, conserving the released mass.

        Intervals straddling a burst edge get the fractional level
        M * overlap / h, so the discrete release cost equals M * duration
        to roundoff for every offset.
        """
        grid = TimeGrid(0.0, self.horizon, n)
        h = grid.h
        lo, hi = self.xi, self.xi + self.duration
        values = np.empty(n)
        for i in range(n):
            a = i * h
            b = a + h
            overlap = min(b, hi) - max(a, lo)
            values[i] = self.M * max(overlap, 0.0) / h
        return ControlProfile(grid, values, self.M)


@dataclass(frozen=True)
class OptimalValue:
    """Cost breakdown (1-alpha) * released mass + alpha * horizon."""

    release_cost: float
    time_cost: float
    alpha: float
    combined: float

    @staticmethod
    def of(release_cost: float, time_cost: float, alpha: float) -> "OptimalValue":
        return OptimalValue(
            release_cost,
            time_cost,
            alpha,
            (1.0 - alpha) * release_cost + alpha * time_cost,
        )


def m_star(params: ReducedParams) -> float:
    """Maximum of -f/g over [0, theta]: the minimal sustaining release rate.

    Evaluated at the closed-form critical point of f/g, with a coarse grid
    search as a consistency guard.
    """
    ps = p_star(params)
    value = -f_reduced(ps, params) / g_reduced(ps, params)
    th = theta(params)
    grid = np.linspace(0.0, th, 2001)
    grid_max = max(-f_reduced(p, params) / g_reduced(p, params) for p in grid)
    if grid_max > value * (1.0 + 1e-9) + 1e-15:
        raise InvalidParameters(
            "interior critical point is not the maximizer of -f/g; "
            "parameters outside the supported regime"
        )
    return value


def _crossing_time(rate: float, params: ReducedParams) -> float:
    ms = m_star(params)
    if rate <= ms:
        raise InfeasibleRate(
            f"rate {rate} does not exceed the minimal sustaining rate {ms:.6g}; "
            "the threshold is never reached"
        )
    th = theta(params)
    ps = p_star(params)

    def integrand(p):
        return 1.0 / (f_reduced(p, params) + rate * g_reduced(p, params))

    value, _ = quad(
        integrand, 0.0, th, epsabs=1e-14, epsrel=1e-11, limit=200, points=[ps]
    )
    return value


def t_star(M: float, params: ReducedParams) -> float:
    """Threshold-crossing time under the full release rate M (requires M > m*)."""
    return _crossing_time(M, params)


def feasibility_time(u_bar: float, params: ReducedParams) -> float:
    """Threshold-crossing time under a constant rate u_bar (same quadrature as t_star).

    Strictly decreasing in the rate and divergent as the rate approaches
    the minimal sustaining rate from above.
    """
    return _crossing_time(u_bar, params)


def min_cost_policy(xi: float, T: float, M: float, params: ReducedParams) -> BangBangPolicy:
    """Minimal-cost policy for a fixed horizon: one full-rate burst on [xi, xi + t*].

    Any offset xi in [0, T - t*] gives the same release cost M t*; the
    horizon must satisfy T >= t*(M).
    """
    ts = t_star(M, params)
    if T < ts * (1.0 - 1e-12):
        raise InfeasibleHorizon(
            f"horizon {T} is shorter than the minimal replacement time {ts:.6g}"
        )
    T_eff = max(T, ts)
    if xi < -1e-15 or xi > T_eff - ts + 1e-12:
        raise InvalidControl(f"offset {xi} outside [0, {T_eff - ts:.6g}]")
    return BangBangPolicy(M=M, xi=min(max(xi, 0.0), T_eff - ts), duration=ts, horizon=T_eff)


def min_cost_time_policy(alpha: float, M: float, params: ReducedParams):
    """Unique optimum of the combined mass/time objective with a free horizon.

    Returns the immediate burst of length t*(M) together with its value
    t*(M) ((1-alpha) M + alpha).  The weight must be positive: at alpha = 0
    the horizon is unpenalized and every shifted burst on every horizon
    T > t* is optimal, a noncompact family with no distinguished member.
    """
    if alpha == 0.0:
        raise InvalidControl(
            "alpha = 0 leaves the horizon unpenalized; the optimal set becomes the "
            "noncompact family of shifted bursts over arbitrary horizons"
        )
    if not 0.0 < alpha <= 1.0:
        raise InvalidControl("alpha must lie in (0, 1]")
    ts = t_star(M, params)
    policy = BangBangPolicy(M=M, xi=0.0, duration=ts, horizon=ts)
    value = OptimalValue.of(M * ts, ts, alpha)
    return policy, value
