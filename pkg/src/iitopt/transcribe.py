"""Direct transcription of the penalized release-planning problems.

Controls are piecewise constant on n intervals; the released mass is the
left-endpoint sum h * sum(u_i).  Terminal constraints enter through
penalties: a one-sided quadratic hinge (theta - p(T))_+^2 / eps for the
scalar model, and the scaled worst margin

    max{n1(T) - margin, n2* - margin - n2(T), 0} / eps

of the target box [0, margin] x [n2* - margin, n2*] for the planar model.
With a free horizon the problem is posed on the unit interval via
s = t / T (the vector field picks up a factor T and T becomes a bounded
decision scalar); since the rescaled RK4 recursion coincides step for
step with integrating the physical system on [0, T], both views share one
code path.

Gradients with respect to the controls differentiate the discrete RK4
trajectory exactly (transposed tangent recursion, see _kernels); the
horizon derivative uses a central difference of the discrete objective.
The solver is projected descent with Barzilai-Borwein steps safeguarded
by monotone Armijo backtracking, plus a tangential "slide" fallback along
the active margin for the nonsmooth planar penalty.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .dynamics import ReducedParams, theta
from .errors import GridMismatch, IntegrationUnstable, InvalidControl
from .integrate import (
    ControlProfile,
    TimeGrid,
    Trajectory,
    full_rate_bound,
    reduced_rate_bound,
    stable_substeps,
)

__all__ = [
    "ProblemSpec",
    "PenaltyTerm",
    "SolveReport",
    "objective",
    "gradient",
    "solve",
    "rescale_free_time",
    "RescaledFreeTimeProblem",
]


@dataclass(frozen=True)
class ProblemSpec:
    """Everything that defines one penalized release-planning problem.

    ``mode`` is "fixed" (horizon T, pure released-mass objective) or
    "free" (horizon optimized, objective (1-alpha) * mass + alpha * T).
    ``margin`` sizes the planar target box; ``substeps`` overrides the
    automatic stability-based RK4 substepping.
    """

    system: str  # "reduced" | "full"
    params: object
    mode: str  # "fixed" | "free"
    M: float
    n: int
    penalty_eps: float
    T: float | None = None
    T0: float | None = None
    alpha: float = 0.0
    initial_state: object = None
    margin: float = 10.0
    substeps: int | None = None
    t_bounds: tuple | None = None

    def __post_init__(self):
        if self.system not in ("reduced", "full"):
            raise InvalidControl(f"unknown system {self.system!r}")
        if self.mode not in ("fixed", "free"):
            raise InvalidControl(f"unknown mode {self.mode!r}")
        if isinstance(self.params, ReducedParams) != (self.system == "reduced"):
            raise InvalidControl("params object does not match the system kind")
        if self.n < 1 or self.M <= 0.0 or self.penalty_eps <= 0.0:
            raise InvalidControl("need n >= 1, M > 0, penalty_eps > 0")
        if self.mode == "fixed":
            if self.T is None or self.T <= 0.0:
                raise InvalidControl("fixed mode needs a positive horizon T")
        else:
            if self.T0 is None or self.T0 <= 0.0:
                raise InvalidControl("free mode needs a positive initial horizon T0")
            if not 0.0 < self.alpha <= 1.0:
                raise InvalidControl("free mode needs alpha in (0, 1]")
            if self.t_bounds is not None:
                lo, hi = self.t_bounds
                if not 0.0 < lo <= self.T0 <= hi:
                    raise InvalidControl("t_bounds must bracket T0 with 0 < lo")
        if self.initial_state is None:
            default = 0.0 if self.system == "reduced" else (self.params.n1_star, 0.0)
            object.__setattr__(self, "initial_state", default)

    @property
    def horizon_bounds(self) -> tuple:
        if self.mode == "fixed":
            return (self.T, self.T)
        if self.t_bounds is not None:
            return tuple(self.t_bounds)
        return (0.1 * self.T0, 10.0 * self.T0)

    def resolved_substeps(self) -> int:
        if self.substeps is not None:
            return self.substeps
        h_max = self.horizon_bounds[1] / self.n
        if self.system == "reduced":
            return stable_substeps(reduced_rate_bound(self.params, self.M), h_max)
        return stable_substeps(full_rate_bound(self.params), h_max)

    def initial_horizon(self) -> float:
        return self.T if self.mode == "fixed" else self.T0

    def penalty_term(self) -> "PenaltyTerm":
        if self.system == "reduced":
            return PenaltyTerm("quadratic_hinge", self.penalty_eps, theta(self.params))
        return PenaltyTerm(
            "max_of_margins", self.penalty_eps, (self.margin, self.params.n2_star)
        )


@dataclass(frozen=True)
class PenaltyTerm:
    """Terminal penalty attached to a problem: nonnegative, zero on target.

    ``kind`` is "quadratic_hinge" (scalar model, ((theta - p)_+)^2 / eps)
    or "max_of_margins" (planar model, worst box margin / eps).  The
    gradient returns the subgradient selection used by the solver; for
    the margin penalty ties go to the wild-population margin.
    """

    kind: str
    eps: float
    target: object  # threshold (scalar) or (margin, n2_star) (planar)

    def value(self, final_state) -> float:
        if self.kind == "quadratic_hinge":
            short = self.target - float(final_state)
            return short * short / self.eps if short > 0.0 else 0.0
        margin, n2s = self.target
        m1 = float(final_state[0]) - margin
        m2 = n2s - margin - float(final_state[1])
        return max(m1, m2, 0.0) / self.eps

    def gradient(self, final_state):
        if self.kind == "quadratic_hinge":
            short = self.target - float(final_state)
            return -2.0 * short / self.eps if short > 0.0 else 0.0
        margin, n2s = self.target
        m1 = float(final_state[0]) - margin
        m2 = n2s - margin - float(final_state[1])
        if max(m1, m2) <= 0.0:
            return (0.0, 0.0)
        if m1 >= m2:
            return (1.0 / self.eps, 0.0)
        return (0.0, -1.0 / self.eps)


# ---------------------------------------------------------------------------
# objective / penalty / gradients on raw arrays
# ---------------------------------------------------------------------------


def _forward(spec: ProblemSpec, uvals: np.ndarray, T: float, m: int):
    h = T / spec.n
    if spec.system == "reduced":
        return _kernels.forward_reduced(
            float(spec.initial_state), uvals, h, m, *spec.params.kernel_args()
        )
    s0 = spec.initial_state
    return _kernels.forward_full(
        float(s0[0]), float(s0[1]), uvals, h, m, *spec.params.kernel_args()
    )


def _penalty_value(spec: ProblemSpec, final_state) -> tuple:
    """Penalty value and its gradient w.r.t. the final state."""
    term = spec.penalty_term()
    return term.value(final_state), term.gradient(final_state)


def _margins(spec: ProblemSpec, final_state):
    """Signed infeasibility (positive = constraint violated) and active index."""
    if spec.system == "reduced":
        return theta(spec.params) - float(final_state), 0
    n2s = spec.params.n2_star
    m1 = float(final_state[0]) - spec.margin
    m2 = n2s - spec.margin - float(final_state[1])
    return (m1, 0) if m1 >= m2 else (m2, 1)


def _eval(spec: ProblemSpec, uvals: np.ndarray, T: float, m: int):
    """Objective with rejection-friendly handling of unstable trajectories."""
    xs, status = _forward(spec, uvals, T, m)
    if status != 0:
        return np.inf, None, None
    final = xs[-1] if spec.system == "reduced" else xs[-1, :]
    pen, _ = _penalty_value(spec, final)
    h = T / spec.n
    release = h * float(uvals.sum())
    alpha = spec.alpha if spec.mode == "free" else 0.0
    value = (1.0 - alpha) * release + alpha * T + pen
    parts = {
        "release_cost": release,
        "time_cost": alpha * T,
        "penalty": pen,
        "combined": value,
        "final_state": final if spec.system == "reduced" else (final[0], final[1]),
    }
    return value, parts, xs


def _grad_terminal(spec: ProblemSpec, uvals, T, m, xs, lamT):
    """Gradient of a terminal functional with given final-state gradient."""
    h = T / spec.n
    if spec.system == "reduced":
        gu, lam0 = _kernels.grad_reduced(
            xs, uvals, h, m, float(lamT), *spec.params.kernel_args()
        )
        return gu
    gu, _, _ = _kernels.grad_full(
        xs, uvals, h, m, float(lamT[0]), float(lamT[1]), *spec.params.kernel_args()
    )
    return gu


def _grad_arrays(spec: ProblemSpec, uvals, T, m, xs):
    """(du, dT or None) for the penalized objective at (uvals, T)."""
    final = xs[-1] if spec.system == "reduced" else xs[-1, :]
    _, lamT = _penalty_value(spec, final)
    h = T / spec.n
    alpha = spec.alpha if spec.mode == "free" else 0.0
    du = _grad_terminal(spec, uvals, T, m, xs, lamT) + (1.0 - alpha) * h
    if spec.mode == "fixed":
        return du, None
    dTe = 1e-6 * (1.0 + T)
    Jp, _, _ = _eval(spec, uvals, T + dTe, m)
    Jm, _, _ = _eval(spec, uvals, T - dTe, m)
    if not np.isfinite(Jp) or not np.isfinite(Jm):
        dT = 0.0
    else:
        dT = (Jp - Jm) / (2.0 * dTe)
    return du, dT


def _coerce_control(spec: ProblemSpec, u, T: float) -> np.ndarray:
    if isinstance(u, ControlProfile):
        if u.grid.n != spec.n:
            raise GridMismatch(f"control has {u.grid.n} intervals, problem has {spec.n}")
        if abs((u.grid.t1 - u.grid.t0) - T) > 1e-9 * max(1.0, T):
            raise GridMismatch("control grid horizon differs from the problem horizon")
        values = u.values
    else:
        values = np.asarray(u, dtype=float)
        if values.shape != (spec.n,):
            raise InvalidControl(f"need {spec.n} control values, got {values.shape}")
    if values.min() < -1e-12 or values.max() > spec.M * (1.0 + 1e-12):
        raise InvalidControl("control values outside [0, M]")
    return np.clip(values, 0.0, spec.M)


def objective(spec: ProblemSpec, u, T: float | None = None):
    """Objective value and its parts for a control (profile or raw values).

    Fixed mode: released mass plus penalty.  Free mode: the convex
    combination (1-alpha) * mass + alpha * T plus penalty; T must be given
    unless the spec's initial horizon is intended.
    """
    T = spec.initial_horizon() if T is None else float(T)
    uvals = _coerce_control(spec, u, T)
    m = spec.resolved_substeps()
    value, parts, xs = _eval(spec, uvals, T, m)
    if not np.isfinite(value):
        raise IntegrationUnstable("trajectory unstable for this control; refine the grid")
    return value, parts


def gradient(spec: ProblemSpec, u, T: float | None = None):
    """(du, dT) of the penalized objective; dT is None in fixed mode."""
    T = spec.initial_horizon() if T is None else float(T)
    uvals = _coerce_control(spec, u, T)
    m = spec.resolved_substeps()
    value, parts, xs = _eval(spec, uvals, T, m)
    if not np.isfinite(value):
        raise IntegrationUnstable("trajectory unstable for this control; refine the grid")
    return _grad_arrays(spec, uvals, T, m, xs)


# ---------------------------------------------------------------------------
# free-horizon view on the unit interval
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RescaledFreeTimeProblem:
    """Free-horizon problem mapped to s = t/T on [0, 1].

    The state satisfies x'(s) = T * F(x, u) and the objective becomes
    (1-alpha) * T * mean(u) + alpha * T + penalty, with T a bounded scalar
    decision variable.  Discretely, n RK4 steps of the scaled field on
    [0, 1] reproduce n steps of the physical field on [0, T] exactly, so
    evaluation delegates to the physical-domain code.
    """

    spec: ProblemSpec

    def __post_init__(self):
        if self.spec.mode != "free":
            raise InvalidControl("rescaling applies to free-horizon problems only")

    @property
    def t_bounds(self) -> tuple:
        return self.spec.horizon_bounds

    def dynamics_scale(self, T: float) -> float:
        """Factor multiplying the vector field on the unit interval."""
        return float(T)

    def objective(self, u, T: float):
        return objective(self.spec, u, T)

    def gradient(self, u, T: float):
        return gradient(self.spec, u, T)


def rescale_free_time(spec: ProblemSpec) -> RescaledFreeTimeProblem:
    """Fixed-domain view of a free-horizon spec (contract error otherwise)."""
    return RescaledFreeTimeProblem(spec)


# ---------------------------------------------------------------------------
# solver
# ---------------------------------------------------------------------------


@dataclass
class SolveReport:
    """Converged control, trajectory and diagnostics of one solve."""

    control: ControlProfile
    trajectory: Trajectory
    final_time: float
    release_cost: float
    time_cost: float
    penalty_value: float
    combined_objective: float
    iterations: int
    converged: bool
    first_order_residual: float
    termination: str
    alpha: float
    n_objective_evals: int = 0
    start_summaries: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    objective_curve: list = field(default_factory=list)
    problem_echo: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "final_time": self.final_time,
            "release_cost": self.release_cost,
            "time_cost": self.time_cost,
            "penalty_value": self.penalty_value,
            "combined_objective": self.combined_objective,
            "iterations": self.iterations,
            "converged": self.converged,
            "first_order_residual": self.first_order_residual,
            "termination": self.termination,
            "alpha": self.alpha,
            "n_objective_evals": self.n_objective_evals,
            "control": {
                "M": self.control.M,
                "n": self.control.grid.n,
                "t0": self.control.grid.t0,
                "t1": self.control.grid.t1,
                "values": [float(v) for v in self.control.values],
            },
            "final_state": (
                float(self.trajectory.states[-1])
                if self.trajectory.states.ndim == 1
                else [float(v) for v in self.trajectory.states[-1]]
            ),
            "start_summaries": self.start_summaries,
            "notes": self.notes,
            "problem": self.problem_echo,
            "objective_curve": [float(v) for v in self.objective_curve[:: max(1, len(self.objective_curve) // 200)]],
        }

    def write_json(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


_ARMIJO_C = 1e-4
_BACKTRACK = 0.5
_MAX_BACKTRACKS = 50


class _SlideState:
    """Step memory for the margin-manifold slide phase."""

    def __init__(self):
        self.st = 1.0


def _both_margins(spec, final_state):
    n2s = spec.params.n2_star
    return (
        float(final_state[0]) - spec.margin,
        n2s - spec.margin - float(final_state[1]),
    )


def _slide_step(spec, u, T, m, xs, J, free, project_T, state, counter):
    """One gradient-projection step along the active terminal margin(s).

    At a kink minimum of the max-margin penalty the subgradient method
    stalls: any step off the margin manifold is either penalized at scale
    1/eps or pays running cost with no first-order gain.  Descend instead
    inside the manifold: project the running-cost gradient onto the
    tangent space of the near-active margins (dropping margins whose
    least-squares multiplier has the sign that permits moving into the
    feasible interior, and excluding box-pinned components whose clipping
    would leak first-order violation), take a trial step, and pull the
    trial back onto the feasible side with Newton corrections before
    judging descent.
    """
    K = spec.params.K
    kappa = 1e-6 * max(1.0, K)
    m1, m2 = _both_margins(spec, xs[-1, :])
    active = []
    if m1 >= -kappa:
        active.append((1.0, 0.0))
    if m2 >= -kappa:
        active.append((0.0, -1.0))
    if not active:
        return None

    rows = []
    for lamT in active:
        gm_u = _grad_terminal(spec, u, T, m, xs, lamT)
        if free:
            dTe = 1e-6 * (1.0 + T)

            def marg(Tq, lamT=lamT):
                xs2, status = _forward(spec, u, Tq, m)
                counter[0] += 1
                if status != 0:
                    return np.nan
                mm1, mm2 = _both_margins(spec, xs2[-1, :])
                return mm1 if lamT[0] else mm2

            mp, mmi = marg(T + dTe), marg(T - dTe)
            gm_T = 0.0 if (np.isnan(mp) or np.isnan(mmi)) else (mp - mmi) / (2.0 * dTe)
        else:
            gm_T = 0.0
        rows.append((gm_u, gm_T))

    h = T / spec.n
    alpha = spec.alpha if free else 0.0
    gc_u = np.full(spec.n, (1.0 - alpha) * h)
    gc_T = (1.0 - alpha) * float(u.sum()) / spec.n + alpha if free else 0.0

    near = 1e-7 * spec.M
    fmask = np.ones(spec.n, dtype=np.bool_)
    d_u = np.zeros(spec.n)
    d_T = 0.0
    keep = list(range(len(rows)))
    for _ in range(8):
        # least-squares multipliers of the kept margins on the free set;
        # a positive multiplier says the cost gradient points off that
        # margin into the feasible interior, so it should not constrain d
        while keep:
            k = len(keep)
            G = np.zeros((k, int(fmask.sum()) + (1 if free else 0)))
            for row_i, ci in enumerate(keep):
                gm_u_i, gm_T_i = rows[ci]
                G[row_i, : int(fmask.sum())] = gm_u_i[fmask]
                if free:
                    G[row_i, -1] = gm_T_i
            gc_vec = np.concatenate([gc_u[fmask], [gc_T]]) if free else gc_u[fmask]
            S = G @ G.T
            if k > 1 and np.linalg.cond(S) > 1e12:
                keep = keep[:1]
                continue
            if k == 1 and S[0, 0] <= 0.0:
                keep = []
                break
            mu = np.linalg.solve(S, G @ gc_vec)
            worst = int(np.argmax(mu))
            if mu[worst] > 1e-12 * (1.0 + float(np.abs(mu).max())):
                keep.pop(worst)
                continue
            break
        if keep:
            k = len(keep)
            corr_u = np.zeros(spec.n)
            corr_T = 0.0
            for row_i, ci in enumerate(keep):
                gm_u_i, gm_T_i = rows[ci]
                corr_u += mu[row_i] * gm_u_i
                corr_T += mu[row_i] * gm_T_i
            d_u = np.where(fmask, -(gc_u - corr_u), 0.0)
            d_T = -(gc_T - corr_T) if free else 0.0
        else:
            d_u = np.where(fmask, -gc_u, 0.0)
            d_T = -gc_T if free else 0.0
        blocked = ((u >= spec.M - near) & (d_u > 0.0)) | ((u <= near) & (d_u < 0.0))
        if not (blocked & fmask).any():
            break
        fmask &= ~blocked
        keep = list(range(len(rows)))

    dmax = float(np.max(np.abs(d_u)))
    if dmax <= 1e-300 and abs(d_T) <= 1e-300:
        return None
    # normalize so a unit step moves the largest component by M/8
    scale = (spec.M / 8.0) / max(dmax, abs(d_T) * 8.0 / max(T, 1.0), 1e-300)
    d_u = d_u * scale
    d_T = d_T * scale

    def restore(un, Tn):
        # Newton pulls of the violated margins using base-point gradients
        for _ in range(3):
            xs_n, status = _forward(spec, un, Tn, m)
            counter[0] += 1
            if status != 0:
                return un, Tn
            mm = _both_margins(spec, xs_n[-1, :])
            violated = [i for i in range(len(rows)) if (mm[0], mm[1])[_margin_index(active[i])] > 0.0]
            if not violated:
                return un, Tn
            k = len(violated)
            G = np.zeros((k, spec.n + (1 if free else 0)))
            mvec = np.zeros(k)
            for row_i, ci in enumerate(violated):
                gm_u_i, gm_T_i = rows[ci]
                G[row_i, : spec.n] = gm_u_i
                if free:
                    G[row_i, -1] = gm_T_i
                mvec[row_i] = (mm[0], mm[1])[_margin_index(active[ci])]
            S = G @ G.T
            try:
                pull = G.T @ np.linalg.solve(S, mvec)
            except np.linalg.LinAlgError:
                return un, Tn
            un = np.clip(un - pull[: spec.n], 0.0, spec.M)
            if free:
                Tn = project_T(Tn - pull[-1])
        return un, Tn

    st = state.st
    for _ in range(_MAX_BACKTRACKS):
        un = np.clip(u + st * d_u, 0.0, spec.M)
        Tn = project_T(T + st * d_T) if free else T
        un, Tn = restore(un, Tn)
        Jn, parts_n, xs_n = _eval(spec, un, Tn, m)
        counter[0] += 1
        if np.isfinite(Jn) and Jn < J - 1e-14 * (1.0 + abs(J)):
            state.st = min(st * 2.0, 16.0)
            return un, Tn, Jn, parts_n, xs_n
        st *= _BACKTRACK
    state.st = max(state.st * _BACKTRACK, 1e-10)
    return None


def _margin_index(lamT):
    return 0 if lamT[0] else 1


def _solve_single(spec, uvals0, T0, max_iters, tol, slide=True):
    m = spec.resolved_substeps()
    lo, hi = spec.horizon_bounds
    free = spec.mode == "free"
    u = np.clip(np.asarray(uvals0, dtype=float), 0.0, spec.M)
    T = float(T0)
    J, parts, xs = _eval(spec, u, T, m)
    n_evals = [1]
    if not np.isfinite(J):
        raise IntegrationUnstable("initial control yields an unstable trajectory")

    slide = slide and spec.system == "full"
    history = [J]
    prev = None
    step = 1.0
    it = 0
    pg_norm = np.inf
    termination = "max_iters"
    converged = False
    slide_state = _SlideState()
    prefer_slide = False

    def project_T(val):
        return min(max(val, lo), hi) if free else T

    for it in range(1, max_iters + 1):
        du, dT = _grad_arrays(spec, u, T, m, xs)
        n_evals[0] += 2 if free else 0
        pg_u = u - np.clip(u - du, 0.0, spec.M)
        pg_T = (T - project_T(T - dT)) if free else 0.0
        pg_norm = float(np.sqrt(pg_u @ pg_u + pg_T * pg_T))
        if pg_norm < tol * (1.0 + abs(J)):
            converged = True
            termination = "stationary"
            break

        if prefer_slide and slide:
            moved = _slide_step(spec, u, T, m, xs, J, free, project_T, slide_state, n_evals)
            if moved is not None:
                u, T, J, parts, xs = moved
                history.append(J)
                prev = None
                continue
            prefer_slide = False

        if prev is not None:
            s = u - prev[0]
            y = du - prev[1]
            sy = float(s @ y)
            ss = float(s @ s)
            if free:
                sy += (T - prev[2]) * (dT - prev[3])
                ss += (T - prev[2]) ** 2
            step = ss / sy if sy > 1e-300 else step * 2.0
            step = float(min(max(step, 1e-14), 1e14))
        prev = (u.copy(), du.copy(), T, dT)

        accepted = False
        st = step
        for _ in range(_MAX_BACKTRACKS):
            un = np.clip(u - st * du, 0.0, spec.M)
            Tn = project_T(T - st * dT) if free else T
            Jn, parts_n, xs_n = _eval(spec, un, Tn, m)
            n_evals[0] += 1
            if np.isfinite(Jn):
                gd = float(du @ (un - u)) + (dT * (Tn - T) if free else 0.0)
                bound = J + _ARMIJO_C * gd if gd < 0.0 else J - 1e-16 * (1.0 + abs(J))
                if Jn <= bound:
                    accepted = True
                    break
            st *= _BACKTRACK
        if accepted:
            u, T, J, parts, xs = un, Tn, Jn, parts_n, xs_n
            history.append(J)
            continue

        if slide:
            moved = _slide_step(spec, u, T, m, xs, J, free, project_T, slide_state, n_evals)
            if moved is not None:
                u, T, J, parts, xs = moved
                history.append(J)
                prev = None
                prefer_slide = True
                continue
        termination = "no_descent"
        break

    return {
        "u": u,
        "T": T,
        "J": J,
        "parts": parts,
        "xs": xs,
        "m": m,
        "iterations": it,
        "converged": converged,
        "pg_norm": pg_norm,
        "termination": termination,
        "n_evals": n_evals[0],
        "history": history,
    }


def solve(
    spec: ProblemSpec,
    u0=None,
    max_iters: int = 5000,
    tol: float = 1e-6,
    starts=None,
    seed: int = 0,
    slide: bool = True,
) -> SolveReport:
    """Solve the penalized problem by projected descent.

    ``u0`` is a constant level, an array of n values, or None (defaults to
    M/2).  ``starts`` optionally lists extra constant starting levels for a
    multistart sweep (small seeded jitter is added to each extra leg); the
    leg with the best objective wins.  Non-convergence is reported, not
    raised: the report's ``converged``/``termination`` fields say whether
    the projected-gradient criterion was met, the iteration cap was hit, or
    no descent step existed (the usual outcome at the nonsmooth planar
    penalty's kink minima).  ``slide=False`` disables the margin-manifold
    polish phase, leaving the plain projected-subgradient method; kink
    minima then stall where the subgradient step first fails.
    """
    T0 = spec.initial_horizon()
    if u0 is None:
        base = np.full(spec.n, 0.5 * spec.M)
    elif np.isscalar(u0):
        base = np.full(spec.n, float(u0))
    else:
        base = np.asarray(u0, dtype=float)
        if base.shape != (spec.n,):
            raise InvalidControl(f"u0 needs {spec.n} values")
    rng = np.random.default_rng(seed)

    legs = [base]
    if starts:
        for level in starts:
            jitter = rng.uniform(-0.005, 0.005, spec.n) * spec.M
            legs.append(np.clip(float(level) + jitter, 0.0, spec.M))

    results = []
    for leg in legs:
        results.append(_solve_single(spec, leg, T0, max_iters, tol, slide=slide))
    best = min(results, key=lambda r: r["J"])

    grid = TimeGrid(0.0, best["T"], spec.n)
    control = ControlProfile(grid, best["u"], spec.M)
    mm = best["m"]
    traj = Trajectory(
        grid, best["xs"][::mm].copy(), substates=best["xs"], substeps=mm
    )
    parts = best["parts"]
    summaries = [
        {
            "objective": float(r["J"]),
            "final_time": float(r["T"]),
            "iterations": int(r["iterations"]),
            "termination": r["termination"],
        }
        for r in results
    ]
    return SolveReport(
        control=control,
        trajectory=traj,
        final_time=best["T"],
        release_cost=parts["release_cost"],
        time_cost=parts["time_cost"],
        penalty_value=parts["penalty"],
        combined_objective=parts["combined"],
        iterations=best["iterations"],
        converged=best["converged"],
        first_order_residual=best["pg_norm"],
        termination=best["termination"],
        alpha=spec.alpha if spec.mode == "free" else 0.0,
        n_objective_evals=best["n_evals"],
        start_summaries=summaries,
        objective_curve=best["history"],
        problem_echo={
            "system": spec.system,
            "mode": spec.mode,
            "M": spec.M,
            "n": spec.n,
            "penalty_eps": spec.penalty_eps,
            "alpha": spec.alpha if spec.mode == "free" else 0.0,
            "margin": spec.margin if spec.system == "full" else None,
            "substeps": spec.resolved_substeps(),
            "horizon_bounds": list(spec.horizon_bounds),
        },
    )
