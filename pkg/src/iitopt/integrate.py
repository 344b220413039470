"""Fixed-step integration of both models under piecewise-constant controls.

The time grid is uniform; controls hold one value per interval and states
are reported at interval endpoints.  Forward trajectories use classical
RK4, optionally with several substeps per control interval (needed for
stability when birth rates are large, since the step must resolve the
fastest linearized rate).  Costate sweeps integrate the continuous adjoint
equation backward along a stored trajectory.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .dynamics import FullParams, ReducedParams
from .errors import GridMismatch, IntegrationUnstable, InvalidControl

__all__ = [
    "TimeGrid",
    "ControlProfile",
    "Trajectory",
    "stable_substeps",
    "integrate_reduced",
    "integrate_full",
    "integrate_adjoint_reduced",
    "integrate_adjoint_full",
    "write_trajectory_csv",
]


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid of n intervals on [t0, t1]."""

    t0: float
    t1: float
    n: int

    def __post_init__(self):
        if not self.t1 > self.t0:
            raise InvalidControl("need t1 > t0")
        if self.n < 1:
            raise InvalidControl("need at least one interval")

    @property
    def h(self) -> float:
        return (self.t1 - self.t0) / self.n

    def nodes(self) -> np.ndarray:
        return self.t0 + self.h * np.arange(self.n + 1)


@dataclass(frozen=True)
class ControlProfile:
    """Piecewise-constant release rate with box bound [0, M]."""

    grid: TimeGrid
    values: np.ndarray
    M: float

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.shape != (self.grid.n,):
            raise InvalidControl(
                f"control needs {self.grid.n} values, got shape {values.shape}"
            )
        if self.M <= 0.0:
            raise InvalidControl("bound M must be positive")
        if values.min() < -1e-12 or values.max() > self.M * (1.0 + 1e-12):
            raise InvalidControl("control values outside [0, M]")

    def release_cost(self) -> float:
        """Total released mass, the left-endpoint sum h * sum(u_i)."""
        return float(self.grid.h * self.values.sum())

    @staticmethod
    def constant(level: float, grid: TimeGrid, M: float) -> "ControlProfile":
        return ControlProfile(grid, np.full(grid.n, float(level)), M)


@dataclass(frozen=True)
class Trajectory:
    """States on the grid nodes, with optional costate / switching channels."""

    grid: TimeGrid
    states: np.ndarray
    adjoint: np.ndarray | None = None
    switching: np.ndarray | None = None
    substates: np.ndarray = field(default=None, repr=False)
    substeps: int = 1

    def __post_init__(self):
        if self.states.shape[0] != self.grid.n + 1:
            raise GridMismatch("state array does not match grid")

    @property
    def final_state(self):
        return self.states[-1]

    def with_channels(self, adjoint=None, switching=None) -> "Trajectory":
        return Trajectory(
            self.grid,
            self.states,
            adjoint if adjoint is not None else self.adjoint,
            switching if switching is not None else self.switching,
            self.substates,
            self.substeps,
        )


def stable_substeps(rate_bound: float, h: float, target: float = 0.8) -> int:
    """Substeps per interval so the substep stays inside RK4's stability region.

    ``rate_bound`` is an upper estimate of the largest linearized rate of
    the vector field; substeps keep |rate| * h_sub <= target (well below
    the RK4 real-axis limit of about 2.78).
    """
    if rate_bound <= 0.0:
        return 1
    return max(1, int(np.ceil(h * rate_bound / target)))


def full_rate_bound(params: FullParams) -> float:
    """Crude bound on the planar system's linearized rates over [0, K]^2."""
    return 2.0 * (params.b1 + params.b2) + params.d1 + params.d2


def reduced_rate_bound(params: ReducedParams, M: float) -> float:
    """Bound on |f' + u g'| over p in [0, 1], u in [0, M]."""
    from .dynamics import df_reduced, dg_reduced

    grid = np.linspace(0.0, 1.0, 65)
    worst = 0.0
    for p in grid:
        worst = max(worst, abs(df_reduced(p, params)) + M * abs(dg_reduced(p, params)))
    return worst


def _raise_status(status: int, context: str):
    if status == 1:
        raise IntegrationUnstable(
            f"{context}: non-physical state produced; use a finer grid or more substeps"
        )
    if status == 2:
        raise IntegrationUnstable(f"{context}: NaN encountered")


def integrate_reduced(
    u: ControlProfile, p0: float, params: ReducedParams, substeps: int = 1
) -> Trajectory:
    """Integrate p' = f(p) + u g(p) from p(t0) = p0 over the control's grid."""
    if not -1e-12 <= p0 <= 1.0 + 1e-12:
        raise InvalidControl(f"initial proportion {p0} outside [0, 1]")
    ps, status = _kernels.forward_reduced(
        min(max(p0, 0.0), 1.0), u.values, u.grid.h, substeps, *params.kernel_args()
    )
    _raise_status(status, "reduced model")
    return Trajectory(u.grid, ps[::substeps].copy(), substates=ps, substeps=substeps)


def integrate_full(
    u: ControlProfile, s0, params: FullParams, substeps: int | None = None
) -> Trajectory:
    """Integrate the planar system from state s0 = (n1, n2).

    When ``substeps`` is omitted it is chosen from a linearized rate bound
    so the substep length stays inside the RK4 stability region.
    """
    n1, n2 = float(s0[0]), float(s0[1])
    if n1 < 0.0 or n2 < 0.0:
        raise InvalidControl(f"negative initial populations ({n1}, {n2})")
    if substeps is None:
        substeps = stable_substeps(full_rate_bound(params), u.grid.h)
    xs, status = _kernels.forward_full(
        n1, n2, u.values, u.grid.h, substeps, *params.kernel_args()
    )
    _raise_status(status, "planar model")
    return Trajectory(u.grid, xs[::substeps].copy(), substates=xs, substeps=substeps)


def _require_substates(traj: Trajectory, u: ControlProfile):
    if traj.substates is None:
        raise GridMismatch("trajectory carries no stored states; integrate first")
    if traj.grid != u.grid:
        raise GridMismatch("control and trajectory grids differ")
    if traj.substates.shape[0] != u.grid.n * traj.substeps + 1:
        raise GridMismatch("stored states inconsistent with grid and substeps")


def integrate_adjoint_reduced(
    u: ControlProfile, traj: Trajectory, qT: float, params: ReducedParams
) -> np.ndarray:
    """Backward sweep of q' = -q (f'(p) + u g'(p)) from q(T) = qT.

    The equation is linear and homogeneous, so q keeps the sign of qT
    along the whole horizon.  Returns q at the grid nodes.
    """
    _require_substates(traj, u)
    return _kernels.adjoint_reduced(
        traj.substates, u.values, u.grid.h, traj.substeps, qT, *params.kernel_args()
    )


def integrate_adjoint_full(
    u: ControlProfile, traj: Trajectory, qT, params: FullParams
) -> np.ndarray:
    """Backward sweep of the planar costate q' = -J(x)^T q from q(T) = qT."""
    _require_substates(traj, u)
    return _kernels.adjoint_full(
        traj.substates,
        u.values,
        u.grid.h,
        traj.substeps,
        float(qT[0]),
        float(qT[1]),
        *params.kernel_args(),
    )


def write_trajectory_csv(path_or_file, traj: Trajectory, u: ControlProfile):
    """Write ``t,<state columns>,u[,q,w]`` rows, one per grid node.

    The control column repeats each interval's value at its left endpoint;
    the final node repeats the last interval's value.
    """
    if traj.grid != u.grid:
        raise GridMismatch("control and trajectory grids differ")
    t = traj.grid.nodes()
    states = traj.states
    if states.ndim == 1:
        cols = [("p", states)]
    else:
        cols = [(f"n{k + 1}", states[:, k]) for k in range(states.shape[1])]
    uu = np.concatenate([u.values, u.values[-1:]])
    header = ["t"] + [name for name, _ in cols] + ["u"]
    arrays = [t] + [c for _, c in cols] + [uu]
    if traj.adjoint is not None:
        adj = traj.adjoint
        if adj.ndim == 1:
            header.append("q")
            arrays.append(adj)
        else:
            for k in range(adj.shape[1]):
                header.append(f"q{k + 1}")
                arrays.append(adj[:, k])
    if traj.switching is not None:
        header.append("w")
        arrays.append(traj.switching)

    def _dump(fh):
        fh.write(",".join(header) + "\n")
        for row in zip(*arrays):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")

    if isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__"):
        with open(path_or_file, "w", encoding="utf-8", newline="\n") as fh:
            _dump(fh)
    else:
        _dump(path_or_file)


def read_trajectory_csv(path) -> dict:
    """Read a trajectory CSV back into named columns (numpy arrays)."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    lines = [ln for ln in text.strip().splitlines() if ln]
    names = lines[0].split(",")
    data = np.loadtxt(io.StringIO("\n".join(lines[1:])), delimiter=",", ndmin=2)
    return {name: data[:, k] for k, name in enumerate(names)}
