"""Release planning for mosquito population replacement.

Library layout:

- ``dynamics``: the planar wild/infected model, its scalar reduction and
  derived quantities (invasion threshold, critical proportion).
- ``integrate``: fixed-step RK4 trajectories and costate sweeps on
  uniform grids with piecewise-constant controls.
- ``analytic``: closed-form optimal burst policies and the
  threshold-crossing quadratures.
- ``transcribe``: penalized direct transcription with exact discrete
  adjoints and a projected-descent solver (fixed or free horizon,
  scalar or planar system).
- ``verify``: switching-function optimality certificates, bang-bang
  structure reports and the high-fecundity reduction experiment.
- ``cli``: config-driven command line producing CSV/JSON artifacts.
"""

from .analytic import (
    BangBangPolicy,
    OptimalValue,
    feasibility_time,
    m_star,
    min_cost_policy,
    min_cost_time_policy,
    t_star,
)
from .dynamics import (
    FullParams,
    ReducedParams,
    carrying_capacity_from_density,
    f_reduced,
    full_rhs,
    g_reduced,
    p_star,
    theta,
)
from .errors import (
    GridMismatch,
    InfeasibleHorizon,
    InfeasibleRate,
    IntegrationUnstable,
    InvalidControl,
    InvalidParameters,
    ModelError,
)
from .integrate import (
    ControlProfile,
    TimeGrid,
    Trajectory,
    integrate_adjoint_full,
    integrate_adjoint_reduced,
    integrate_full,
    integrate_reduced,
    write_trajectory_csv,
)
from .transcribe import (
    PenaltyTerm,
    ProblemSpec,
    SolveReport,
    gradient,
    objective,
    rescale_free_time,
    solve,
)
from .verify import (
    BangBangReport,
    PmpCertificate,
    ReductionReport,
    check_bang_bang,
    gamma_convergence_experiment,
    reference_terminal_adjoint,
    switching_function,
)

__version__ = "0.1.0"
