"""Population models for replacement by Wolbachia-infected mosquitoes.

Two models live here.  The full planar system tracks a wild population n1
and an infected population n2 under logistic competition, cytoplasmic
incompatibility (strength ``s_h``) and a release rate ``u`` feeding n2:

    n1' = b1 * n1 * (1 - s_h * n2/(n1+n2)) * (1 - (n1+n2)/K) - d1 * n1
    n2' = b2 * n2 * (1 - (n1+n2)/K) - d2 * n2 + u

In the high-fecundity limit the infected proportion p = n2/(n1+n2) obeys
the scalar control-affine equation p' = f(p) + u * g(p), with

    f(p) = p (1-p) (d1 b2 - d2 b1 (1 - s_h p)) / D(p)
    g(p) = (1/K) b1 (1-p)(1-s_h p) / D(p)
    D(p) = b1 (1-p)(1-s_h p) + b2 p

The uncontrolled proportion equation is bistable: p=0 and p=1 are stable,
and the invasion threshold theta in between is the only interior root
of f.  Everything downstream (minimal release rates, minimal replacement
times, switching structure) is built on f, g and their derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidParameters

__all__ = [
    "ReducedParams",
    "FullParams",
    "f_reduced",
    "g_reduced",
    "df_reduced",
    "dg_reduced",
    "theta",
    "p_star",
    "full_rhs",
    "full_jacobian",
    "carrying_capacity_from_density",
]


@dataclass(frozen=True)
class ReducedParams:
    """Parameters of the scalar proportion model.

    ``b1_0`` and ``b2_0`` are the normalized wild/infected birth rates,
    ``d1``/``d2`` the death rates, ``K`` the normalized carrying capacity
    and ``s_h`` the cytoplasmic-incompatibility level in [0, 1].

    Construction enforces the bistability condition

        1 - s_h < d1*b2_0 / (d2*b1_0) < 1

    under which the threshold ``theta`` and the interior critical point
    ``p_star`` of f/g exist.
    """

    b1_0: float
    b2_0: float
    d1: float
    d2: float
    K: float
    s_h: float

    def __post_init__(self):
        for name in ("b1_0", "b2_0", "d1", "d2", "K"):
            if not getattr(self, name) > 0.0:
                raise InvalidParameters(f"{name} must be strictly positive")
        if not 0.0 <= self.s_h <= 1.0:
            raise InvalidParameters("s_h must lie in [0, 1]")
        r = self.d1 * self.b2_0 / (self.d2 * self.b1_0)
        if not (1.0 - self.s_h < r < 1.0):
            raise InvalidParameters(
                "bistability condition violated: need "
                f"1 - s_h < d1*b2_0/(d2*b1_0) < 1, got ratio {r:.6g} "
                f"with 1 - s_h = {1.0 - self.s_h:.6g}"
            )

    @property
    def ratio(self) -> float:
        """d1*b2_0 / (d2*b1_0), the quantity pinned inside (1 - s_h, 1)."""
        return self.d1 * self.b2_0 / (self.d2 * self.b1_0)

    def kernel_args(self):
        """Scalar tuple consumed by the numba kernels."""
        return (self.b1_0, self.b2_0, self.d1, self.d2, self.K, self.s_h)


@dataclass(frozen=True)
class FullParams:
    """Parameters of the planar wild/infected system.

    Requires b1 > d1 and b2 > d2 so both single-species equilibria
    n1* = K(1 - d1/b1) and n2* = K(1 - d2/b2) are positive.
    """

    b1: float
    b2: float
    d1: float
    d2: float
    K: float
    s_h: float

    def __post_init__(self):
        for name in ("b1", "b2", "d1", "d2", "K"):
            if not getattr(self, name) > 0.0:
                raise InvalidParameters(f"{name} must be strictly positive")
        if not 0.0 <= self.s_h <= 1.0:
            raise InvalidParameters("s_h must lie in [0, 1]")
        if not self.b1 > self.d1:
            raise InvalidParameters("need b1 > d1 for a positive wild equilibrium")
        if not self.b2 > self.d2:
            raise InvalidParameters("need b2 > d2 for a positive infected equilibrium")

    @property
    def n1_star(self) -> float:
        """Wild-only equilibrium population K(1 - d1/b1)."""
        return self.K * (1.0 - self.d1 / self.b1)

    @property
    def n2_star(self) -> float:
        """Infected-only equilibrium population K(1 - d2/b2)."""
        return self.K * (1.0 - self.d2 / self.b2)

    def kernel_args(self):
        return (self.b1, self.b2, self.d1, self.d2, self.K, self.s_h)


def _check_proportion(p: float):
    if not -1e-12 <= p <= 1.0 + 1e-12:
        raise ValueError(f"proportion {p} outside [0, 1]")


def f_reduced(p: float, params: ReducedParams) -> float:
    """Uncontrolled drift of the infected proportion."""
    _check_proportion(p)
    b1, b2, d1, d2, K, sh = params.kernel_args()
    A = b1 * (1.0 - p) * (1.0 - sh * p)
    B = d1 * b2 - d2 * b1 * (1.0 - sh * p)
    D = A + b2 * p
    return p * (1.0 - p) * B / D


def g_reduced(p: float, params: ReducedParams) -> float:
    """Per-unit effect of the release rate on the proportion drift."""
    _check_proportion(p)
    b1, b2, d1, d2, K, sh = params.kernel_args()
    A = b1 * (1.0 - p) * (1.0 - sh * p)
    D = A + b2 * p
    return A / (K * D)


def df_reduced(p: float, params: ReducedParams) -> float:
    """Derivative of f with respect to p (quotient rule on the closed form)."""
    _check_proportion(p)
    b1, b2, d1, d2, K, sh = params.kernel_args()
    A = b1 * (1.0 - p) * (1.0 - sh * p)
    Ap = b1 * (-(1.0 + sh) + 2.0 * sh * p)
    B = d1 * b2 - d2 * b1 * (1.0 - sh * p)
    Bp = d2 * b1 * sh
    D = A + b2 * p
    Dp = Ap + b2
    Nf = p * (1.0 - p) * B
    Nfp = (1.0 - 2.0 * p) * B + p * (1.0 - p) * Bp
    return (Nfp * D - Nf * Dp) / (D * D)


def dg_reduced(p: float, params: ReducedParams) -> float:
    """Derivative of g with respect to p."""
    _check_proportion(p)
    b1, b2, d1, d2, K, sh = params.kernel_args()
    A = b1 * (1.0 - p) * (1.0 - sh * p)
    Ap = b1 * (-(1.0 + sh) + 2.0 * sh * p)
    D = A + b2 * p
    Dp = Ap + b2
    return (Ap * D - A * Dp) / (K * D * D)


def theta(params: ReducedParams) -> float:
    """Invasion threshold: the unique root of f strictly between 0 and 1."""
    return (1.0 / params.s_h) * (1.0 - params.ratio)


def p_star(params: ReducedParams) -> float:
    """Interior critical point of f/g, where the switching function's slope flips.

    Closed form (1/s_h) * (1 - sqrt(d1 b2_0 / (d2 b1_0))); always lies in
    (0, theta).
    """
    return (1.0 / params.s_h) * (1.0 - params.ratio ** 0.5)


def full_rhs(n1: float, n2: float, u: float, params: FullParams):
    """Vector field of the planar system at state (n1, n2) under release rate u.

    The incompatibility factor n2/(n1+n2) is taken as 0 when both
    populations vanish; the n1 equation is multiplied by n1 = 0 there
    anyway, so this removes the singularity without changing dynamics.
    """
    if n1 < 0.0 or n2 < 0.0:
        raise ValueError(f"negative population ({n1}, {n2})")
    if u < 0.0:
        raise ValueError("release rate must be nonnegative")
    b1, b2, d1, d2, K, sh = params.kernel_args()
    N = n1 + n2
    ci = 1.0 - sh * (n2 / N) if N > 0.0 else 1.0
    comp = 1.0 - N / K
    return (b1 * n1 * ci * comp - d1 * n1, b2 * n2 * comp - d2 * n2 + u)


def full_jacobian(n1: float, n2: float, params: FullParams):
    """State Jacobian of the planar vector field, as ((a11, a12), (a21, a22)).

    At total extinction the incompatibility factor is frozen at 1 and its
    partials at 0, matching the convention in :func:`full_rhs`.
    """
    b1, b2, d1, d2, K, sh = params.kernel_args()
    N = n1 + n2
    if N > 0.0:
        ci = 1.0 - sh * n2 / N
        dci1 = sh * n2 / (N * N)
        dci2 = -sh * n1 / (N * N)
    else:
        ci, dci1, dci2 = 1.0, 0.0, 0.0
    comp = 1.0 - N / K
    a11 = b1 * (ci * comp + n1 * (dci1 * comp - ci / K)) - d1
    a12 = b1 * n1 * (dci2 * comp - ci / K)
    a21 = -b2 * n2 / K
    a22 = b2 * comp - b2 * n2 / K - d2
    return ((a11, a12), (a21, a22))


def carrying_capacity_from_density(area: float, density: float, d1: float, b1: float) -> float:
    """Carrying capacity implied by an observed wild equilibrium.

    A habitat of ``area`` hectares at ``density`` mosquitoes per hectare
    holds n1* = area * density wild mosquitoes at equilibrium, so
    K = n1* / (1 - d1/b1).
    """
    if area <= 0.0 or density <= 0.0 or d1 < 0.0:
        raise InvalidParameters("area and density must be positive, d1 nonnegative")
    if not b1 > d1:
        raise InvalidParameters("need b1 > d1 to invert the equilibrium relation")
    return area * density / (1.0 - d1 / b1)
