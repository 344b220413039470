"""Compiled inner loops: fixed-step RK4 integration and adjoint sweeps.

Controls are piecewise constant on ``n`` intervals; each interval is
integrated with ``m`` RK4 substeps, so state arrays have ``n*m + 1``
entries (grid nodes are every ``m``-th entry).  Gradient kernels apply the
exact transpose of the RK4 tangent recursion, so they differentiate the
discrete trajectory itself rather than discretizing the costate equation;
continuous-costate sweeps (used for switching-function diagnostics) are
separate and interpolate the stored state with cubic Hermite polynomials.

Status codes returned by the forward kernels: 0 ok, 1 non-physical state
(instability), 2 NaN encountered.
"""

import numpy as np
from numba import njit

# ---------------------------------------------------------------------------
# scalar proportion model
# ---------------------------------------------------------------------------


@njit(cache=True, inline="always")
def _fg(p, b1, b2, d1, d2, K, sh):
    A = b1 * (1.0 - p) * (1.0 - sh * p)
    B = d1 * b2 - d2 * b1 * (1.0 - sh * p)
    D = A + b2 * p
    return p * (1.0 - p) * B / D, A / (K * D)


@njit(cache=True, inline="always")
def _fg_prime(p, b1, b2, d1, d2, K, sh):
    A = b1 * (1.0 - p) * (1.0 - sh * p)
    Ap = b1 * (-(1.0 + sh) + 2.0 * sh * p)
    B = d1 * b2 - d2 * b1 * (1.0 - sh * p)
    Bp = d2 * b1 * sh
    D = A + b2 * p
    Dp = Ap + b2
    Nf = p * (1.0 - p) * B
    Nfp = (1.0 - 2.0 * p) * B + p * (1.0 - p) * Bp
    return (Nfp * D - Nf * Dp) / (D * D), (Ap * D - A * Dp) / (K * D * D)


@njit(cache=True)
def forward_reduced(p0, uvals, h, m, b1, b2, d1, d2, K, sh):
    n = uvals.shape[0]
    ps = np.empty(n * m + 1)
    ps[0] = p0
    dt = h / m
    p = p0
    idx = 0
    status = 0
    for i in range(n):
        u = uvals[i]
        for _ in range(m):
            f1, g1 = _fg(p, b1, b2, d1, d2, K, sh)
            k1 = f1 + u * g1
            f2, g2 = _fg(p + 0.5 * dt * k1, b1, b2, d1, d2, K, sh)
            k2 = f2 + u * g2
            f3, g3 = _fg(p + 0.5 * dt * k2, b1, b2, d1, d2, K, sh)
            k3 = f3 + u * g3
            f4, g4 = _fg(p + dt * k3, b1, b2, d1, d2, K, sh)
            k4 = f4 + u * g4
            p = p + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if np.isnan(p):
                return ps, 2
            # roundoff-level overshoot is clamped, anything larger is unstable
            if p < 0.0:
                if p >= -1e-12:
                    p = 0.0
                else:
                    return ps, 1
            elif p > 1.0:
                if p <= 1.0 + 1e-12:
                    p = 1.0
                else:
                    return ps, 1
            idx += 1
            ps[idx] = p
    return ps, status


@njit(cache=True)
def grad_reduced(ps, uvals, h, m, lamT, b1, b2, d1, d2, K, sh):
    """Exact gradient of Phi(p(T)) w.r.t. interval controls, Phi'(p(T)) = lamT.

    Returns (per-interval gradient, multiplier transported back to t=0).
    """
    n = uvals.shape[0]
    gu = np.zeros(n)
    dt = h / m
    lam = lamT
    for i in range(n - 1, -1, -1):
        u = uvals[i]
        for j in range(m - 1, -1, -1):
            p = ps[i * m + j]
            f1, g1 = _fg(p, b1, b2, d1, d2, K, sh)
            k1 = f1 + u * g1
            pa = p + 0.5 * dt * k1
            f2, g2 = _fg(pa, b1, b2, d1, d2, K, sh)
            k2 = f2 + u * g2
            pb = p + 0.5 * dt * k2
            f3, g3 = _fg(pb, b1, b2, d1, d2, K, sh)
            k3 = f3 + u * g3
            pc = p + dt * k3
            f4, g4 = _fg(pc, b1, b2, d1, d2, K, sh)
            fp1, gp1 = _fg_prime(p, b1, b2, d1, d2, K, sh)
            fp2, gp2 = _fg_prime(pa, b1, b2, d1, d2, K, sh)
            fp3, gp3 = _fg_prime(pb, b1, b2, d1, d2, K, sh)
            fp4, gp4 = _fg_prime(pc, b1, b2, d1, d2, K, sh)
            a1 = fp1 + u * gp1
            a2 = fp2 + u * gp2
            a3 = fp3 + u * gp3
            a4 = fp4 + u * gp4
            K1x = a1
            K1u = g1
            K2x = a2 * (1.0 + 0.5 * dt * K1x)
            K2u = a2 * 0.5 * dt * K1u + g2
            K3x = a3 * (1.0 + 0.5 * dt * K2x)
            K3u = a3 * 0.5 * dt * K2u + g3
            K4x = a4 * (1.0 + dt * K3x)
            K4u = a4 * dt * K3u + g4
            phi = 1.0 + dt / 6.0 * (K1x + 2.0 * K2x + 2.0 * K3x + K4x)
            psi = dt / 6.0 * (K1u + 2.0 * K2u + 2.0 * K3u + K4u)
            gu[i] += psi * lam
            lam = phi * lam
    return gu, lam


@njit(cache=True)
def adjoint_reduced(ps, uvals, h, m, qT, b1, b2, d1, d2, K, sh):
    """Backward RK4 of q' = -q (f'(p) + u g'(p)) along a stored trajectory.

    Interior stage states come from cubic Hermite interpolation of the
    substep nodes.  Returns q at the n+1 interval endpoints.
    """
    n = uvals.shape[0]
    qs = np.empty(n + 1)
    qs[n] = qT
    dt = h / m
    q = qT
    for i in range(n - 1, -1, -1):
        u = uvals[i]
        for j in range(m - 1, -1, -1):
            p0 = ps[i * m + j]
            p1 = ps[i * m + j + 1]
            f0, g0 = _fg(p0, b1, b2, d1, d2, K, sh)
            f1, g1 = _fg(p1, b1, b2, d1, d2, K, sh)
            s0 = f0 + u * g0
            s1 = f1 + u * g1
            pmid = 0.5 * (p0 + p1) + dt * (s0 - s1) / 8.0
            fpe, gpe = _fg_prime(p1, b1, b2, d1, d2, K, sh)
            a_end = fpe + u * gpe
            fpm, gpm = _fg_prime(pmid, b1, b2, d1, d2, K, sh)
            a_mid = fpm + u * gpm
            fps, gps = _fg_prime(p0, b1, b2, d1, d2, K, sh)
            a_sta = fps + u * gps
            k1 = -a_end * q
            k2 = -a_mid * (q - 0.5 * dt * k1)
            k3 = -a_mid * (q - 0.5 * dt * k2)
            k4 = -a_sta * (q - dt * k3)
            q = q - dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        qs[i] = q
    return qs


# ---------------------------------------------------------------------------
# planar wild/infected model
# ---------------------------------------------------------------------------


@njit(cache=True, inline="always")
def _frhs(n1, n2, u, b1, b2, d1, d2, K, sh):
    N = n1 + n2
    ci = 1.0 - sh * (n2 / N) if N > 0.0 else 1.0
    comp = 1.0 - N / K
    return b1 * n1 * ci * comp - d1 * n1, b2 * n2 * comp - d2 * n2 + u


@njit(cache=True, inline="always")
def _fjac(n1, n2, b1, b2, d1, d2, K, sh):
    N = n1 + n2
    if N > 0.0:
        ci = 1.0 - sh * n2 / N
        dci1 = sh * n2 / (N * N)
        dci2 = -sh * n1 / (N * N)
    else:
        ci = 1.0
        dci1 = 0.0
        dci2 = 0.0
    comp = 1.0 - N / K
    a11 = b1 * (ci * comp + n1 * (dci1 * comp - ci / K)) - d1
    a12 = b1 * n1 * (dci2 * comp - ci / K)
    a21 = -b2 * n2 / K
    a22 = b2 * comp - b2 * n2 / K - d2
    return a11, a12, a21, a22


@njit(cache=True)
def forward_full(x1, x2, uvals, h, m, b1, b2, d1, d2, K, sh):
    n = uvals.shape[0]
    xs = np.empty((n * m + 1, 2))
    xs[0, 0] = x1
    xs[0, 1] = x2
    dt = h / m
    idx = 0
    tol = 1e-9 * K
    for i in range(n):
        u = uvals[i]
        for _ in range(m):
            a1, a2 = _frhs(x1, x2, u, b1, b2, d1, d2, K, sh)
            e1, e2 = _frhs(x1 + 0.5 * dt * a1, x2 + 0.5 * dt * a2, u, b1, b2, d1, d2, K, sh)
            c1, c2 = _frhs(x1 + 0.5 * dt * e1, x2 + 0.5 * dt * e2, u, b1, b2, d1, d2, K, sh)
            f1, f2 = _frhs(x1 + dt * c1, x2 + dt * c2, u, b1, b2, d1, d2, K, sh)
            x1 = x1 + dt / 6.0 * (a1 + 2.0 * e1 + 2.0 * c1 + f1)
            x2 = x2 + dt / 6.0 * (a2 + 2.0 * e2 + 2.0 * c2 + f2)
            if np.isnan(x1) or np.isnan(x2):
                return xs, 2
            if x1 < 0.0:
                if x1 >= -tol:
                    x1 = 0.0
                else:
                    return xs, 1
            if x2 < 0.0:
                if x2 >= -tol:
                    x2 = 0.0
                else:
                    return xs, 1
            idx += 1
            xs[idx, 0] = x1
            xs[idx, 1] = x2
    return xs, 0


@njit(cache=True)
def grad_full(xs, uvals, h, m, lam1T, lam2T, b1, b2, d1, d2, K, sh):
    """Exact gradient of Phi(x(T)) w.r.t. interval controls, grad Phi = (lam1T, lam2T)."""
    n = uvals.shape[0]
    gu = np.zeros(n)
    dt = h / m
    l1 = lam1T
    l2 = lam2T
    for i in range(n - 1, -1, -1):
        u = uvals[i]
        for j in range(m - 1, -1, -1):
            idx = i * m + j
            x1 = xs[idx, 0]
            x2 = xs[idx, 1]
            a1, a2 = _frhs(x1, x2, u, b1, b2, d1, d2, K, sh)
            xa1 = x1 + 0.5 * dt * a1
            xa2 = x2 + 0.5 * dt * a2
            e1, e2 = _frhs(xa1, xa2, u, b1, b2, d1, d2, K, sh)
            xb1 = x1 + 0.5 * dt * e1
            xb2 = x2 + 0.5 * dt * e2
            c1, c2 = _frhs(xb1, xb2, u, b1, b2, d1, d2, K, sh)
            xc1 = x1 + dt * c1
            xc2 = x2 + dt * c2
            A1_11, A1_12, A1_21, A1_22 = _fjac(x1, x2, b1, b2, d1, d2, K, sh)
            A2_11, A2_12, A2_21, A2_22 = _fjac(xa1, xa2, b1, b2, d1, d2, K, sh)
            A3_11, A3_12, A3_21, A3_22 = _fjac(xb1, xb2, b1, b2, d1, d2, K, sh)
            A4_11, A4_12, A4_21, A4_22 = _fjac(xc1, xc2, b1, b2, d1, d2, K, sh)
            # stage tangents: K1 = A1, Ki = Ai (I + c dt K_{i-1}); control column B = (0, 1)
            K1x11, K1x12, K1x21, K1x22 = A1_11, A1_12, A1_21, A1_22
            K1u1, K1u2 = 0.0, 1.0
            M11 = 1.0 + 0.5 * dt * K1x11
            M12 = 0.5 * dt * K1x12
            M21 = 0.5 * dt * K1x21
            M22 = 1.0 + 0.5 * dt * K1x22
            K2x11 = A2_11 * M11 + A2_12 * M21
            K2x12 = A2_11 * M12 + A2_12 * M22
            K2x21 = A2_21 * M11 + A2_22 * M21
            K2x22 = A2_21 * M12 + A2_22 * M22
            v1 = 0.5 * dt * K1u1
            v2 = 0.5 * dt * K1u2
            K2u1 = A2_11 * v1 + A2_12 * v2
            K2u2 = A2_21 * v1 + A2_22 * v2 + 1.0
            M11 = 1.0 + 0.5 * dt * K2x11
            M12 = 0.5 * dt * K2x12
            M21 = 0.5 * dt * K2x21
            M22 = 1.0 + 0.5 * dt * K2x22
            K3x11 = A3_11 * M11 + A3_12 * M21
            K3x12 = A3_11 * M12 + A3_12 * M22
            K3x21 = A3_21 * M11 + A3_22 * M21
            K3x22 = A3_21 * M12 + A3_22 * M22
            v1 = 0.5 * dt * K2u1
            v2 = 0.5 * dt * K2u2
            K3u1 = A3_11 * v1 + A3_12 * v2
            K3u2 = A3_21 * v1 + A3_22 * v2 + 1.0
            M11 = 1.0 + dt * K3x11
            M12 = dt * K3x12
            M21 = dt * K3x21
            M22 = 1.0 + dt * K3x22
            K4x11 = A4_11 * M11 + A4_12 * M21
            K4x12 = A4_11 * M12 + A4_12 * M22
            K4x21 = A4_21 * M11 + A4_22 * M21
            K4x22 = A4_21 * M12 + A4_22 * M22
            v1 = dt * K3u1
            v2 = dt * K3u2
            K4u1 = A4_11 * v1 + A4_12 * v2
            K4u2 = A4_21 * v1 + A4_22 * v2 + 1.0
            P11 = 1.0 + dt / 6.0 * (K1x11 + 2.0 * K2x11 + 2.0 * K3x11 + K4x11)
            P12 = dt / 6.0 * (K1x12 + 2.0 * K2x12 + 2.0 * K3x12 + K4x12)
            P21 = dt / 6.0 * (K1x21 + 2.0 * K2x21 + 2.0 * K3x21 + K4x21)
            P22 = 1.0 + dt / 6.0 * (K1x22 + 2.0 * K2x22 + 2.0 * K3x22 + K4x22)
            s1 = dt / 6.0 * (K1u1 + 2.0 * K2u1 + 2.0 * K3u1 + K4u1)
            s2 = dt / 6.0 * (K1u2 + 2.0 * K2u2 + 2.0 * K3u2 + K4u2)
            gu[i] += s1 * l1 + s2 * l2
            nl1 = P11 * l1 + P21 * l2
            nl2 = P12 * l1 + P22 * l2
            l1 = nl1
            l2 = nl2
    return gu, l1, l2


@njit(cache=True)
def adjoint_full(xs, uvals, h, m, q1T, q2T, b1, b2, d1, d2, K, sh):
    """Backward RK4 of q' = -J(x(t))^T q along a stored trajectory."""
    n = uvals.shape[0]
    qs = np.empty((n + 1, 2))
    qs[n, 0] = q1T
    qs[n, 1] = q2T
    dt = h / m
    q1 = q1T
    q2 = q2T
    for i in range(n - 1, -1, -1):
        u = uvals[i]
        for j in range(m - 1, -1, -1):
            idx = i * m + j
            x01 = xs[idx, 0]
            x02 = xs[idx, 1]
            x11 = xs[idx + 1, 0]
            x12 = xs[idx + 1, 1]
            s01, s02 = _frhs(x01, x02, u, b1, b2, d1, d2, K, sh)
            s11, s12 = _frhs(x11, x12, u, b1, b2, d1, d2, K, sh)
            xm1 = 0.5 * (x01 + x11) + dt * (s01 - s11) / 8.0
            xm2 = 0.5 * (x02 + x12) + dt * (s02 - s12) / 8.0
            E11, E12, E21, E22 = _fjac(x11, x12, b1, b2, d1, d2, K, sh)
            Mm11, Mm12, Mm21, Mm22 = _fjac(xm1, xm2, b1, b2, d1, d2, K, sh)
            S11, S12, S21, S22 = _fjac(x01, x02, b1, b2, d1, d2, K, sh)
            # k = -A^T q evaluated at end / mid / mid / start
            k11 = -(E11 * q1 + E21 * q2)
            k12 = -(E12 * q1 + E22 * q2)
            t1 = q1 - 0.5 * dt * k11
            t2 = q2 - 0.5 * dt * k12
            k21 = -(Mm11 * t1 + Mm21 * t2)
            k22 = -(Mm12 * t1 + Mm22 * t2)
            t1 = q1 - 0.5 * dt * k21
            t2 = q2 - 0.5 * dt * k22
            k31 = -(Mm11 * t1 + Mm21 * t2)
            k32 = -(Mm12 * t1 + Mm22 * t2)
            t1 = q1 - dt * k31
            t2 = q2 - dt * k32
            k41 = -(S11 * t1 + S21 * t2)
            k42 = -(S12 * t1 + S22 * t2)
            q1 = q1 - dt / 6.0 * (k11 + 2.0 * k21 + 2.0 * k31 + k41)
            q2 = q2 - dt / 6.0 * (k12 + 2.0 * k22 + 2.0 * k32 + k42)
        qs[i, 0] = q1
        qs[i, 1] = q2
    return qs
