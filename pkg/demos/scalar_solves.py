"""Penalized transcription on the scalar model, fixed and free horizon.

The fixed-horizon solve recovers the single-burst structure from a flat
mid-level start; the free-horizon solve shrinks the horizon onto the
crossing time t*(M).  Both converged controls are certified against the
switching rule w = q g(p) (at threshold 1 for the fixed problem, 1-alpha
for the weighted one).

Run:  python demos/scalar_solves.py
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import iitopt as it

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

params = it.ReducedParams(b1_0=1.0, b2_0=0.9, d1=0.27, d2=0.3, K=1.0, s_h=0.9)
M = 10.0
theta = it.theta(params)
t_star = it.t_star(M, params)

# fixed horizon
spec = it.ProblemSpec(
    system="reduced", params=params, mode="fixed", M=M, n=300, penalty_eps=0.01, T=0.5
)
report = it.solve(spec, u0=M / 2, max_iters=30000)
structure = it.check_bang_bang(report.control)
print(
    f"fixed horizon: released mass {report.release_cost:.6f} "
    f"(burst value {M * t_star:.6f}), bang-bang {structure.fraction:.1%}, "
    f"single block {structure.single_block}"
)

short = theta - float(report.trajectory.final_state)
qT = 2.0 * short / spec.penalty_eps if short > 0 else 0.0
cert = it.switching_function(report.control, params, 0.0, qT)
print(f"certificate: {cert.verdict} (max violation {cert.max_violation:.3g})")

t = report.trajectory.grid.nodes()
fig, axes = plt.subplots(3, 1, figsize=(7, 7), sharex=True)
axes[0].step(t[:-1], report.control.values, where="post")
axes[0].set_ylabel("u(t)")
axes[0].set_title("fixed horizon T = 0.5")
axes[1].plot(t, report.trajectory.states)
axes[1].axhline(theta, ls="--", lw=0.8, color="k")
axes[1].set_ylabel("p(t)")
axes[2].plot(t, cert.switching)
axes[2].axhline(1.0, ls="--", lw=0.8, color="k")
axes[2].set_ylabel("w(t)")
axes[2].set_xlabel("t")
fig.tight_layout()
fig.savefig(OUT / "scalar_fixed_horizon.png", dpi=140)

# free horizon, time weighted by alpha
spec_free = it.ProblemSpec(
    system="reduced",
    params=params,
    mode="free",
    M=M,
    n=300,
    penalty_eps=1e-4,
    T0=0.1,
    alpha=0.01,
    t_bounds=(0.01, 1.0),
)
report_free = it.solve(spec_free, u0=M, max_iters=30000)
_, value = it.min_cost_time_policy(0.01, M, params)
print(
    f"free horizon: T = {report_free.final_time:.7f} (t* = {t_star:.7f}), "
    f"objective {report_free.combined_objective:.6f} "
    f"(closed form {value.combined:.6f})"
)

fig, ax = plt.subplots(figsize=(7, 3))
tf = report_free.trajectory.grid.nodes()
ax.step(tf[:-1], report_free.control.values, where="post", label="control")
ax2 = ax.twinx()
ax2.plot(tf, report_free.trajectory.states, color="tab:orange", label="p(t)")
ax2.axhline(theta, ls="--", lw=0.8, color="k")
ax.set_xlabel("t")
ax.set_ylabel("u(t)")
ax2.set_ylabel("p(t)")
ax.set_title(f"free horizon, alpha = 0.01: T = {report_free.final_time:.5f}")
fig.tight_layout()
fig.savefig(OUT / "scalar_free_horizon.png", dpi=140)
print("figures written to", OUT)
