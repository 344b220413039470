"""Release planning on the full wild/infected system.

Three snapshots of how the horizon shapes the optimal schedule:

- T = 188 sits below the earliest time the full-rate schedule can park
  the state in the target box [0, 10] x [n2* - 10, n2*], so the optimum
  releases at the bound essentially everywhere;
- T = 250 leaves coasting room and the schedule splits into a release
  stage and a free-evolution tail;
- with the horizon free and weighted by alpha the plain subgradient
  solver stops at the smallest all-on horizon (about 190), while the
  margin-sliding polish keeps trading released mass for time and ends at
  a burst-plus-coast schedule that is an order of magnitude cheaper.

Run:  python demos/planar_experiments.py        (about a minute)
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import iitopt as it

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

params = it.FullParams(b1=11.2, b2=10.1, d1=0.04, d2=0.044, K=5124.0, s_h=0.9)
M = 112.0
print(f"wild equilibrium n1* = {params.n1_star:.1f}, infected n2* = {params.n2_star:.1f}")


def fixed_run(T, max_iters=8000):
    spec = it.ProblemSpec(
        system="full", params=params, mode="fixed", M=M, n=300, penalty_eps=1e-4, T=T
    )
    return it.solve(spec, u0=M / 2, max_iters=max_iters)


fig, axes = plt.subplots(2, 2, figsize=(12, 6), sharex="col")
for col, T in enumerate((188.0, 250.0)):
    report = fixed_run(T)
    structure = it.check_bang_bang(report.control)
    print(
        f"T = {T:g}: released mass {report.release_cost:.0f}, penalty {report.penalty_value:.3g}, "
        f"at bound {np.mean(report.control.values > 0.95 * M):.0%}, "
        f"zero tail {structure.zero_tail_fraction:.0%}"
    )
    t = report.trajectory.grid.nodes()
    axes[0, col].step(t[:-1], report.control.values, where="post")
    axes[0, col].set_title(f"T = {T:g}")
    axes[0, col].set_ylabel("u(t)")
    axes[1, col].plot(t, report.trajectory.states[:, 0], label="wild n1")
    axes[1, col].plot(t, report.trajectory.states[:, 1], label="infected n2")
    axes[1, col].set_xlabel("t")
    axes[1, col].set_ylabel("population")
    axes[1, col].legend(loc="center right", fontsize=8)
fig.tight_layout()
fig.savefig(OUT / "planar_fixed_horizons.png", dpi=140)

# free horizon: reproduction mode vs polished mode
spec_free = it.ProblemSpec(
    system="full",
    params=params,
    mode="free",
    M=M,
    n=100,
    penalty_eps=1e-4,
    T0=250.0,
    alpha=0.5,
    t_bounds=(30.0, 300.0),
)
plain = it.solve(spec_free, u0=M, max_iters=8000, slide=False)
polished = it.solve(spec_free, u0=M, max_iters=8000, slide=True)
print(
    f"alpha = 0.5 plain subgradient: T = {plain.final_time:.1f}, "
    f"mass {plain.release_cost:.0f}, objective {plain.combined_objective:.0f}"
)
print(
    f"alpha = 0.5 with margin slide: T = {polished.final_time:.1f}, "
    f"mass {polished.release_cost:.0f}, objective {polished.combined_objective:.0f}"
)

fig, axes = plt.subplots(1, 2, figsize=(12, 3.2))
for ax, rep, label in ((axes[0], plain, "plain"), (axes[1], polished, "with slide")):
    t = rep.trajectory.grid.nodes()
    ax.step(t[:-1], rep.control.values, where="post")
    ax.set_title(f"{label}: T = {rep.final_time:.1f}, objective {rep.combined_objective:.0f}")
    ax.set_xlabel("t")
    ax.set_ylabel("u(t)")
fig.tight_layout()
fig.savefig(OUT / "planar_free_horizon.png", dpi=140)
print("figures written to", OUT)
