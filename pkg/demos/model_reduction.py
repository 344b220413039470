"""How fast the planar system collapses onto the scalar proportion model.

Scaling both birth rates by 1/eps speeds up the total-population dynamics
until only the infected proportion matters; along a ladder of eps values
the sup-norm gap between the planar proportion n2/(n1+n2) and the scalar
solution p shrinks roughly linearly in eps.  A full-rate burst distorts
the comparison at large eps (it injects a capacity-sized amount of
mosquitoes faster than the population can relax), which is why the
default experiment uses a constant sub-maximal release.

Run:  python demos/model_reduction.py
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
grid = it.TimeGrid(0.0, 0.5, 300)
eps_values = [0.1, 0.05, 0.025, 0.0125]
template = it.FullParams(10.0, 9.0, 0.27, 0.3, 1.0, 0.9)

fig, axes = plt.subplots(1, 2, figsize=(11, 3.6))
for level, color in ((1.0, "tab:blue"), (2.0, "tab:orange")):
    u = it.ControlProfile.constant(level, grid, 10.0)
    rep = it.gamma_convergence_experiment(u, params, template, eps_values)
    print(f"constant rate {level}: sup errors", ["%.5f" % s for s in rep.sup_errors])
    axes[0].loglog(rep.eps_values, rep.sup_errors, "o-", color=color, label=f"u = {level}")
axes[0].set_xlabel("eps")
axes[0].set_ylabel("sup |n2/(n1+n2) - p|")
axes[0].set_title("reduction error vs eps")
axes[0].legend()

# proportion trajectories for the smallest and largest eps
u = it.ControlProfile.constant(1.0, grid, 10.0)
red = it.integrate_reduced(u, 0.0, params)
t = grid.nodes()
axes[1].plot(t, red.states, "k--", label="scalar model")
for eps in (0.1, 0.0125):
    fp = it.FullParams(1.0 / eps, 0.9 / eps, 0.27, 0.3, 1.0, 0.9)
    traj = it.integrate_full(u, (fp.n1_star, 0.0), fp)
    total = traj.states.sum(axis=1)
    prop = np.where(total > 0, traj.states[:, 1] / np.where(total > 0, total, 1), 0.0)
    axes[1].plot(t, prop, label=f"planar, eps = {eps}")
axes[1].set_xlabel("t")
axes[1].set_ylabel("infected proportion")
axes[1].set_title("trajectories under u = 1")
axes[1].legend()
fig.tight_layout()
fig.savefig(OUT / "model_reduction.png", dpi=140)
print("figure written to", OUT)
