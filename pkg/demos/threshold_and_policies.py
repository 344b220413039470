"""Closed-form tour of the scalar replacement model.

Walks through the quantities that organize every release strategy: the
invasion threshold theta (above it the infection takes over on its own),
the sustaining-rate curve -f/g with its peak m*, the crossing time t*(M)
under the full release rate, and the single-burst policies that realize
the minimal released mass.

Run:  python demos/threshold_and_policies.py
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
p_star = it.p_star(params)
m_star = it.m_star(params)
t_star = it.t_star(M, params)

print("invasion threshold  theta =", theta)
print("critical proportion p*    =", p_star)
print("minimal sustaining rate m* =", m_star)
print(f"crossing time t*({M:g}) = {t_star:.7f},  burst mass M t* = {M * t_star:.7f}")

# the crossing time blows up as the rate approaches m* from above
rates = np.geomspace(1.05 * m_star, M, 60)
times = [it.feasibility_time(r, params) for r in rates]

fig, axes = plt.subplots(1, 3, figsize=(13, 3.6))
ps = np.linspace(0.0, 1.0, 400)
axes[0].plot(ps, [it.f_reduced(p, params) for p in ps])
axes[0].axhline(0.0, color="k", lw=0.5)
for mark, label in ((theta, "theta"), (p_star, "p*")):
    axes[0].axvline(mark, ls="--", lw=0.8, label=label)
axes[0].set_xlabel("infected proportion p")
axes[0].set_ylabel("drift f(p)")
axes[0].set_title("bistable drift")
axes[0].legend()

ps_th = np.linspace(0.0, theta, 300)
axes[1].plot(ps_th, [-it.f_reduced(p, params) / it.g_reduced(p, params) for p in ps_th])
axes[1].axhline(m_star, ls="--", lw=0.8, color="tab:red", label="m*")
axes[1].set_xlabel("p")
axes[1].set_ylabel("-f/g (sustaining rate)")
axes[1].set_title("rate needed to keep climbing")
axes[1].legend()

axes[2].loglog(rates, times)
axes[2].axvline(m_star, ls="--", lw=0.8, color="tab:red")
axes[2].set_xlabel("constant release rate")
axes[2].set_ylabel("time to reach theta")
axes[2].set_title("crossing time vs rate")
fig.tight_layout()
fig.savefig(OUT / "threshold_quantities.png", dpi=140)

# burst policies: any offset inside the horizon costs the same
T = 0.5
fig, ax = plt.subplots(figsize=(7, 3))
for xi, color in ((0.0, "tab:blue"), ((T - t_star) / 2, "tab:orange")):
    policy = it.min_cost_policy(xi, T, M, params)
    profile = policy.profile(300)
    traj = it.integrate_reduced(profile, 0.0, params)
    t = traj.grid.nodes()
    ax.plot(t, traj.states, color=color, label=f"offset {xi:.3f}, mass {profile.release_cost():.4f}")
ax.axhline(theta, ls="--", lw=0.8, color="k")
ax.set_xlabel("t")
ax.set_ylabel("p(t)")
ax.set_title("equal-cost single-burst policies")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "burst_policies.png", dpi=140)
print("figures written to", OUT)
