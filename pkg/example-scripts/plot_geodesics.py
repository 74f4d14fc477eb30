# -*- coding: utf-8 -*-
"""
Shoot the reference geodesics kept under misc/ and plot their weights,
next to the straight segment between the endpoints of the rotation run.

Usage: python plot_geodesics.py
"""

from pathlib import Path

import matplotlib
import matplotlib.pyplot as plt
import numpy as np

from flagfold import euclidean_geodesic, initial_state, shoot
from flagfold.core.flagcore import FlagRep, compose
from flagfold.core.geodesic import lambda_of
from flagfold.core.utils import load_json

misc = Path(__file__).parent.parent / "misc"
runs = ["rotation", "symmetric", "boundary", "straight"]

trajectories = {}
for name in runs:
    config = load_json(misc / f"geodesic-{name}.json")
    init = initial_state(config["mu0"], config["mu_dot0"], B0=config["B0"])
    trajectories[name] = shoot(init, config["h"], config["N"])
    print(f"{name}: {trajectories[name].termination.value} at t={trajectories[name].times[-1]:.3f}")

## Plot Styling
matplotlib.rcParams["xtick.direction"] = "in"
matplotlib.rcParams["ytick.direction"] = "in"
matplotlib.rcParams["xtick.top"] = True
matplotlib.rcParams["ytick.right"] = True
matplotlib.rcParams["xtick.minor.visible"] = True
matplotlib.rcParams["ytick.minor.visible"] = True
matplotlib.rcParams["axes.grid"] = True
matplotlib.rcParams["lines.solid_capstyle"] = "round"
matplotlib.rcParams["legend.handletextpad"] = 0.4
matplotlib.rcParams["axes.linewidth"] = 0.8
matplotlib.rcParams["lines.linewidth"] = 2.0
matplotlib.rcParams["legend.handlelength"] = 2
matplotlib.rcParams["figure.dpi"] = 200
matplotlib.rcParams["axes.axisbelow"] = True

fig, axes = plt.subplots(2, 2, figsize=(9, 7), sharex=False)
for ax, name in zip(axes.flat, runs):
    traj = trajectories[name]
    for k in range(traj.mus.shape[1]):
        ax.plot(traj.times, traj.mus[:, k], label=rf"$\mu_{k + 1}$")
    ax.set_title(name)
    ax.set_xlabel(r"$t$")
    ax.set_ylim(ymin=-0.02, ymax=1.02)
axes[0, 0].legend(loc="center right")
fig.tight_layout()
fig.savefig("geodesic-weights.png", transparent=True)

# the straight segment between the rotation endpoints swells the smallest eigenvalue
rotation = trajectories["rotation"]
ends = [compose(FlagRep(np.clip(state.mu, 0.0, None) / np.clip(state.mu, 0.0, None).sum(), state.U)) for state in (rotation.states[0], rotation.states[-1])]
segment = euclidean_geodesic(ends[0], ends[1], 200)
fig = plt.figure()
ax = fig.add_subplot(111)
ax.plot(np.linspace(0.0, 1.0, len(segment)), [lambda_of(rep.mu)[-1] for rep in segment], label="straight segment")
ax.plot(rotation.times / rotation.times[-1], [lambda_of(mu)[-1] for mu in rotation.mus], linestyle="--", label="pinched geodesic")
ax.set_xlabel("normalized time")
ax.set_ylabel(r"$\lambda_3$")
ax.legend(loc="upper left")
fig.savefig("segment-contrast.png", transparent=True)
plt.show()
