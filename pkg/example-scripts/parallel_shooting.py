# -*- coding: utf-8 -*-
"""
Shoot a batch of geodesics with perturbed initial frame velocities and
report how close each one passes to the rotation target.

Usage: mpiexec -n <num_procs> python parallel_shooting.py
"""

import numpy as np
from mpi4py import MPI

from flagfold import initial_state, shoot
from flagfold.core.geodesic import closest_approach

## start parallel programming ---------------------------------------- #
comm = MPI.COMM_WORLD
rank = comm.Get_rank()
size = comm.Get_size()

comm.Barrier()
t_start = MPI.Wtime()

mu0 = [0.98, 0.01, 0.01]  # initial weights
mu_dot0 = [-1.0, 1.0, 0.0]  # initial weight velocity
target = [0.028, 0.95, 0.023]  # weights the reference run passes through
b13 = np.linspace(0.3, 0.7, 64)  # frame velocity on the (1, 3) pair
gap_local = np.zeros_like(b13)
time_local = np.zeros_like(b13)

for p in range(rank, b13.shape[0], size):
    init = initial_state(mu0, mu_dot0, B0={"1,2": 0.05, "2,3": 0.0, "1,3": b13[p]})
    traj = shoot(init, 0.001, 2000)
    index, gap_local[p] = closest_approach(traj, target)
    time_local[p] = traj.times[index]
comm.Barrier()

gap = np.zeros_like(b13)
time = np.zeros_like(b13)
# use MPI to get the totals
comm.Reduce([gap_local, MPI.DOUBLE], [gap, MPI.DOUBLE], op=MPI.SUM, root=0)
comm.Reduce([time_local, MPI.DOUBLE], [time, MPI.DOUBLE], op=MPI.SUM, root=0)

comm.Barrier()
t_diff = MPI.Wtime() - t_start
if comm.rank == 0:
    best = int(np.argmin(gap))
    print(np.column_stack([b13, gap, time]))
    print(f"closest: b13={b13[best]:.4f} gap={gap[best]:.3e} at t={time[best]:.3f}")
    print("Elasped: ", t_diff)
