"""Conservation walkthrough: evolve random data and watch mass and energy.

The conservative flow preserves the L^2 mass of the Schrodinger part
exactly and the Hamiltonian up to integrator error.  This script runs a
short simulation at a modest resolution and prints the drifts, which
should sit many orders of magnitude below the quantities themselves.

Run:  python demos/conservation_demo.py
"""
import numpy as np

from zakbench import ModelParams, ZakharovState, integrate, random_sobolev_field
from zakbench.dynamics import trajectory_norms

radius = 64
params = ModelParams.from_rational("3/4")

u0 = random_sobolev_field(1.0, radius, seed=1)          # H^1 envelope
n0 = random_sobolev_field(0.0, radius, seed=2, mean_zero=True)  # L^2 half-wave
state = ZakharovState(u0, n0, 0.0)

print(f"evolving N={radius}, alpha=3/4 to t=2 ...")
traj = integrate(state, params, dt=0.5 / radius**2, t_end=2.0, sample_dt=0.25)
norms = trajectory_norms(traj, [1.0])

mass = norms["mass"]
energy = norms["energy"]
print(f"{'t':>6} {'mass':>18} {'energy':>18} {'|u|_H1':>10}")
for i, t in enumerate(norms["t"]):
    print(f"{t:6.2f} {mass[i]:18.12f} {energy[i]:18.12f} {norms['h1_u'][i]:10.4f}")

print(f"\nmass drift   : {np.max(np.abs(mass - mass[0])) / mass[0]:.3e} (relative)")
print(f"energy drift : {np.max(np.abs(energy - energy[0])) / abs(energy[0]):.3e}")
