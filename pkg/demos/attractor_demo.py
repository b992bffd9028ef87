"""Damped-forced dynamics: absorbing ball and the smooth part.

With damping gamma and a fixed low-mode forcing, every trajectory's
total norm decays onto a ball whose radius forgets the initial data;
the solution minus its damped free evolution stays bounded in norms a
half-derivative (and more) above the data's regularity.  This is the
desk-scale picture behind a compact, smooth global attractor.

Run:  python demos/attractor_demo.py   (about two minutes)
"""
from zakbench.dissipative import (
    AbsorbingConfig,
    AttractorConfig,
    absorbing_fit,
    attractor_probe,
)

print("absorbing-set fit (three far-out trajectories) ...")
fit = absorbing_fit(AbsorbingConfig(
    alpha="3/4", gamma=0.1, forcing_h1=1.0, radius=24,
    seeds=(0, 1, 2), data_scale=1.0, t_end=120.0, dt=1e-3,
    fit_burn_in=5.0,
))
print(f"  Q(t) ~ C1 + C2 exp(-C3 t): C1 = {fit['C1_hat']:.3f} "
      f"(spread {fit['C1_spread']:.1%}), C3 = {fit['C3_hat']:.3f} vs gamma = 0.1")

print("\nsmooth-part radii over t in [5, 50] (four trajectories) ...")
probe = attractor_probe(AttractorConfig(
    alpha="3/4", gamma=0.1, forcing_h1=1.0, radius=32,
    seeds=(0, 1, 2, 3), t_window=(5.0, 50.0), dt=1e-3, sample_dt=0.5,
))
for a, r in probe["R_hat"].items():
    print(f"  a = {a}: sup_t |N_t|_(H^(1+a) x H^a) = {r:.3f}")
print(f"  late-time pairwise energy distances: "
      f"{', '.join(f'{d:.3f}' for d in probe['diameters'])}")
print(f"  linear part decays like exp(-gamma t) on every band: "
      f"{probe['linear_decay_ok']}")
