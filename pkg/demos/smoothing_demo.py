"""Nonlinear smoothing, measured: the residue is smoother than the data.

Subtracting the free evolution from the solution leaves a piece with
visibly faster Fourier tail decay.  Regularity is estimated from dyadic
shell slopes, because on a finite mode set every norm is finite and only
the tail carries the information.  At (s0, s1) = (1, 0) and alpha = 3/4
the measured gain is about one full derivative.

Run:  python demos/smoothing_demo.py   (about a minute)
"""
from zakbench.smoothing import SmoothingConfig, smoothing_report

cfg = SmoothingConfig(
    alpha="3/4", s0=1.0, s1=0.0, radius=128, seeds=(0, 1, 2, 3),
    sample_times=(1.0, 5.0), dt=1.0 / 128**2, fit_kmin=8,
)
print(f"running {len(cfg.seeds)} seeds at N={cfg.radius} ...")
rep = smoothing_report(cfg)

print(f"\nmode = {rep['mode']}, theoretical ceilings a0 = {rep['theory']['a0']}, "
      f"a1 = {rep['theory']['a1']}")
print(f"{'t':>5} {'reg u(t)':>10} {'reg residue':>12} {'gain':>7}")
for i, t in enumerate(rep["times"]):
    reg_u = sum(e["reg_u"][i] for e in rep["per_seed"]) / len(rep["per_seed"])
    reg_r = sum(e["reg_residue_u"][i] for e in rep["per_seed"]) / len(rep["per_seed"])
    print(f"{t:5.1f} {reg_u:10.3f} {reg_r:12.3f} {reg_r - reg_u:7.3f}")

print(f"\nheadline gains: a0_hat = {rep['ensemble']['measured_a0']:.3f}, "
      f"a1_hat = {rep['ensemble']['measured_a1']:.3f}")
print("(the data is exactly H^1 x L^2; the residue fits as roughly H^2 x H^1)")
