"""Sup-sum boundedness, numerically: flat at admissible s, growing above.

The cubic-correction estimates reduce to weighted lattice sums that must
stay bounded in the output frequency.  A dyadic sweep shows the sums
flatten out at the admissible regularity and grow like a power once s is
pushed past it.

Run:  python demos/bounds_demo.py   (about half a minute)
"""
from zakbench.bounds import SupSumSpec, lemma_int_b, supsum_sweep

print("integral lemma sanity: rho1 = rho2 = 0, beta = 1 gives exactly 2")
row = lemma_int_b(1.0, 0.0, 0.0)
print(f"  quadrature = {row['value']:.6f} (+ tail bound {row['tail_bound']:.1e})")

for spec in (
    SupSumSpec("R2", s=2.0, s0=1.0, s1=0.0, b=0.55, alpha=0.75, K=2**8,
               label="admissible s = 2"),
    SupSumSpec("R2", s=3.0, s0=1.0, s1=0.0, b=0.55, alpha=0.75, K=2**8,
               admissible=False, label="sharpness probe s = 3"),
):
    out = supsum_sweep(spec)
    values = " ".join(f"{r['sum']:.3g}" for r in out["rows"])
    print(f"\n{spec.label}: slope = {out['slope']:.3f} "
          f"({'bounded' if out['bounded_verdict'] else 'growing'})")
    print(f"  sums along k = 1,2,4,...: {values}")
