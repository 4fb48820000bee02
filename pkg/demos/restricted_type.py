"""Restricted-type constant over a sweep of set sizes."""
from tht.harness import estimate_restricted_constant

sweep = [(1, 1 / r, 1 / r) for r in (1, 4, 16)]
for n in (3, 4, 5):
    rows = estimate_restricted_constant(sweep, trials=4, seed=0, n=n)
    cells = "  ".join(f"r={row['ratio_a0_a1']:<3g} {row['constant']:.3f}" for row in rows)
    print(f"n={n}: {cells}")
