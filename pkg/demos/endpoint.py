"""Growth of the Haar multiplier norm on a normalized delta, and the BHT identity."""
import numpy as np

from tht import reductions as red
from tht.forms import random_interval_values

for n in range(2, 9):
    k, _ = red.kappa(n)
    print(f"n={n}  kappa={k:.6f}  kappa/n={k / n:.4f}")

rng = np.random.default_rng(1)
f, g, h = rng.standard_normal((3, 16))
eps = random_interval_values(1, "uniform")
for L in (1, 2, 3):
    a = red.eval_bht_form(f, g, h, L, eps)
    b = red.eval_bht_expanded(f, g, h, L, eps)
    c = red.eval_bht_projection_form(f, g, h, L, eps)
    print(f"L={L}: form {a:+.10f}  expanded {b:+.10f}  projection {c:+.10f}")
