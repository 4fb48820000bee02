"""Evaluate the trilinear form four ways on one random instance and compare."""
import numpy as np

from tht.forms import (EpsilonAssignment, eval_form_bitile_sum, eval_form_integral,
                       eval_form_trace, telescoped_form)

rng = np.random.default_rng(0)
n = 4
F0, F1, F2 = rng.standard_normal((3, 1 << n, 1 << n))
eps = EpsilonAssignment.random_uniform(0)

ref = eval_form_integral(F0, F1, F2, eps)
print(f"integral form          {ref:+.12f}")
for i in range(3):
    print(f"trace form, i={i}        {eval_form_trace(F0, F1, F2, eps, i):+.12f}")
print(f"sum over bitiles       {eval_form_bitile_sum(F0, F1, F2, eps):+.12f}")

# with every coefficient equal to 1 the scale sum telescopes
one = EpsilonAssignment.constant(1.0)
print(f"eps = 1: {eval_form_integral(F0, F1, F2, one):+.12f} vs telescoped {telescoped_form(F0, F1, F2):+.12f}")
