"""Greedy tree selection on a random convex collection of bitiles."""
import numpy as np

from tht.geometry import down_set, enum_bitiles
from tht.projections import ProjectionSystem
from tht.trees import iterate_tree_selection, tree_size

n = 4
rng = np.random.default_rng(3)
sys = ProjectionSystem.diagonal(1.0)

Ps = set()
tops = [P for P in enum_bitiles(n) if P.scale >= -1]
for j in rng.choice(len(tops), 3, replace=False):
    Ps |= set(down_set(tops[j], n))
F = rng.standard_normal((1 << n, 1 << n))

print(f"{len(Ps)} bitiles, size_2 = {tree_size(2, Ps, F, sys):.4f}")
stages, rest = iterate_tree_selection(Ps, 2, F, n_stop=3, sys=sys)
for level, trees in sorted(stages.items()):
    print(f"level {level}: {len(trees.trees)} trees, {sum(len(T.members) for T in trees.trees)} bitiles")
print(f"remainder: {len(rest)} bitiles, size {tree_size(2, rest, F, sys) if rest else 0.0:.4f}")
