"""Trees, size, the single tree ratio and greedy tree selection."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .forms import EpsilonAssignment, eval_form_over_collection
from .geometry import Bitile, NotConvexError, Triple, down_set, is_convex, leq
from .projections import (ProjectionSystem, TileEnergies, collection_resolution,
                          proj_collection)
from .walsh import DyadicInterval, indicator_vector, l2_norm, resolution, upsample


@dataclass(frozen=True)
class Tree:
    """A convex bitile set with a maximal element ``top``."""
    top: Bitile
    members: frozenset
    stage: str = field(default="", compare=False)

    def __post_init__(self):
        if self.top not in self.members:
            raise ValueError("the top must be a member")
        bad = [P for P in self.members if not leq(P, self.top)]
        if bad:
            raise ValueError(f"{bad[0]} is not below the top")

    @classmethod
    def spanned(cls, top: Bitile, within: Iterable[Bitile], stage: str = "") -> "Tree":
        return cls(top, frozenset(down_set(top, 0, within=within)), stage)

    @property
    def area(self) -> float:
        return self.top.area

    @property
    def top_frequency(self) -> float:
        return self.top.omega.left

    def part(self, j: int) -> set[Bitile]:
        """``T_j``: members whose ``j`` half lies below the top."""
        return {P for P in self.members if P != self.top and leq(P.tile(j), self.top)}

    def space_boxes(self) -> set[Triple]:
        return {P.triple for P in self.members}

    def leaves(self) -> set[Triple]:
        """Maximal triples inside a member box that are not member boxes."""
        boxes = self.space_boxes()
        out = set()
        for t in boxes:
            for a in (1, -1):
                for b in (1, -1):
                    I0, I2 = t.I0.half(a), t.I2.half(b)
                    c = Triple(I0, DyadicInterval(I0.scale, I0.pos ^ I2.pos), I2)
                    if c not in boxes:
                        out.add(c)
        return out

    def __len__(self):
        return len(self.members)


@dataclass
class TreeCollection:
    trees: list[Tree] = field(default_factory=list)

    def __iter__(self):
        return iter(self.trees)

    def __len__(self):
        return len(self.trees)

    def union(self) -> set[Bitile]:
        return set().union(*(T.members for T in self.trees)) if self.trees else set()

    def by_stage(self, stage: str) -> list[Tree]:
        return [T for T in self.trees if T.stage == stage]


class _TreeEnergy:
    """Tree energies inside a convex collection via the orthogonal splitting

    ``||Pi_T F||^2 = e(P_T) + sum_j sum_{P in T_j} e(P^-j)``

    for the maximal tree below each top, computed by recursion over the four
    children of a bitile (convexity keeps intermediate bitiles in place).
    """

    def __init__(self, energies: TileEnergies):
        self.e = energies
        self._tile: dict = {}

    def tile(self, p) -> float:
        if p not in self._tile:
            self._tile[p] = self.e(p)
        return self._tile[p]

    def bitile(self, P: Bitile) -> float:
        return self.tile(P.tile(1)) + self.tile(P.tile(-1))

    def partial_sums(self, Ps: set[Bitile]) -> dict[Bitile, tuple[float, float]]:
        """``(S_{+1}(P), S_{-1}(P))`` for the maximal tree below each ``P``."""
        S: dict[Bitile, tuple[float, float]] = {}
        for P in sorted(Ps, key=lambda P: P.scale):
            acc = [0.0, 0.0]
            w = P.omega.parent
            # the half of a child C containing omega_P is C^j
            j = 1 if w.half(1) == P.omega else -1
            for a in (1, -1):
                for b in (1, -1):
                    C = Bitile(P.I0.half(a), P.I2.half(b), w)
                    if C in Ps:
                        acc[0] += S[C][0]
                        acc[1] += S[C][1]
                        acc[0 if j == 1 else 1] += self.tile(C.tile(-j))
            S[P] = (acc[0], acc[1])
        return S

    def tree_energies(self, Ps: set[Bitile]) -> dict[Bitile, float]:
        S = self.partial_sums(Ps)
        return {P: self.bitile(P) + s[0] + s[1] for P, s in S.items()}


def tree_size(i: int, Ps, F: np.ndarray, sys: ProjectionSystem | None = None,
              method: str = "energy") -> float:
    """``sup_T |I_T|^-1/2 ||Pi_T F||`` over trees inside the convex collection ``Ps``.

    For a fixed top the maximal tree wins (the energy is monotone in the
    member set), so the sup runs over tops.  ``method="projection"`` forms each
    maximal tree and projects explicitly.
    """
    Ps = set(Ps)
    if not Ps:
        return 0.0
    if method == "energy":
        E = _TreeEnergy(TileEnergies(i, F, sys, collection_resolution(Ps, F)))
        vals = E.tree_energies(Ps)
        return max(np.sqrt(max(v, 0.0) / P.area) for P, v in vals.items())
    if method == "projection":
        best = 0.0
        for P in Ps:
            T = down_set(P, 0, within=Ps)
            best = max(best, l2_norm(proj_collection(i, T, F, sys)) / P.area**0.5)
        return best
    raise ValueError(f"unknown method {method!r}")


def single_tree_ratio(T: Tree, F0, F1, F2, eps: EpsilonAssignment,
                      sys: ProjectionSystem) -> float:
    """``|Lambda_T| / (|I_T| prod_i size_i(T, F_i))``; ``0/0`` is reported as 0."""
    lam = abs(eval_form_over_collection(T.members, F0, F1, F2, eps))
    den = T.area
    for i, F in enumerate((F0, F1, F2)):
        den *= tree_size(i, T.members, F, sys)
    if den == 0:
        if lam > 1e-12:
            return float("inf")
        return 0.0
    return lam / den


def _extremal_key(P: Bitile, j: int):
    end = P.omega.left if j == -1 else -P.omega.right
    # ties: coarsest top first, then smallest space box
    return (end,) + P.sort_key()


def tree_select(Ps, i: int, F: np.ndarray, n: int, sys: ProjectionSystem | None = None,
                check: bool = True) -> tuple[set[Bitile], TreeCollection]:
    """Split a convex collection into trees and a remainder of size at most ``2**-n``.

    Removed trees are down-sets of the current collection at removal time.
    Stages: ``"heavy"`` (maximal bitiles with large energy), then the passes
    ``"+1"`` and ``"-1"``.
    """
    cur = set(Ps)
    if check and not is_convex(cur):
        raise NotConvexError("tree selection needs a convex collection")
    trees = TreeCollection()
    if not cur:
        return cur, trees
    m = collection_resolution(cur, F)
    E = _TreeEnergy(TileEnergies(i, 2.0**n * F, sys, m))

    heavy = {P for P in cur if E.bitile(P) > P.area / 3}
    tops = [P for P in heavy if not any(Q != P and leq(P, Q) for Q in heavy)]
    for P in sorted(tops, key=Bitile.sort_key):
        T = Tree.spanned(P, cur, "heavy")
        trees.trees.append(T)
        cur -= T.members

    for j in (1, -1):
        while cur:
            S = E.partial_sums(cur)
            k = 0 if j == 1 else 1
            bad = [P for P, s in S.items() if s[k] > P.area / 3]
            if not bad:
                break
            P = min(bad, key=lambda P: _extremal_key(P, j))
            T = Tree.spanned(P, cur, f"{j:+d}")
            trees.trees.append(T)
            cur -= T.members
    return cur, trees


def restricted_norm_sq(i: int, F: np.ndarray, J: Triple) -> float:
    """``||1_{J_(i-1) x J_(i+1)} F||_2^2``."""
    n = resolution(F)
    if -J.I0.scale > n:
        F = upsample(F, -J.I0.scale)
        n = -J.I0.scale
    # F_i is stored as F_i[x_(i+1), x_(i-1)]
    r = indicator_vector(J[(i + 1) % 3], n)
    c = indicator_vector(J[(i - 1) % 3], n)
    return float((r[:, None] * c[None, :] * F**2).sum()) / 4**n


def counting_bound_violations(trees: Iterable[Tree], i: int, F: np.ndarray, n: int,
                              const: float = 9.0, kmin: int | None = None) -> list[tuple]:
    """Boxes ``J`` where ``sum_{I_T in J} |I_T| > const 2**2n ||1_J F||^2``."""
    from .geometry import all_triples
    trees = list(trees)
    if kmin is None:
        kmin = min([T.top.scale for T in trees], default=0)
    out = []
    for J in all_triples(-kmin):
        lhs = sum(T.area for T in trees if T.top.triple.contained_in(J))
        if lhs == 0:
            continue
        rhs = const * 4.0**n * restricted_norm_sq(i, F, J)
        if lhs > rhs * (1 + 1e-12):
            out.append((J, lhs, rhs))
    return out


def counting_function(trees: Iterable[Tree], m: int, ps: Iterable[float] = (1, 2),
                      i: int | None = None) -> tuple[np.ndarray, dict[float, float]]:
    """``N = sum_T 1_{I_T}`` on the resolution-``m`` grid of ``(x0, x2)``.

    With ``i`` given the box is read in the coordinates ``(x_(i+1), x_(i-1))``
    of ``F_i``.
    """
    N = np.zeros((1 << m, 1 << m))
    for T in trees:
        t = T.top.triple
        a, b = (t.I0, t.I2) if i is None else (t[(i + 1) % 3], t[(i - 1) % 3])
        N += indicator_vector(a, m)[:, None] * indicator_vector(b, m)[None, :]
    norms = {}
    for p in ps:
        if p == np.inf:
            norms[p] = float(np.abs(N).max())
        else:
            norms[p] = float((np.abs(N) ** p).sum() / 4**m) ** (1 / p)
    return N, norms


def iterate_tree_selection(Ps, i: int, F: np.ndarray, n_stop: int,
                           sys: ProjectionSystem | None = None,
                           n_start: int | None = None) -> tuple[dict[int, TreeCollection], set[Bitile]]:
    """Run :func:`tree_select` at levels ``n_start..n_stop``.

    The start defaults to the largest level whose bound ``2**-n`` the size of
    the whole collection already meets.  Returns the trees per level and the
    final remainder, whose size is at most ``2**-n_stop``.
    """
    cur = set(Ps)
    if n_start is None:
        s = tree_size(i, cur, F, sys)
        n_start = int(np.floor(-np.log2(s))) if s > 0 else n_stop
    levels = {}
    for n in range(min(n_start, n_stop), n_stop + 1):
        cur, T = tree_select(cur, i, F, n, sys, check=False)
        levels[n] = T
    return levels, cur
