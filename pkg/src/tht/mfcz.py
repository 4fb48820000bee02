"""Fiberwise multi-frequency Calderon-Zygmund decomposition.

Masks and functions live on the grids of their natural variables:
``F0[x1, x2]``, ``F1[x2, x0]``, ``F2[x0, x1]``.  A one-dimensional interval
``J = {fiber} x J1`` is stored as ``(fiber cell index, J1)``; the ``x1``
direction is axis 1 for ``F2``-side objects and axis 0 for ``F0``-side ones.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .forms import eval_lambda_bitile
from .geometry import Bitile
from .projections import ProjectionSystem, collection_resolution, proj_collection, project_1d
from .trees import Tree, counting_function
from .walsh import DyadicInterval, resolution, upsample


def _block_max_mean(G: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
    """Sup over dyadic blocks (cubes along ``axes``) of the block mean, at every cell."""
    n = resolution(G)
    out = G.copy()
    for s in range(1, n + 1):
        b = 1 << s
        shape = []
        for ax, size in enumerate(G.shape):
            shape += [size // b, b] if ax in axes else [size]
        red = tuple(ax + 1 + sum(1 for a in axes if a < ax) for ax in axes)
        means = G.reshape(shape).mean(axis=red, keepdims=True)
        out = np.maximum(out, np.broadcast_to(means, shape).reshape(G.shape))
    return out


def dyadic_maximal(F: np.ndarray, p: float = 1.0, axis: int | None = None) -> np.ndarray:
    """Dyadic ``M_p F = sup (mean |F|^p)^(1/p)`` over cells containing each point.

    ``axis=None`` takes dyadic cubes in all variables; an integer axis gives
    the directional maximal function along that axis.
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    G = np.abs(np.asarray(F, dtype=float)) ** p
    axes = tuple(range(G.ndim)) if axis is None else (axis % G.ndim,)
    return _block_max_mean(G, axes) ** (1 / p)


def measure(mask: np.ndarray) -> float:
    return float(np.mean(mask))


def b1_from(B0: np.ndarray, B2: np.ndarray) -> np.ndarray:
    """``B1[x2, x0]``: the diagonal ``x1 = x0 (+) x2`` meets ``B0`` or ``B2`` above the point."""
    m = resolution(B0)
    x = np.arange(1 << m)
    x2, x0 = x[:, None], x[None, :]
    return B0[x0 ^ x2, x2] | B2[x0, x0 ^ x2]


@dataclass
class ExceptionalSets:
    B0: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    threshold: float

    @property
    def measure_B1(self) -> float:
        return measure(self.B1)


def build_exceptional_sets(E0: np.ndarray, E2: np.ndarray, p0: float, p2: float,
                           threshold: float = 2.0**10, b0_axis: int | None = None,
                           threshold2: float | None = None) -> ExceptionalSets:
    """Superlevel sets of normalized maximal functions of ``1_E0`` and ``1_E2``.

    ``B0`` uses the full maximal function unless ``b0_axis`` is given (the
    ``x1`` direction of ``F0`` is axis 0); ``B2`` is always directional along
    ``x1`` (axis 1).  ``threshold2`` overrides the threshold for ``B2``.
    """
    E0, E2 = np.asarray(E0, bool), np.asarray(E2, bool)
    if not E0.any() or not E2.any():
        raise ValueError("exceptional sets need nonempty E0 and E2")
    B0 = dyadic_maximal(measure(E0) ** (-1 / p0) * E0, p0, axis=b0_axis) > threshold
    t2 = threshold if threshold2 is None else threshold2
    B2 = dyadic_maximal(measure(E2) ** (-1 / p2) * E2, p2, axis=1) > t2
    return ExceptionalSets(B0, b1_from(B0, B2), B2, threshold)


def maximal_intervals_in(mask: np.ndarray, axis: int = 1) -> list[tuple[int, DyadicInterval]]:
    """Maximal dyadic intervals along ``axis`` inside the mask, fiber by fiber."""
    mask = np.moveaxis(np.asarray(mask, bool), axis, -1)
    m = resolution(mask)
    out = []
    for fib, row in enumerate(mask):
        full = {(-m, j): bool(v) for j, v in enumerate(row)}
        for k in range(-m + 1, 1):
            for j in range(1 << -k):
                full[(k, j)] = full[(k - 1, 2 * j)] and full[(k - 1, 2 * j + 1)]
        for (k, j), inside in sorted(full.items(), key=lambda t: (-t[0][0], t[0][1])):
            if inside and (k == 0 or not full[(k + 1, j >> 1)]):
                out.append((fib, DyadicInterval(k, j)))
    return out


@dataclass
class GoodFunction:
    G: np.ndarray
    intervals: list[tuple[int, DyadicInterval]]
    omegas: dict = field(default_factory=dict)
    axis: int = 1

    def pieces(self) -> dict:
        """``G_J`` for every cover interval (computed on demand)."""
        m = resolution(self.G)
        out = {}
        for J in self.intervals:
            fib, J1 = J
            w = 1 << (J1.scale + m)
            sl = [fib, slice(J1.pos * w, (J1.pos + 1) * w)]
            if self.axis == 0:
                sl.reverse()
            piece = np.zeros_like(self.G)
            piece[tuple(sl)] = self.G[tuple(sl)]
            out[J] = piece
        return out


def frequency_set(J: tuple[int, DyadicInterval], trees: Iterable[Tree], m: int,
                  axis: int = 1) -> list[DyadicInterval]:
    """``Omega_J``: length ``1/|J1|`` ancestors of top frequencies of trees above ``J``."""
    fib, J1 = J
    fiber_cell = DyadicInterval(-m, fib)
    out = set()
    for T in trees:
        t = T.top
        fiber_iv = t.I0 if axis == 1 else t.I2
        if not (fiber_iv.contains(fiber_cell) and t.I1.contains(J1)):
            continue
        s = -J1.scale
        if s >= t.omega.scale:
            out.add(t.omega.ancestor(s))
    return sorted(out)


def build_good_function(F: np.ndarray, trees: Iterable[Tree],
                        intervals: list[tuple[int, DyadicInterval]], axis: int = 1) -> GoodFunction:
    """``G = sum_J 1_J sum_{omega in Omega_J} Pi_{J1 x omega} F(fiber, .)``."""
    trees = list(trees)
    m = resolution(F)
    G = np.zeros_like(F, dtype=float)
    omegas = {}
    Fm = np.moveaxis(F, axis, -1)
    Gm = np.moveaxis(G, axis, -1)       # view: writes land in G
    for J in intervals:
        fib, J1 = J
        om = frequency_set(J, trees, m, axis)
        omegas[J] = om
        if not om:
            continue
        w = 1 << (J1.scale + m)
        sl = slice(J1.pos * w, (J1.pos + 1) * w)
        row = Fm[fib]
        acc = np.zeros(1 << m)
        for omega in om:
            acc += project_1d(row, J1, omega)
        Gm[fib, sl] = acc[sl]
    return GoodFunction(G, intervals, omegas, axis)


def verify_replacement(Ps: Iterable[Bitile], F0, F1, F2, G: np.ndarray,
                       B1: np.ndarray | None = None) -> float:
    """``max_P |Lambda_P(F0, F1, F2) - Lambda_P(F0, F1, G)|``.

    With ``B1`` given, the preconditions are checked: ``F1`` vanishes on
    ``B1`` and no bitile box ``I2 x I0`` lies inside ``B1``.
    """
    Ps = list(Ps)
    if B1 is not None:
        if np.any(F1[B1] != 0):
            raise ValueError("F1 must vanish on B1")
        bad = [P for P in Ps if box_inside(B1, P.I2, P.I0)]
        if bad:
            raise ValueError(f"bitile {bad[0]} has its I2 x I0 box inside B1")
    worst = 0.0
    for P in Ps:
        worst = max(worst, abs(eval_lambda_bitile(P, F0, F1, F2) - eval_lambda_bitile(P, F0, F1, G)))
    return worst


def verify_projection_replacement(Ps, F: np.ndarray, G: np.ndarray, i: int,
                                  sys: ProjectionSystem | None = None) -> float:
    """``max |Pi^(i)_P F - Pi^(i)_P G|`` over the grid."""
    Ps = list(Ps)
    if not Ps:
        return 0.0
    m = collection_resolution(Ps, F)
    return float(np.abs(proj_collection(i, Ps, F, sys, m) - proj_collection(i, Ps, G, sys, m)).max())


def box_inside(mask: np.ndarray, A: DyadicInterval, B: DyadicInterval) -> bool:
    m = resolution(mask)
    if max(-A.scale, -B.scale) > m:
        mask = upsample(mask.astype(np.uint8), max(-A.scale, -B.scale)).astype(bool)
        m = resolution(mask)
    wa, wb = 1 << (A.scale + m), 1 << (B.scale + m)
    return bool(mask[A.pos * wa:(A.pos + 1) * wa, B.pos * wb:(B.pos + 1) * wb].all())


def admissible_bitiles(Ps: Iterable[Bitile], B1: np.ndarray) -> set[Bitile]:
    """Bitiles whose ``I2 x I0`` box is not contained in ``B1`` (an up-set)."""
    return {P for P in Ps if not box_inside(B1, P.I2, P.I0)}


def conjugate(p: float) -> float:
    return np.inf if p == 1 else p / (p - 1)


def good_norm_ratio(G: np.ndarray, trees: Iterable[Tree], B2: np.ndarray, p: float) -> dict:
    """``||G||^2`` against ``int_B2 N^(1 - 2/p')`` with ``N`` the tree counting function.

    The same conjugate exponent ``p'`` is used in both places it appears.
    ``G`` vanishes off the support of ``N``, so the integral runs over
    ``B2`` intersected with ``{N > 0}``; this keeps it finite when ``p > 2``
    makes the exponent negative.
    """
    m = resolution(G)
    N, _ = counting_function(trees, m, ps=(), i=2)
    q = conjugate(p)
    expo = 1 - 2 / q
    live = B2 & (N > 0)
    rhs = float((N[live] ** expo).sum()) / 4**m
    lhs = float((G**2).sum()) / 4**m
    return {"norm_sq": lhs, "bound": rhs, "ratio": lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else np.inf),
            "exponent": expo}
