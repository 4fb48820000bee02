"""Interval triples, tiles, bitiles and convex bitile collections.

A box ``I0 x I2 x omega`` lives in the phase space of the pair of time
variables ``(x0, x2)`` and the frequency ``xi1``; its third time interval is
``I1 = I0 (+) I2``.  Tiles have ``|I0| |omega| = 1``, bitiles
``|I0| |omega| = 2``.  At resolution ``n`` the time scales run over
``-n..0`` and the frequency universe is ``[0, 2**(n+1))``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, NamedTuple

import numpy as np

from .walsh import DyadicInterval

UNIT = DyadicInterval(0, 0)


class NotConvexError(ValueError):
    pass


class Triple(NamedTuple):
    I0: DyadicInterval
    I1: DyadicInterval
    I2: DyadicInterval

    @property
    def scale(self) -> int:
        return self.I0.scale

    def contained_in(self, other: "Triple") -> bool:
        return all(J.contains(I) for I, J in zip(self, other))


def make_triple(k: int, p0: int, p2: int) -> Triple:
    return Triple(DyadicInterval(k, p0), DyadicInterval(k, p0 ^ p2), DyadicInterval(k, p2))


def enum_triples(k: int, domain: DyadicInterval = UNIT) -> list[Triple]:
    """All triples at scale ``k`` with every interval inside ``domain``."""
    if k > domain.scale:
        return []
    lo = domain.pos << (domain.scale - k)
    hi = lo + (1 << (domain.scale - k))
    out = []
    for p0, p2 in product(range(lo, hi), repeat=2):
        p1 = p0 ^ p2
        if lo <= p1 < hi:
            out.append(make_triple(k, p0, p2))
    return out


def all_triples(n: int, kmin: int | None = None) -> list[Triple]:
    """Scale-major enumeration of triples down to scale ``kmin`` (default ``-n``)."""
    kmin = -n if kmin is None else kmin
    return [t for k in range(0, kmin - 1, -1) for t in enum_triples(k)]


@dataclass(frozen=True, order=True)
class _Box:
    I0: DyadicInterval
    I2: DyadicInterval
    omega: DyadicInterval

    @property
    def scale(self) -> int:
        return self.I0.scale

    @property
    def I1(self) -> DyadicInterval:
        return DyadicInterval(self.I0.scale, self.I0.pos ^ self.I2.pos)

    @property
    def triple(self) -> Triple:
        return Triple(self.I0, self.I1, self.I2)

    @property
    def area(self) -> float:
        """``|I_vec|``, the measure of the space square ``I0 x I2``."""
        return 4.0**self.scale

    def interval(self, i: int) -> DyadicInterval:
        return (self.I0, self.I1, self.I2)[i % 3]

    def sort_key(self):
        return (-self.scale, self.I0.pos, self.I2.pos, self.omega.pos)


@dataclass(frozen=True, order=True)
class Tile(_Box):
    def __post_init__(self):
        if not (self.I0.scale == self.I2.scale == -self.omega.scale):
            raise ValueError(f"not a tile: {self}")


@dataclass(frozen=True, order=True)
class Bitile(_Box):
    def __post_init__(self):
        if not (self.I0.scale == self.I2.scale == 1 - self.omega.scale):
            raise ValueError(f"not a bitile: {self}")

    def tile(self, j: int) -> Tile:
        """``P^j``: the tile over the frequency half ``omega^j``."""
        return Tile(self.I0, self.I2, self.omega.half(j))

    def frequency_split(self) -> tuple[Tile, Tile]:
        return self.tile(1), self.tile(-1)

    def time_split(self) -> tuple[Tile, ...]:
        """The four tiles over the children of the space square."""
        return tuple(Tile(self.I0.half(a), self.I2.half(b), self.omega)
                     for a in (1, -1) for b in (1, -1))

    def parent_with(self, j: int) -> "Bitile":
        """Bitile over the parent square with frequency ``omega^j``."""
        return Bitile(self.I0.parent, self.I2.parent, self.omega.half(j))


def bitile(k: int, p0: int, p2: int, w: int) -> Bitile:
    return Bitile(DyadicInterval(k, p0), DyadicInterval(k, p2), DyadicInterval(1 - k, w))


def tile(k: int, p0: int, p2: int, w: int) -> Tile:
    return Tile(DyadicInterval(k, p0), DyadicInterval(k, p2), DyadicInterval(-k, w))


def enum_bitiles(n: int) -> list[Bitile]:
    out = []
    for k in range(0, -n - 1, -1):
        nfreq = 1 << (n + k)
        for p0, p2 in product(range(1 << -k), repeat=2):
            for w in range(nfreq):
                out.append(bitile(k, p0, p2, w))
    return out


def leq(P: _Box, Q: _Box) -> bool:
    """``P <= Q``: smaller time intervals, larger frequency interval."""
    return (Q.I0.contains(P.I0) and Q.I2.contains(P.I2)
            and P.omega.contains(Q.omega))


def between(P: Bitile, Q: Bitile) -> list[Bitile]:
    """All bitiles ``R`` with ``P <= R <= Q`` (empty unless ``P <= Q``)."""
    if not leq(P, Q):
        return []
    out = []
    for k in range(P.scale, Q.scale + 1):
        out.append(Bitile(P.I0.ancestor(k), P.I2.ancestor(k), Q.omega.ancestor(1 - k)))
    return out


def is_convex(Ps: Iterable[Bitile]) -> bool:
    Ps = set(Ps)
    for P in Ps:
        for Q in Ps:
            if Q.scale > P.scale and leq(P, Q):
                if any(R not in Ps for R in between(P, Q)):
                    return False
    return True


def down_set(top: Bitile, n: int, within: Iterable[Bitile] | None = None) -> set[Bitile]:
    """Bitiles ``P <= top`` in the resolution-``n`` universe (or in ``within``)."""
    if within is not None:
        return {P for P in within if leq(P, top)}
    out = set()
    for k in range(top.scale, -n - 1, -1):
        d = top.scale - k
        w = top.omega.ancestor(1 - k).pos
        for a, b in product(range(1 << d), repeat=2):
            out.add(Bitile(DyadicInterval(k, (top.I0.pos << d) + a),
                           DyadicInterval(k, (top.I2.pos << d) + b),
                           DyadicInterval(1 - k, w)))
    return out


def up_set(bottom: Bitile, within: Iterable[Bitile]) -> set[Bitile]:
    return {P for P in within if leq(bottom, P)}


def disjoint_tile_decomposition(Ps: Iterable[Bitile], split: str = "frequency",
                                check: bool = True) -> list[Tile]:
    """Disjoint tiles whose union is the union of a convex collection.

    The half ``P^j`` is already covered exactly when the bitile over the
    parent square with frequency ``omega^j`` belongs to the collection;
    otherwise it meets no other member.  With ``split="time"`` every bitile
    that contributes both halves is replaced by its four time-split tiles,
    which gives a second decomposition of the same set.
    """
    Ps = set(Ps)
    if check and not is_convex(Ps):
        raise NotConvexError("tile decomposition needs a convex collection")
    out = []
    for P in sorted(Ps, key=Bitile.sort_key):
        keep = [j for j in (1, -1) if P.scale == 0 or P.parent_with(j) not in Ps]
        if split == "time" and len(keep) == 2:
            out.extend(P.time_split())
        else:
            out.extend(P.tile(j) for j in keep)
    return out


def phase_space_mask(boxes: Iterable[_Box], n: int) -> np.ndarray:
    """Occupancy counts on cells ``2**-(n+1) x 2**-(n+1) x 1`` of the phase space."""
    m = n + 1
    counts = np.zeros((1 << m, 1 << m, 1 << (n + 1)), dtype=np.int64)
    for B in boxes:
        s0 = 1 << (B.scale + m)
        f = 1 << B.omega.scale
        counts[B.I0.pos * s0:(B.I0.pos + 1) * s0,
               B.I2.pos * s0:(B.I2.pos + 1) * s0,
               B.omega.pos * f:(B.omega.pos + 1) * f] += 1
    return counts
