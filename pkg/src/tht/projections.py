"""Time-frequency projections for tiles, bitiles and convex collections.

``Pi^(2)`` and ``Pi^(0)`` are wave-packet projections in the ``x1`` variable,
localized in the other variable.  ``Pi^(1)`` depends on how ``F0`` is
structured:

* diagonal: ``F0(x1, x2) = f(x1 (+) a * x2)``, so an ``x1`` frequency ``omega``
  of ``F0`` comes with the ``x2`` frequency ``a * omega``; ``Pi^(1)`` is the 1D
  projection onto ``I2 x a*omega`` in ``x2``, localized to ``I0`` in ``x0``;
* fiberwise: ``F0(x1, x2) = f(x2) e(N(x2) * x1)``; ``Pi^(1)`` multiplies by
  ``1_I0(x0) 1_I2(x2) 1_omega(N(x2))``.

All projections are computed on a grid fine enough to resolve the tile, so
results are exact, not approximations of a continuum operator.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .forms import eval_lambda_bitile
from .geometry import Bitile, Tile, _Box, disjoint_tile_decomposition
from .walsh import (DyadicInterval, WalshNumber, clmul, indicator_vector,
                    packet_coefficients, packet_vector, resolution, upsample,
                    walsh_vector)


class InvariantViolation(RuntimeError):
    """A projection system failed one of its defining properties."""


class StructureError(ValueError):
    """``F0`` does not have the structure the projection system assumes."""


@dataclass(frozen=True)
class ProjectionSystem:
    case: str
    a: WalshNumber | None = None
    N: np.ndarray | None = field(default=None, compare=False)

    @classmethod
    def diagonal(cls, a: float | WalshNumber, n_frac: int = 16) -> "ProjectionSystem":
        if not isinstance(a, WalshNumber):
            a = WalshNumber.from_float(a, n_frac)
        if a.mantissa == 0 or a.degree < 0:
            raise ValueError(f"need |a| >= 1 (a outside A0), got {float(a)}")
        return cls("diagonal", a=a)

    @classmethod
    def fiberwise(cls, N) -> "ProjectionSystem":
        N = np.asarray(N)
        if N.ndim != 1 or not np.issubdtype(N.dtype, np.integer):
            raise ValueError("N must be a 1D integer grid function")
        if N.min() < 0 or N.max() >= len(N):
            raise ValueError("N must take values in [0, 2**n)")
        N = N.copy()
        N.setflags(write=False)
        return cls("fiberwise", N=N)

    def __post_init__(self):
        if self.case not in ("diagonal", "fiberwise"):
            raise ValueError(f"unknown case {self.case!r}")

    @property
    def experimental(self) -> bool:
        return self.case == "diagonal" and float(self.a) not in (1.0, 1.5, 2.0, 3.0)

    def freq_image(self, omega: DyadicInterval) -> DyadicInterval:
        """``a * omega``: again a dyadic interval, ``2**deg(a)`` times longer."""
        a, d = self.a, self.a.degree
        s = omega.scale
        if s < 0:
            raise ValueError("frequency intervals must have integer endpoints")
        l = omega.pos << s
        prod = clmul(a.mantissa, l)          # units of 2**-n_frac
        shift = a.n_frac + s + d
        return DyadicInterval(s + d, prod >> shift)

    def N_at(self, m: int) -> np.ndarray:
        return upsample(self.N, m)

    def check_structure(self, F0: np.ndarray, tol: float = 1e-12) -> None:
        if self.case == "diagonal":
            idx = diagonal_index(self.a, resolution(F0))
            f = np.zeros(F0.shape[0])
            f[idx.ravel()] = F0.ravel()
            ok = np.allclose(f[idx], F0, atol=tol, rtol=0)
        else:
            if len(self.N) != F0.shape[0]:
                raise StructureError("N and F0 have different resolutions")
            n = resolution(F0)
            W = np.stack([walsh_vector(int(N), n) for N in self.N], axis=1)
            G = F0 * W          # should be constant along x1
            ok = np.allclose(G, G[:1], atol=tol, rtol=0)
        if not ok:
            raise StructureError(f"F0 does not match the {self.case} structure")


def diagonal_index(a: WalshNumber, n: int) -> np.ndarray:
    """Cell index of ``x1 (+) a * x2`` in the resolution-``(n - deg a)`` grid of ``A_deg a``."""
    i = np.arange(1 << n)
    prod = np.zeros_like(i)
    A, b = a.mantissa, 0
    while A >> b:
        if (A >> b) & 1:
            prod ^= i << b
        b += 1
    val = (i[:, None] << a.n_frac) ^ prod[None, :]    # rows x1, columns x2
    return val >> (a.n_frac + a.degree)


def diagonal_function(f: np.ndarray, a: float | WalshNumber, n_frac: int = 16) -> np.ndarray:
    """``F0[x1, x2] = f(x1 (+) a * x2)`` with ``f`` given by its ``2**n`` cell values on ``A_deg a``."""
    if not isinstance(a, WalshNumber):
        a = WalshNumber.from_float(a, n_frac)
    f = np.asarray(f, dtype=float)
    return f[diagonal_index(a, resolution(f))]


def fiberwise_function(f: np.ndarray, N: np.ndarray) -> np.ndarray:
    """``F0[x1, x2] = f(x2) e(N(x2) * x1)``."""
    n = resolution(f)
    return np.stack([f[j] * walsh_vector(int(N[j]), n) for j in range(len(f))], axis=1)


@lru_cache(maxsize=4096)
def _projector(I: DyadicInterval, omega: DyadicInterval, m: int) -> np.ndarray:
    if -I.scale > m:
        raise ValueError("time interval finer than the grid")
    if I.scale + omega.scale < 0:
        raise ValueError("need |I| |omega| >= 1")
    step = 1 << -I.scale
    lo, hi = omega.left, min(omega.right, 1 << m)
    freqs = range(int(lo), int(hi), step) if lo < hi else range(0)
    Q = np.zeros((1 << m, 1 << m))
    for f in freqs:
        w = packet_vector(I, f, m)
        Q += np.outer(w, w)
    Q /= 2**m
    Q.setflags(write=False)
    return Q


def project_1d(F: np.ndarray, I: DyadicInterval, omega: DyadicInterval, axis: int = -1) -> np.ndarray:
    """Sum of the packet projections over ``I x omega'`` with ``omega' in omega``, ``|I||omega'| = 1``.

    Frequencies at or above ``2**m`` are orthogonal to the grid and drop out.
    """
    Q = _projector(I, omega, resolution(F))
    F = np.moveaxis(F, axis, -1)
    return np.moveaxis(F @ Q, -1, axis)


def _mask(I: DyadicInterval, m: int) -> np.ndarray:
    return indicator_vector(I, m)


def proj_tile(i: int, p: Tile, F: np.ndarray, sys: ProjectionSystem, m: int | None = None) -> np.ndarray:
    """``Pi^(i)_p F`` on the resolution ``max(res F, -scale, m)`` grid."""
    m = max(resolution(F), -p.scale, m or 0)
    F = upsample(F, m)
    i %= 3
    if i == 2:      # F2[x0, x1]
        return _mask(p.I0, m)[:, None] * project_1d(F, p.I1, p.omega, axis=1)
    if i == 0:      # F0[x1, x2]
        return project_1d(F, p.I1, p.omega, axis=0) * _mask(p.I2, m)[None, :]
    # F1[x2, x0]
    if sys.case == "diagonal":
        return project_1d(F, p.I2, sys.freq_image(p.omega), axis=0) * _mask(p.I0, m)[None, :]
    N = sys.N_at(m)
    keep = _mask(p.I2, m) * ((N >= p.omega.left) & (N < p.omega.right))
    return keep[:, None] * F * _mask(p.I0, m)[None, :]


def proj_bitile(i: int, P: Bitile, F: np.ndarray, sys: ProjectionSystem,
                m: int | None = None, tol: float = 1e-9, check: bool = True) -> np.ndarray:
    """``Pi^(i)_P F`` via the frequency split, cross-checked against the time split."""
    m = max(resolution(F), 1 - P.scale, m or 0)
    out = sum(proj_tile(i, p, F, sys, m) for p in P.frequency_split())
    if check:
        alt = sum(proj_tile(i, p, F, sys, m) for p in P.time_split())
        scale = max(1.0, float(np.abs(out).max()))
        if np.abs(out - alt).max() > tol * scale:
            raise InvariantViolation(f"frequency and time splits of {P} disagree (i={i})")
    return out


def collection_resolution(Ps, F: np.ndarray) -> int:
    return max([resolution(F)] + [1 - P.scale for P in Ps])


def proj_collection(i: int, Ps, F: np.ndarray, sys: ProjectionSystem,
                    m: int | None = None, split: str = "frequency",
                    cross_check: bool = False, tol: float = 1e-9) -> np.ndarray:
    """``Pi^(i)_P F`` for a convex collection, summed over a disjoint tile decomposition."""
    Ps = list(Ps)
    m = max(collection_resolution(Ps, F), m or 0)
    out = np.zeros((1 << m, 1 << m))
    for p in disjoint_tile_decomposition(Ps, split):
        out += proj_tile(i, p, F, sys, m)
    if cross_check:
        other = "time" if split == "frequency" else "frequency"
        alt = proj_collection(i, Ps, F, sys, m, split=other)
        if np.abs(out - alt).max() > tol * max(1.0, float(np.abs(out).max())):
            raise InvariantViolation("tile decompositions give different projections")
    return out


def check_adapted(P: Bitile, Ps, F0, F1, F2, sys: ProjectionSystem) -> float:
    """``|Lambda_P(F) - Lambda_P(Pi_P F)|`` for a convex collection ``Ps`` containing ``P``."""
    Ps = set(Ps)
    if P not in Ps:
        raise ValueError("P must belong to the collection")
    sys.check_structure(F0)
    m = collection_resolution(Ps, F0)
    G = [proj_collection(i, Ps, F, sys, m) for i, F in enumerate((F0, F1, F2))]
    lhs = eval_lambda_bitile(P, *(upsample(F, m) for F in (F0, F1, F2)))
    return abs(lhs - eval_lambda_bitile(P, *G))


class TileEnergies:
    """``e(p) = ||Pi^(i)_p F||^2`` for every tile resolved at resolution ``m``.

    Energies are tabulated per scale from packet coefficients; by orthogonality
    the energy of a convex collection is the sum over any tile decomposition.
    """

    def __init__(self, i: int, F: np.ndarray, sys: ProjectionSystem | None, m: int):
        self.i, self.sys, self.m = i % 3, sys, m
        self.F = upsample(F, m)
        if self.i == 1 and sys is None:
            raise ValueError("Pi^(1) needs a projection system")
        self._tables: dict[int, np.ndarray] = {}
        if self.i == 1 and sys.case == "fiberwise":
            self._N = sys.N_at(m)

    def _table(self, k: int) -> np.ndarray:
        """Squared packet coefficients localized in the other variable.

        Index order ``[packet interval, frequency, localizing interval]``.
        """
        if k not in self._tables:
            m, F = self.m, self.F
            if self.i == 2:
                F = F.T                                  # make x1 the row axis
            C = packet_coefficients(F, k, axis=0) ** 2   # (2**-k, 2**(m+k), 2**m)
            C = C.reshape(C.shape[:2] + (1 << -k, 1 << (m + k))).sum(-1) / 2**m
            self._tables[k] = C
        return self._tables[k]

    def __call__(self, p: Tile) -> float:
        k, m = p.scale, self.m
        if -k > m:
            raise ValueError("tile not resolved at this resolution")
        if self.i in (0, 2):
            f = p.omega.pos
            if f >= 1 << (m + k):
                return 0.0
            other = p.I2 if self.i == 0 else p.I0
            return float(self._table(k)[p.I1.pos, f, other.pos])
        if self.sys.case == "diagonal":
            img = self.sys.freq_image(p.omega)
            lo = img.pos << (img.scale + k)
            hi = min(lo + (1 << (img.scale + k)), 1 << (m + k))
            return float(self._table(k)[p.I2.pos, lo:hi, p.I0.pos].sum()) if lo < hi else 0.0
        N = self._N
        rows = slice(p.I2.pos << (m + k), (p.I2.pos + 1) << (m + k))
        cols = slice(p.I0.pos << (m + k), (p.I0.pos + 1) << (m + k))
        keep = (N[rows] >= p.omega.left) & (N[rows] < p.omega.right)
        return float((self.F[rows, cols][keep] ** 2).sum()) / 4**m

    def collection(self, Ps) -> float:
        return sum(self(p) for p in disjoint_tile_decomposition(Ps, check=False))
