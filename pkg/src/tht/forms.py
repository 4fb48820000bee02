"""The dyadic triangular Hilbert transform in trace, integral and bitile form.

Functions are stored with rows indexing the first argument:
``F0[x1, x2]``, ``F1[x2, x0]``, ``F2[x0, x1]``.  A kernel ``F`` acts as
``(F phi)(x) = int F(x, y) phi(y) dy``, so on the resolution-``n`` grid its
matrix is ``F / 2**n``.

Triples at scale ``-n`` do not enter the trace and integral evaluators:
Haar functions of cell length integrate to zero against cell-constant
functions.  The bitile evaluator refines the grid instead and gets the zero
honestly.
"""
from __future__ import annotations

from typing import Callable, Iterable

import numpy as np

from .geometry import Bitile, Triple, all_triples, enum_triples
from .walsh import DyadicInterval, haar_vector, packet_vector, resolution, upsample


class EpsilonAssignment:
    """Coefficients ``eps[I0, I1, I2]`` with ``|eps| <= 1``.

    ``fn`` maps a :class:`Triple` to a scalar; values are cached so that
    randomized assignments are evaluated once per triple.
    """

    def __init__(self, fn: Callable[[Triple], float], name: str = "custom"):
        self._fn = fn
        self._cache: dict[Triple, float] = {}
        self.name = name

    def __call__(self, t: Triple) -> float:
        try:
            return self._cache[t]
        except KeyError:
            pass
        v = float(self._fn(t))
        if abs(v) > 1:
            raise ValueError(f"|eps| = {abs(v)} > 1 at {t}")
        self._cache[t] = v
        return v

    def __repr__(self):
        return f"EpsilonAssignment({self.name})"

    @classmethod
    def constant(cls, c: float) -> "EpsilonAssignment":
        return cls(lambda t: c, f"constant({c})")

    @classmethod
    def random_signs(cls, seed: int) -> "EpsilonAssignment":
        return cls(lambda t: _hashed_rng(seed, t).choice((-1.0, 1.0)), f"signs({seed})")

    @classmethod
    def random_uniform(cls, seed: int) -> "EpsilonAssignment":
        return cls(lambda t: _hashed_rng(seed, t).uniform(-1, 1), f"uniform({seed})")

    @classmethod
    def per_interval(cls, values: Callable[[DyadicInterval], float],
                     key: Callable[[Triple], DyadicInterval], name: str = "per-interval"):
        return cls(lambda t: values(key(t)), name)

    @classmethod
    def per_I0(cls, values: Callable[[DyadicInterval], float]) -> "EpsilonAssignment":
        return cls.per_interval(values, lambda t: t.I0, "per-I0")

    @classmethod
    def per_bht_interval(cls, values: Callable[[DyadicInterval], float], L: int):
        """Depends only on ``I0 (+) 2**-L I2``."""
        return cls.per_interval(values, lambda t: bht_interval(t, L), f"per-bht(L={L})")


def bht_interval(t: Triple, L: int) -> DyadicInterval:
    return DyadicInterval(t.I0.scale, t.I0.pos ^ (t.I2.pos >> L))


def _hashed_rng(seed: int, t) -> np.random.Generator:
    parts = t if isinstance(t, Triple) else (t,)
    return np.random.default_rng([seed] + [v for I in parts for v in (I.scale + 1024, I.pos)])


def random_interval_values(seed: int, kind: str = "signs") -> Callable[[DyadicInterval], float]:
    """Deterministic per-interval coefficients, for the structured modes."""
    cache: dict[DyadicInterval, float] = {}

    def fn(I: DyadicInterval) -> float:
        if I not in cache:
            rng = _hashed_rng(seed, I)
            cache[I] = rng.choice((-1.0, 1.0)) if kind == "signs" else rng.uniform(-1, 1)
        return cache[I]
    return fn


def _common_resolution(*Fs: np.ndarray) -> int:
    ns = {resolution(F) for F in Fs}
    if len(ns) != 1 or any(F.ndim != 2 or F.shape[0] != F.shape[1] for F in Fs):
        raise ValueError(f"resolution mismatch: {[F.shape for F in Fs]}")
    return ns.pop()


def _active_triples(n: int) -> list[Triple]:
    return all_triples(n, kmin=-n + 1) if n > 0 else []


def eval_form_trace(F0, F1, F2, eps: EpsilonAssignment, i: int = 0) -> float:
    """``sum eps |I_i|^-1 tr(h_{I_i} F_{i-1} h_{I_{i+1}} F_i h_{I_{i-1}} F_{i+1})``."""
    n = _common_resolution(F0, F1, F2)
    A = [F / 2**n for F in (F0, F1, F2)]
    total = 0.0
    for t in _active_triples(n):
        e = eps(t)
        if e == 0:
            continue
        h = [haar_vector(I, n) for I in t]
        # h_{I_i} A_{i-1} h_{I_{i+1}} A_i h_{I_{i-1}} A_{i+1}
        X = h[i % 3][:, None] * A[(i - 1) % 3] * h[(i + 1) % 3][None, :]
        Y = A[i % 3] * h[(i - 1) % 3][None, :]
        total += e * float(np.sum((X @ Y) * A[(i + 1) % 3].T)) / t.I0.length
    return total


def eval_form_integral(F0, F1, F2, eps: EpsilonAssignment) -> float:
    """Direct triple sum of ``h_I1(x) F0(x,y) h_I2(y) F1(y,z) h_I0(z) F2(z,x)``."""
    n = _common_resolution(F0, F1, F2)
    T = F0[:, :, None] * F1[None, :, :] * F2.T[:, None, :]   # indices x, y, z
    total = 0.0
    for t in _active_triples(n):
        e = eps(t)
        if e == 0:
            continue
        w = 1 << (t.scale + n)
        sx, sy, sz = (slice(I.pos * w, (I.pos + 1) * w) for I in (t.I1, t.I2, t.I0))
        block = T[sx, sy, sz]
        s = np.ones(w)
        s[w // 2:] = -1
        total += e * float(np.einsum("xyz,x,y,z->", block, s, s, s)) / t.I0.length
    return total / 8**n


def eval_lambda_bitile(P: Bitile, F0, F1, F2, freq: int | None = None) -> float:
    """Single-bitile form ``Lambda_P`` with packets at frequency ``freq`` in ``omega``."""
    n = _common_resolution(F0, F1, F2)
    l = P.omega.pos << P.omega.scale if freq is None else freq
    if not (P.omega.left <= l < P.omega.right):
        raise ValueError(f"frequency {l} not in {P.omega}")
    m = max(n, 1 - P.scale, l.bit_length())
    G0, G1, G2 = (upsample(F, m) for F in (F0, F1, F2))
    h2, h0 = haar_vector(P.I2, m), haar_vector(P.I0, m)
    inner = h2[:, None] * G1 * h0[None, :]
    total = 0.0
    for j in (1, -1):
        w = packet_vector(P.I1.half(j), l, m)
        a = w @ G0 / 2**m          # <F0(., x2), w>
        b = G2 @ w / 2**m          # <F2(x0, .), w>
        total += j * float(a @ inner @ b) / 4**m
    return total / P.I1.length


def _lambda_scale_block(k: int, n: int, G0, G1, G2, m: int, t: Triple) -> np.ndarray:
    """``Lambda_P`` for every bitile over triple ``t`` (all frequencies)."""
    nfreq = 1 << (n + k)
    h2, h0 = haar_vector(t.I2, m), haar_vector(t.I0, m)
    inner = h2[:, None] * G1 * h0[None, :]
    out = np.zeros(nfreq)
    for j in (1, -1):
        J = t.I1.half(j)
        W = np.stack([packet_vector(J, w << (1 - k), m) for w in range(nfreq)])
        A = W @ G0 / 2**m
        B = G2 @ W.T / 2**m
        out += j * np.einsum("wy,yz,zw->w", A, inner, B) / 4**m
    return out / t.I1.length


def eval_form_bitile_sum(F0, F1, F2, eps: EpsilonAssignment) -> float:
    n = _common_resolution(F0, F1, F2)
    m = n + 1
    G = [upsample(F, m) for F in (F0, F1, F2)]
    total = 0.0
    for k in range(0, -n - 1, -1):
        for t in enum_triples(k):
            e = eps(t)
            if e:
                total += e * float(_lambda_scale_block(k, n, *G, m, t).sum())
    return total


def eval_form_over_collection(Ps: Iterable[Bitile], F0, F1, F2, eps: EpsilonAssignment) -> float:
    """``Lambda^eps_P`` restricted to a bitile collection (fixed summation order)."""
    total = 0.0
    for P in sorted(Ps, key=Bitile.sort_key):
        e = eps(P.triple)
        if e:
            total += e * eval_lambda_bitile(P, F0, F1, F2)
    return total


def triple_terms(F0, F1, F2) -> dict[Triple, float]:
    """Per-triple contributions with unit coefficients (trace form, ``i = 1``)."""
    n = _common_resolution(F0, F1, F2)
    A = [F / 2**n for F in (F0, F1, F2)]
    out = {}
    for t in _active_triples(n):
        h0, h1, h2 = (haar_vector(I, n) for I in t)
        X = h1[:, None] * A[0] * h2[None, :]
        Y = A[1] * h0[None, :]
        out[t] = float(np.sum((X @ Y) * A[2].T)) / t.I0.length
    return out


def kernel_sum(n: int, s: float) -> float:
    """``sum_{k=-n+1}^0 2**-k 1_[0,2**k)(s) r_k(s)`` by direct summation."""
    total = 0.0
    for k in range(-n + 1, 1):
        if 0 <= s < 2.0**k:
            # r_k(s): sign of the 2**(k-1) binary digit of s
            digit = int(s / 2.0**(k - 1)) & 1
            total += 2.0**-k * (-1 if digit else 1)
    return total


def kernel_closed_form(n: int, s: float) -> float:
    return 2.0**n * (0 <= s < 2.0**-n) - 1.0


def telescoped_form(F0, F1, F2) -> float:
    """``2**n int_{x+y+z in [0,2**-n)} F0 F1 F2 - int F0 F1 F2`` (carry-less sum)."""
    n = _common_resolution(F0, F1, F2)
    N = 1 << n
    T = F0[:, :, None] * F1[None, :, :] * F2.T[:, None, :]
    x = np.arange(N)
    diag = T[x[:, None], x[None, :], x[:, None] ^ x[None, :]].sum()
    return float(2.0**n * diag - T.sum()) / 8**n
