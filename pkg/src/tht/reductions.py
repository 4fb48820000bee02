"""One-dimensional forms that are special cases of the triangular form.

* maximally modulated Haar multipliers (a Carleson-type operator),
* a Walsh model of the uniform bilinear Hilbert transform,
* an endpoint example where Haar multipliers fail to be bounded on L^1.
"""
from __future__ import annotations

from itertools import product
from typing import Callable

import numpy as np

from .forms import EpsilonAssignment, bht_interval, eval_form_integral
from .geometry import all_triples
from .walsh import (DyadicInterval, haar_vector, packet_coefficients, resolution,
                    walsh_vector)
from .projections import project_1d

IntervalCoeffs = Callable[[DyadicInterval], float]


def _intervals(n: int):
    for k in range(0, -n, -1):
        for p in range(1 << -k):
            yield DyadicInterval(k, p)


def haar_multiplier(f: np.ndarray, eps: IntervalCoeffs) -> np.ndarray:
    """``sum_I eps_I |I|^-1 <f, h_I> h_I`` over intervals resolved by ``f``."""
    n = resolution(f)
    out = np.zeros(1 << n)
    for I in _intervals(n):
        e = eps(I)
        if e:
            h = haar_vector(I, n)
            out += e * (f @ h / 2**n) / I.length * h
    return out


def modulate(f: np.ndarray, N: int) -> np.ndarray:
    return walsh_vector(int(N), resolution(f)) * f


def max_mod_haar(f: np.ndarray, eps: IntervalCoeffs, N: np.ndarray) -> np.ndarray:
    """``x -> (M_N(x) H M_N(x) f)(x)`` for a choice function ``N``."""
    n = resolution(f)
    out = np.zeros(1 << n)
    for v in np.unique(N):
        sel = N == v
        out[sel] = modulate(haar_multiplier(modulate(f, v), eps), v)[sel]
    return out


def max_mod_sup(f: np.ndarray, eps: IntervalCoeffs) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise ``sup_N |H M_N f|`` over all grid frequencies, with a maximizing ``N``."""
    n = resolution(f)
    vals = np.stack([np.abs(haar_multiplier(modulate(f, N), eps)) for N in range(1 << n)])
    return vals.max(axis=0), vals.argmax(axis=0)


def build_carleson_triple(f: np.ndarray, g: np.ndarray, N: np.ndarray):
    """Kernels turning the triangular form into ``int (M_N H M_N f) g``."""
    n = resolution(f)
    i = np.arange(1 << n)
    W = np.stack([walsh_vector(int(v), n) for v in N])      # W[x0, x]
    root = np.sqrt(np.abs(g))
    F0 = f[i[:, None] ^ i[None, :]]
    F1 = (np.sign(g) * root)[None, :] * W.T                  # F1[x2, x0]
    F2 = root[:, None] * W[i[:, None], i[:, None] ^ i[None, :]]   # F2[x0, x1]
    return F0, F1, F2


def carleson_pairing(f, g, eps: IntervalCoeffs, N) -> float:
    return float(max_mod_haar(f, eps, N) @ g) / len(f)


def per_I0(eps: IntervalCoeffs) -> EpsilonAssignment:
    return EpsilonAssignment.per_I0(eps)


# --- bilinear Hilbert transform model ---------------------------------------

def build_bht_triple(f: np.ndarray, g: np.ndarray, h: np.ndarray, L: int):
    """``F0 = f(x1 + x2 + 2^-L x2)``, ``F1 = h(2^-L x2 + x0)``, ``F2 = g(x0 + 2^-L x0 + 2^-L x1)``.

    Bits pushed below the grid by ``2^-L`` are invisible to resolution-``n``
    functions, so the kernels are exact on the input grid.
    """
    if L < 1:
        raise ValueError("L must be a positive integer")
    n = resolution(f)
    if resolution(g) != n or resolution(h) != n:
        raise ValueError("f, g, h must share a resolution")
    i = np.arange(1 << n)
    a, b = i[:, None], i[None, :]
    F0 = f[a ^ b ^ (b >> L)]            # rows x1, cols x2
    F1 = h[(a >> L) ^ b]                # rows x2, cols x0
    F2 = g[a ^ (a >> L) ^ (b >> L)]     # rows x0, cols x1
    return F0, F1, F2


def bht_epsilon(eps: IntervalCoeffs, L: int) -> EpsilonAssignment:
    return EpsilonAssignment.per_bht_interval(eps, L)


def eval_bht_form(f, g, h, L: int, eps: IntervalCoeffs) -> float:
    """The triangular form on the substituted kernels."""
    return eval_form_integral(*build_bht_triple(f, g, h, L), bht_epsilon(eps, L))


def _char_coeffs(f: np.ndarray, k: int) -> np.ndarray:
    """``<f, 1_I w_{m 2^-k}>`` indexed ``[I, m]`` for ``m < 2^(n+k)``."""
    return packet_coefficients(f, k) * 2.0 ** (k / 2)


def eval_bht_expanded(f, g, h, L: int, eps: IntervalCoeffs, scales=None) -> float:
    """Sum over scales, intervals and frequency pairs ``(m, n)`` with ``n < 2^L``."""
    nres = resolution(f)
    scales = range(0, -nres, -1) if scales is None else scales
    total = 0.0
    for k in scales:
        Cf, Cg, Ch = (_char_coeffs(u, k) for u in (f, g, h))
        nf = Cf.shape[1]
        for p in range(1 << -k):
            e = eps(DyadicInterval(k, p))
            if not e:
                continue
            s = 0.0
            for m in range(nf):
                a = Cf[p, m ^ 1] if (m ^ 1) < nf else 0.0
                if a == 0:
                    continue
                for r in range(1 << L):
                    j2 = (m << L) ^ r
                    j1 = j2 ^ m ^ 1
                    if j2 < nf and j1 < nf:
                        s += a * Cg[p, j2] * Ch[p, j1]
            total += e * s * 4.0**-k
    return total


def eval_bht_projection_form(f, g, h, L: int, eps: IntervalCoeffs, scales=None) -> float:
    """``int sum eps_I (Pi_{I x (w + 2^-k)} f)(Pi_{I x 2^L w} g)(Pi_{I x (2^L w + w + 2^-k)} h)``."""
    nres = resolution(f)
    scales = range(0, -nres, -1) if scales is None else scales
    total = 0.0
    for k in scales:
        s = -k
        for p in range(1 << s):
            I = DyadicInterval(k, p)
            e = eps(I)
            if not e:
                continue
            acc = 0.0
            for m in range(1 << (nres + k)):
                wf = DyadicInterval(s, m ^ 1)
                wg = DyadicInterval(s + L, m)
                wh = DyadicInterval(s + L, ((m << L) ^ m ^ 1) >> L)
                pf = project_1d(f, I, wf)
                if not pf.any():
                    continue
                acc += float((pf * project_1d(g, I, wg) * project_1d(h, I, wh)).sum())
            total += e * acc / 2**nres
    return total


def _char_integral(mant: int, frac: int, I: DyadicInterval) -> float:
    """``int_I e(c * x) dx`` for ``c = mant 2^-frac``, by exact summation on a fine grid."""
    deg = mant.bit_length() - 1 - frac
    r = max(-I.scale, deg + 2, 1)
    j = np.arange(I.pos << (r + I.scale), (I.pos + 1) << (r + I.scale), dtype=np.int64)
    prod = np.zeros_like(j)
    b = 0
    while mant >> b:
        if (mant >> b) & 1:
            prod ^= j << b
        b += 1
    bit = (prod >> (frac + r - 1)) & 1
    return float((1 - 2 * bit).sum()) / 2**r


def eval_bht_instrumented(f, g, h, L: int, eps: IntervalCoeffs) -> dict:
    """The pre-reduction sum over all ``(m0, m2, m1)``, integrating characters explicitly.

    Returns the total and the contribution of terms outside the predicted
    support ``m0 + m2 + m1 = 0``, ``m0 + 2^-L m2 + 1 in A0``.
    """
    nres = resolution(f)
    total = violating = 0.0
    worst = 0.0
    for k in range(0, -nres, -1):
        Cf, Cg, Ch = (_char_coeffs(u, k) for u in (f, g, h))
        nf = Cf.shape[1]
        s = -k
        for t in all_triples(nres, kmin=k):
            if t.scale != k:
                continue
            I = bht_interval(t, L)
            e = eps(I)
            if not e:
                continue
            for m0, m2, m1 in product(range(nf), repeat=3):
                c = Cf[I.pos, m0] * Cg[I.pos, m2] * Ch[I.pos, m1]
                if c == 0:
                    continue
                c1 = (((m0 ^ 1) << L) ^ m2) << s
                c2 = (((m0 ^ 1) << L) ^ m0 ^ m1) << s
                c0 = (((m2 ^ m1 ^ 1) << L) ^ m2) << s
                w = (_char_integral(c1, L, t.I1) * _char_integral(c2, L, t.I2)
                     * _char_integral(c0, L, t.I0))
                term = e * c * w * 16.0**-k
                total += term
                predicted = (m0 ^ m2 ^ m1) == 0 and (((m0 ^ 1) << L) ^ m2) < (1 << L)
                if not predicted:
                    violating += term
                    worst = max(worst, abs(term))
    return {"total": total, "violating": violating, "violating_max": worst}


# --- endpoint example --------------------------------------------------------

def build_endpoint_triple(f, g, h):
    """``F0 = f(x1 + x2)``, ``F1 = h(x0)``, ``F2 = g(x0)``."""
    n = resolution(f)
    i = np.arange(1 << n)
    F0 = f[i[:, None] ^ i[None, :]]
    F1 = np.broadcast_to(h[None, :], (1 << n, 1 << n)).copy()
    F2 = np.broadcast_to(g[:, None], (1 << n, 1 << n)).copy()
    return F0, F1, F2


def endpoint_identity_residual(f, g, h, eps: IntervalCoeffs) -> float:
    lam = eval_form_integral(*build_endpoint_triple(f, g, h), per_I0(eps))
    rhs = float(f @ haar_multiplier(g * h, eps)) / len(f)
    return abs(lam - rhs)


def kappa(n: int) -> tuple[float, tuple[int, ...]]:
    """``max_eps ||H^eps phi||_1`` for ``phi = 2^n 1_[0, 2^-n)``.

    Only the intervals ``[0, 2^k)`` see ``phi``, each with coefficient 1, and
    the norm is convex in ``eps``, so the max over the ``2^n`` sign patterns
    is the exact sup.
    """
    if n < 1:
        raise ValueError("n must be positive")
    H = np.stack([haar_vector(DyadicInterval(k, 0), n) / 2.0**k for k in range(0, -n, -1)])
    best, arg = -1.0, None
    for signs in product((1, -1), repeat=n):
        v = float(np.abs(np.asarray(signs) @ H).sum()) / 2**n
        if v > best:
            best, arg = v, signs
    return best, arg


def endpoint_demo(ns=range(2, 9), seed: int = 0, n_identity: int = 4) -> dict:
    """Identity check plus the growth of ``kappa(n)``."""
    rng = np.random.default_rng(seed)
    N = 1 << n_identity
    f, g, h = rng.standard_normal((3, N))
    signs = rng.choice((-1.0, 1.0), size=2 * N)
    eps = lambda I: signs[(1 << -I.scale) + I.pos]      # noqa: E731
    kap = {n: kappa(n)[0] for n in ns}
    xs = np.array(list(kap))
    ys = np.array([kap[n] for n in xs])
    slope = float(np.min(ys / xs))
    return {
        "identity_residual": endpoint_identity_residual(f, g, h, eps),
        "kappa": kap,
        "increasing": bool(np.all(np.diff(ys) > 0)),
        "linear_lower_bound": slope,
    }
