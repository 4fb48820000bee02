"""Walsh field arithmetic and Haar/Walsh/wave-packet evaluation.

Elements of the Walsh field are stored as an integer mantissa scaled by
``2**-n_frac``; bit ``e`` of the value (coefficient of ``2**e``) lives in
bit ``e + n_frac`` of the mantissa.  Addition is XOR and multiplication is
carry-less (GF(2) polynomial) multiplication.

Grid functions are plain numpy arrays: a 1D array of length ``2**n`` holds
the cell values on ``[i 2**-n, (i+1) 2**-n)``; a 2D array of shape
``(2**n, 2**n)`` is a function on the unit square, rows indexing the first
argument.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

DEFAULT_INT_BITS = 32


class WindowError(ValueError):
    """Raised when a Walsh number leaves its declared bit window."""


def clmul(a: int, b: int) -> int:
    """Carry-less product of two nonnegative integers."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


@dataclass(frozen=True)
class WalshNumber:
    mantissa: int
    n_frac: int
    n_int: int = DEFAULT_INT_BITS

    def __post_init__(self):
        if self.mantissa < 0 or self.n_frac < 0 or self.n_int < 0:
            raise ValueError("mantissa and window bounds must be nonnegative")
        if self.mantissa >> (self.n_frac + self.n_int + 1):
            raise WindowError(f"{self.mantissa:#x} does not fit window "
                              f"[-{self.n_frac}, {self.n_int}]")

    @classmethod
    def from_float(cls, x: float, n_frac: int, n_int: int = DEFAULT_INT_BITS) -> "WalshNumber":
        m = x * 2**n_frac
        if x < 0 or m != int(m):
            raise WindowError(f"{x} is not a nonnegative multiple of 2**-{n_frac}")
        return cls(int(m), n_frac, n_int)

    def __float__(self) -> float:
        return self.mantissa / 2**self.n_frac

    def bit(self, e: int) -> int:
        """Coefficient of ``2**e``."""
        if e < -self.n_frac:
            return 0
        return (self.mantissa >> (e + self.n_frac)) & 1

    @property
    def degree(self) -> int:
        """Exponent of the leading nonzero coefficient (``-inf`` -> error)."""
        if self.mantissa == 0:
            raise ValueError("zero has no degree")
        return self.mantissa.bit_length() - 1 - self.n_frac

    def __xor__(self, other: "WalshNumber") -> "WalshNumber":
        return wadd(self, other)

    def __mul__(self, other: "WalshNumber") -> "WalshNumber":
        return wmul(self, other)

    def __repr__(self):
        return f"WalshNumber({float(self)!r}, n_frac={self.n_frac}, n_int={self.n_int})"


def _check_window(a: WalshNumber, b: WalshNumber):
    if (a.n_frac, a.n_int) != (b.n_frac, b.n_int):
        raise WindowError(f"window mismatch: ({a.n_frac},{a.n_int}) vs ({b.n_frac},{b.n_int})")


def wadd(a: WalshNumber, b: WalshNumber) -> WalshNumber:
    _check_window(a, b)
    return WalshNumber(a.mantissa ^ b.mantissa, a.n_frac, a.n_int)


def wmul(a: WalshNumber, b: WalshNumber) -> WalshNumber:
    _check_window(a, b)
    prod = clmul(a.mantissa, b.mantissa)
    # the raw product carries 2*n_frac fractional bits
    low = prod & ((1 << a.n_frac) - 1)
    if low:
        raise WindowError("product has bits below the fractional window")
    return WalshNumber(prod >> a.n_frac, a.n_frac, a.n_int)


def character_e(x: WalshNumber) -> int:
    """Periodized ``h_[0,1)``: -1 iff the coefficient of 1/2 is set."""
    return -1 if x.bit(-1) else 1


def walsh(N: WalshNumber, x: WalshNumber) -> int:
    return character_e(wmul(N, x))


class DyadicInterval(NamedTuple):
    """``[pos 2**scale, (pos+1) 2**scale)``."""
    scale: int
    pos: int

    @property
    def left(self) -> float:
        return self.pos * 2.0**self.scale

    @property
    def length(self) -> float:
        return 2.0**self.scale

    @property
    def right(self) -> float:
        return (self.pos + 1) * 2.0**self.scale

    def half(self, j: int) -> "DyadicInterval":
        """``I^1`` is the left half, ``I^-1`` the right half."""
        return DyadicInterval(self.scale - 1, 2 * self.pos + (0 if j == 1 else 1))

    @property
    def parent(self) -> "DyadicInterval":
        return DyadicInterval(self.scale + 1, self.pos >> 1)

    def ancestor(self, scale: int) -> "DyadicInterval":
        if scale < self.scale:
            raise ValueError("ancestor must be at a coarser scale")
        return DyadicInterval(scale, self.pos >> (scale - self.scale))

    def contains(self, other: "DyadicInterval") -> bool:
        return other.scale <= self.scale and (other.pos >> (self.scale - other.scale)) == self.pos

    def contains_point(self, x: float) -> bool:
        return self.left <= x < self.right

    def __repr__(self):
        return f"[{self.left:g},{self.right:g})"


def haar(I: DyadicInterval, x: float) -> float:
    if not I.contains_point(x):
        return 0.0
    return 1.0 if x < I.left + I.length / 2 else -1.0


def wave_packet(I: DyadicInterval, omega: DyadicInterval, x: WalshNumber) -> float:
    if I.scale + omega.scale != 0:
        raise ValueError("wave packets need |I| |omega| = 1")
    if not I.contains_point(float(x)):
        return 0.0
    l = WalshNumber.from_float(omega.left, x.n_frac, x.n_int)
    return I.length**-0.5 * character_e(wmul(l, x))


# --- vectorized evaluation on grids -----------------------------------------

def resolution(a: np.ndarray) -> int:
    size = a.shape[-1]
    n = size.bit_length() - 1
    if size != 1 << n:
        raise ValueError(f"grid length {size} is not a power of two")
    return n


def upsample(a: np.ndarray, m: int) -> np.ndarray:
    """Refine a grid function to resolution ``m`` (along every axis)."""
    n = resolution(a)
    if m < n:
        raise ValueError("cannot refine to a coarser grid")
    r = 1 << (m - n)
    for ax in range(a.ndim):
        a = np.repeat(a, r, axis=ax)
    return a


@lru_cache(maxsize=None)
def _bitrev(m: int) -> np.ndarray:
    i = np.arange(1 << m)
    out = np.zeros_like(i)
    for b in range(m):
        out |= ((i >> b) & 1) << (m - 1 - b)
    out.setflags(write=False)
    return out


def walsh_vector(N: int, m: int) -> np.ndarray:
    """``w_N`` at the left endpoints of the resolution-``m`` grid, integer ``N < 2**m``."""
    if N >> m:
        raise ValueError(f"frequency {N} oscillates inside resolution-{m} cells")
    parity = np.bitwise_count(_bitrev(m) & N) & 1
    return 1.0 - 2.0 * parity


def indicator_vector(I: DyadicInterval, m: int) -> np.ndarray:
    if I.scale < -m:
        raise ValueError("interval finer than the grid")
    v = np.zeros(1 << m)
    w = 1 << (I.scale + m)
    v[I.pos * w:(I.pos + 1) * w] = 1.0
    return v


def haar_vector(I: DyadicInterval, m: int) -> np.ndarray:
    if I.scale <= -m:
        raise ValueError("Haar function not resolved by the grid")
    return indicator_vector(I.half(1), m) - indicator_vector(I.half(-1), m)


def packet_vector(I: DyadicInterval, freq: int, m: int) -> np.ndarray:
    """``|I|^-1/2 1_I e(freq * x)`` on the resolution-``m`` grid."""
    return I.length**-0.5 * indicator_vector(I, m) * walsh_vector(freq, m)


@lru_cache(maxsize=None)
def packet_basis(k: int, m: int) -> np.ndarray:
    """All wave packets at time scale ``k`` resolved by the grid.

    Row ``J * 2**(m+k) + f`` is the packet on ``J = [J 2**k, (J+1) 2**k)``
    with frequency ``f 2**-k``.  The rows form an orthonormal basis of
    resolution-``m`` functions.
    """
    nj, nf = 1 << -k, 1 << (m + k)
    W = np.empty((nj * nf, 1 << m))
    for J in range(nj):
        for f in range(nf):
            W[J * nf + f] = packet_vector(DyadicInterval(k, J), f << -k, m)
    W.setflags(write=False)
    return W


def packet_coefficients(F: np.ndarray, k: int, axis: int = -1) -> np.ndarray:
    """Inner products with all scale-``k`` packets along ``axis``.

    Returns an array where ``axis`` is replaced by two axes
    ``(interval position, frequency index)``.
    """
    ax = axis % F.ndim
    F = np.moveaxis(F, ax, -1)
    m = resolution(F)
    C = F @ packet_basis(k, m).T / 2**m
    C = C.reshape(F.shape[:-1] + (1 << -k, 1 << (m + k)))
    return np.moveaxis(C, (-2, -1), (ax, ax + 1))


def integral(F: np.ndarray) -> float:
    return float(F.sum()) / 2 ** (resolution(F) * F.ndim)


def inner(F: np.ndarray, G: np.ndarray) -> float:
    m = max(resolution(F), resolution(G))
    F, G = upsample(F, m), upsample(G, m)
    return float((F * G).sum()) / 2 ** (m * F.ndim)


def l2_norm(F: np.ndarray) -> float:
    return inner(F, F) ** 0.5
