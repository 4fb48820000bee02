import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from tht.geometry import (NotConvexError, Triple, all_triples, between, bitile,
                          disjoint_tile_decomposition, down_set, enum_bitiles, enum_triples,
                          is_convex, leq, phase_space_mask, up_set)
from tht.walsh import DyadicInterval


def triples_oracle(k):
    out = set()
    for p0, p1, p2 in product(range(1 << -k), repeat=3):
        # 0 in I0 + I1 + I2 for carry-less sums of intervals of length 2^k
        if p0 ^ p1 ^ p2 == 0:
            out.add(Triple(*(DyadicInterval(k, p) for p in (p0, p1, p2))))
    return out


@pytest.mark.parametrize("k,count", [(0, 1), (-1, 4), (-2, 16), (-3, 64)])
def test_enum_triples(k, count):
    got = enum_triples(k)
    assert len(got) == count
    assert set(got) == triples_oracle(k)


def test_triple_condition_on_endpoints():
    for t in all_triples(3):
        k = t.scale
        l = [int(I.left * 2**3) for I in t]          # left endpoints in units of 2^-3
        assert (l[0] ^ l[1] ^ l[2]) < (1 << (k + 3))


def test_enum_bitiles_counts():
    bits = enum_bitiles(2)
    by_scale = {k: sum(P.scale == k for P in bits) for k in (0, -1, -2)}
    assert by_scale == {0: 4, -1: 8, -2: 16}
    assert {P.omega for P in bits if P.scale == 0} == {DyadicInterval(1, w) for w in range(4)}
    for n in range(5):
        for k in range(0, -n - 1, -1):
            assert sum(P.scale == k for P in enum_bitiles(n)) == 2 ** (n - k)
    assert len(enum_bitiles(0)) == 1


@pytest.mark.parametrize("n", [1, 2, 3])
def test_each_scale_tiles_phase_space_once(n):
    for k in range(0, -n - 1, -1):
        mask = phase_space_mask([P for P in enum_bitiles(n) if P.scale == k], n)
        assert (mask == 1).all()


def test_order_examples():
    small = bitile(-1, 0, 0, 1)              # frequency [4, 8) misses [0, 2)
    P = bitile(-1, 0, 0, 0)                  # frequency [0, 4)
    Q = bitile(0, 0, 0, 0)                   # frequency [0, 2)
    assert leq(P, P)
    assert leq(P, Q)
    assert not leq(Q, P)
    assert not leq(small, Q)
    A, B = bitile(-1, 0, 0, 0), bitile(-1, 1, 0, 0)
    assert not leq(A, B) and not leq(B, A)


bitiles3 = enum_bitiles(3)


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(bitiles3), st.sampled_from(bitiles3), st.sampled_from(bitiles3))
def test_partial_order(P, Q, R):
    assert leq(P, P)
    if leq(P, Q) and leq(Q, P):
        assert P == Q
    if leq(P, Q) and leq(Q, R):
        assert leq(P, R)


def convex_oracle(Ps, universe):
    Ps = set(Ps)
    for P, R in product(Ps, Ps):
        if leq(P, R):
            for Q in universe:
                if leq(P, Q) and leq(Q, R) and Q not in Ps:
                    return False
    return True


def test_is_convex_examples():
    assert is_convex([])
    P = bitile(-3, 0, 0, 0)
    assert is_convex([P])
    grand = bitile(-1, 0, 0, 0)
    assert leq(P, grand)
    assert not is_convex([P, grand])
    assert is_convex([P, grand, bitile(-2, 0, 0, 0)])
    for top in random.Random(0).sample(bitiles3, 10):
        assert is_convex(down_set(top, 3))


def test_is_convex_matches_oracle():
    rng = random.Random(1)
    universe = enum_bitiles(2)
    for _ in range(150):
        Ps = set(rng.sample(universe, rng.randint(0, 8)))
        assert is_convex(Ps) == convex_oracle(Ps, universe)


def test_between_and_up_set():
    P, Q = bitile(-2, 3, 1, 0), bitile(0, 0, 0, 0)
    chain = between(P, Q)
    assert [R.scale for R in chain] == [-2, -1, 0]
    assert all(leq(P, R) and leq(R, Q) for R in chain)
    assert Q in up_set(P, bitiles3)
    assert between(Q, P) == []


def random_convex(rng, n):
    universe = enum_bitiles(n)
    while True:
        Ps = set()
        for _ in range(rng.randint(1, 3)):
            top = rng.choice(universe)
            depth = rng.randint(0, n)
            Ps |= {P for P in down_set(top, n) if P.scale >= top.scale - depth}
        if is_convex(Ps):
            return Ps


@pytest.mark.parametrize("split", ["frequency", "time"])
def test_tile_decomposition_covers_exactly(split):
    rng = random.Random(2)
    n = 3
    for _ in range(25):
        Ps = random_convex(rng, n)
        tiles = disjoint_tile_decomposition(Ps, split)
        cover = phase_space_mask(tiles, n)
        assert cover.max() <= 1
        assert ((phase_space_mask(Ps, n) > 0) == (cover > 0)).all()


def test_tile_decomposition_examples():
    P = bitile(-1, 1, 0, 1)
    assert set(disjoint_tile_decomposition([P])) == {P.tile(1), P.tile(-1)}
    assert disjoint_tile_decomposition([]) == []
    with pytest.raises(NotConvexError):
        disjoint_tile_decomposition([bitile(-3, 0, 0, 0), bitile(-1, 0, 0, 0)])


def test_bitile_splits_cover_the_same_set():
    for P in bitiles3:
        a = phase_space_mask(P.frequency_split(), 3)
        b = phase_space_mask(P.time_split(), 3)
        assert (a == b).all() and a.max() == 1
