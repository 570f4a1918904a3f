"""Sector enumeration checked against exhaustive product-space filtering."""

import math

import numpy as np
import pytest

from tcising.basis import (
    BasisState,
    charge_of,
    enumerate_band,
    enumerate_sector,
    full_space,
    sector_dimension,
    spin_words_with_popcount,
)
from tcising.errors import BeyondCapacityError, EmptySectorError


def brute_force_sector(N, Q, n_max):
    """Oracle: filter the full product space on the charge."""
    out = []
    for n in range(n_max + 1):
        for s in range(1 << N):
            if n + bin(s).count("1") == Q:
                out.append((n, s))
    return out


def test_enumerate_sector_small_example():
    b = enumerate_sector(N=2, Q=1, n_max=2)
    # brute force: (0, |ud>), (0, |du>), (1, |dd>)
    assert b.dim == 3
    assert list(b.states()) == [BasisState(0, 1), BasisState(0, 2), BasisState(1, 0)]


def test_neel_in_half_filling_sector():
    b = enumerate_sector(N=10, Q=5, n_max=0)
    assert b.dim == math.comb(10, 5)
    neel = sum(1 << j for j in range(0, 10, 2))
    assert b.index_of(0, neel) >= 0


def test_charge_vacuum_sector():
    b = enumerate_sector(N=2, Q=0, n_max=2)
    assert b.dim == 1
    assert b.state(0) == BasisState(0, 0)


def test_charge_of():
    neel10 = sum(1 << j for j in range(0, 10, 2))
    assert charge_of(BasisState(0, neel10)) == 5
    assert charge_of(BasisState(1, 0)) == 1
    assert charge_of(BasisState(3, 0b1111)) == 7


@pytest.mark.parametrize("N", range(2, 9))
@pytest.mark.parametrize("n_max", range(0, 4))
def test_sector_counts_match_brute_force(N, n_max):
    total = 0
    for Q in range(0, N + n_max + 1):
        oracle = brute_force_sector(N, Q, n_max)
        b = enumerate_sector(N, Q, n_max)
        assert b.dim == len(oracle)
        assert b.dim == sector_dimension(N, Q, n_max)
        assert sorted(b.states()) == sorted(oracle)
        total += b.dim
    # sectors partition the product space
    assert total == (n_max + 1) * (1 << N)


@pytest.mark.parametrize(
    "N,Q,n_max", [(2, 1, 2), (6, 3, 2), (10, 5, 1), (12, 7, 3)]
)
def test_index_roundtrip(N, Q, n_max):
    b = enumerate_sector(N, Q, n_max)
    for k in range(b.dim):
        n, s = b.state(k)
        assert b.index_of(n, s) == k


def test_ordering_photon_major_then_spin_word():
    b = enumerate_sector(N=4, Q=2, n_max=2)
    keys = [(st.n_ph, st.spins) for st in b.states()]
    assert keys == sorted(keys)


def test_band_dimensions():
    b = enumerate_band(N=2, Q_min=0, Q_max=1, n_max=1)
    assert b.dim == 1 + 3
    b2 = enumerate_band(N=4, Q_min=2, Q_max=2, n_max=2)
    s2 = enumerate_sector(4, 2, 2)
    assert b2.dim == s2.dim == math.comb(4, 2) + math.comb(4, 1) + math.comb(4, 0)
    assert np.array_equal(b2.spins, s2.spins)
    # a band covering every charge is the whole product space
    b3 = enumerate_band(N=2, Q_min=0, Q_max=4, n_max=2)
    assert b3.dim == 3 * 4


def test_band_block_order_descending_q():
    b = enumerate_band(N=4, Q_min=1, Q_max=3, n_max=2)
    assert b.charges == (3, 2, 1)
    for Q in b.charges:
        lo, hi = b.block_offsets[Q]
        blk_n = b.n_ph[lo:hi]
        blk_s = b.spins[lo:hi]
        q = blk_n + np.bitwise_count(blk_s).astype(np.int64)
        assert np.all(q == Q)
    # offsets tile the whole basis
    spans = sorted(b.block_offsets.values())
    assert spans[0][0] == 0 and spans[-1][1] == b.dim
    assert all(a[1] == b_[0] for a, b_ in zip(spans, spans[1:]))


def test_full_space():
    b = full_space(N=3, n_max=2)
    assert b.dim == 3 * 8
    assert b.is_full
    for k in range(b.dim):
        n, s = b.state(k)
        assert b.index_of(n, s) == k


def test_empty_sector_errors():
    with pytest.raises(EmptySectorError):
        enumerate_sector(N=4, Q=-1, n_max=2)
    with pytest.raises(EmptySectorError):
        enumerate_sector(N=4, Q=7, n_max=2)  # Q > N + n_max
    with pytest.raises(EmptySectorError):
        enumerate_band(N=4, Q_min=8, Q_max=9, n_max=2)


def test_capacity_limit():
    with pytest.raises(BeyondCapacityError):
        enumerate_sector(N=31, Q=3, n_max=0)


def test_spin_words_ascending_and_complete():
    words = spin_words_with_popcount(6, 3)
    assert words.shape[0] == math.comb(6, 3)
    assert np.all(np.diff(words.astype(np.int64)) > 0)
    assert all(int(w).bit_count() == 3 for w in words)


def test_vectorized_lookup():
    b = enumerate_sector(N=6, Q=3, n_max=2)
    targets = b.spins[b.n_ph == 1]
    idx, found = b.lookup(1, targets)
    assert np.all(found)
    assert np.array_equal(b.spins[idx], targets)
    # absent words are flagged, not mislocated
    missing = np.array([0], dtype=np.uint64)  # popcount 0 != 2
    _, found2 = b.lookup(1, missing)
    assert not found2[0]
