"""Enumeration and indexing of the hybrid photon (x) spin Hilbert space.

A basis state is a pair ``(n_ph, spins)``: a photon Fock number and an
N-bit spin word with bit j = 1 meaning the atom at site j is in the
Rydberg (up) state.  The total charge

    Q = n_ph + popcount(spins)

is conserved by the photon-exchange model, so most computations run in a
fixed-Q sector or in a band of adjacent sectors (needed once jump
operators, which lower Q by one, enter the game).

Canonical state ordering
------------------------
* sector:  photon number ascending, spin word ascending within each n.
* band:    blocks of descending Q, each block ordered like a sector.
* full:    photon number ascending, all 2^N spin words ascending.

Photon-major ordering makes the partial trace over the cavity a
contiguous-block operation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .errors import BeyondCapacityError, EmptySectorError

MAX_SITES = 30  # spin words must fit one machine word


class BasisState(NamedTuple):
    n_ph: int
    spins: int


def charge_of(state: BasisState | tuple[int, int]) -> int:
    """Total charge Q = photon number + number of up spins."""
    n_ph, spins = state
    return int(n_ph) + int(spins).bit_count()


def _next_bit_permutation(v: int) -> int:
    """Next larger integer with the same popcount (Gosper's hack)."""
    t = (v | (v - 1)) + 1
    return t | ((((t & -t) // (v & -v)) >> 1) - 1)


def spin_words_with_popcount(n_sites: int, n_up: int) -> np.ndarray:
    """All n_sites-bit words with exactly n_up set bits, ascending."""
    count = math.comb(n_sites, n_up)
    words = np.empty(count, dtype=np.uint64)
    v = (1 << n_up) - 1
    for i in range(count):
        words[i] = v
        if i + 1 < count:
            v = _next_bit_permutation(v)
    return words


@dataclass(eq=False)
class SectorBasis:
    """Ordered basis of (n_ph, spins) states, with O(log dim) index lookup.

    ``charges`` is a tuple of the Q values present, in block order; it is
    empty for the full (unrestricted) space.
    """

    N: int
    n_max: int
    charges: tuple[int, ...]
    n_ph: np.ndarray
    spins: np.ndarray
    block_offsets: dict[int, tuple[int, int]]
    _groups: dict[int, tuple[np.ndarray, np.ndarray]] = field(repr=False, default_factory=dict)

    def __post_init__(self):
        if not self._groups:
            # per photon number: spins sorted ascending plus their global indices
            for n in range(self.n_max + 1):
                sel = np.nonzero(self.n_ph == n)[0]
                if sel.size == 0:
                    continue
                sp = self.spins[sel]
                order = np.argsort(sp, kind="stable")
                self._groups[n] = (sp[order], sel[order].astype(np.int64))

    # -- structure ---------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.n_ph.shape[0]

    @property
    def is_full(self) -> bool:
        return len(self.charges) == 0

    @property
    def is_sector(self) -> bool:
        return len(self.charges) == 1

    @property
    def Q(self) -> int | None:
        """Charge of a single-sector basis, None otherwise."""
        return self.charges[0] if self.is_sector else None

    def matches(self, other: "SectorBasis") -> bool:
        return (
            self.N == other.N
            and self.n_max == other.n_max
            and self.charges == other.charges
        )

    def state(self, k: int) -> BasisState:
        return BasisState(int(self.n_ph[k]), int(self.spins[k]))

    def states(self) -> Iterable[BasisState]:
        for n, s in zip(self.n_ph, self.spins):
            yield BasisState(int(n), int(s))

    # -- lookup ------------------------------------------------------------

    def index_of(self, n_ph: int, spins: int) -> int:
        """Position of (n_ph, spins); -1 if absent."""
        grp = self._groups.get(int(n_ph))
        if grp is None:
            return -1
        sp, idx = grp
        k = np.searchsorted(sp, np.uint64(spins))
        if k < sp.shape[0] and sp[k] == np.uint64(spins):
            return int(idx[k])
        return -1

    def lookup(self, n_ph: int, spin_words: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized lookup of many spin words at a common photon number.

        Returns (indices, found_mask); indices are valid only where found.
        """
        grp = self._groups.get(int(n_ph))
        if grp is None:
            z = np.zeros(spin_words.shape[0], dtype=np.int64)
            return z, np.zeros(spin_words.shape[0], dtype=bool)
        sp, idx = grp
        k = np.searchsorted(sp, spin_words)
        k_clip = np.minimum(k, sp.shape[0] - 1)
        found = sp[k_clip] == spin_words
        return idx[k_clip], found


def sector_dimension(N: int, Q: int, n_max: int) -> int:
    """Dimension of the fixed-charge sector (binomial sum)."""
    return sum(
        math.comb(N, Q - n) for n in range(max(0, Q - N), min(Q, n_max) + 1)
    )


def _validate(N: int, n_max: int) -> None:
    # N = 1 admitted for the single-atom Jaynes-Cummings toys
    if N < 1:
        raise ValueError(f"need at least 1 site, got N={N}")
    if N > MAX_SITES:
        raise BeyondCapacityError(f"N={N} exceeds single-word capacity ({MAX_SITES})")
    if n_max < 0:
        raise ValueError(f"photon cutoff must be >= 0, got {n_max}")


def _sector_arrays(N: int, Q: int, n_max: int) -> tuple[np.ndarray, np.ndarray]:
    ns, sps = [], []
    for n in range(max(0, Q - N), min(Q, n_max) + 1):
        words = spin_words_with_popcount(N, Q - n)
        ns.append(np.full(words.shape[0], n, dtype=np.int32))
        sps.append(words)
    if not ns:
        return np.empty(0, dtype=np.int32), np.empty(0, dtype=np.uint64)
    return np.concatenate(ns), np.concatenate(sps)


def enumerate_sector(N: int, Q: int, n_max: int) -> SectorBasis:
    """Basis of the fixed-charge sector Q."""
    _validate(N, n_max)
    if Q < 0 or Q > N + n_max:
        raise EmptySectorError(f"no states with Q={Q} for N={N}, n_max={n_max}")
    n_arr, s_arr = _sector_arrays(N, Q, n_max)
    if n_arr.size == 0:
        raise EmptySectorError(f"no states with Q={Q} for N={N}, n_max={n_max}")
    return SectorBasis(
        N=N, n_max=n_max, charges=(Q,),
        n_ph=n_arr, spins=s_arr,
        block_offsets={Q: (0, n_arr.shape[0])},
    )


def enumerate_band(N: int, Q_min: int, Q_max: int, n_max: int) -> SectorBasis:
    """Direct sum of the sectors Q in [Q_min, Q_max], descending-Q blocks."""
    _validate(N, n_max)
    if Q_min > Q_max:
        raise ValueError(f"Q_min={Q_min} > Q_max={Q_max}")
    if Q_max < 0 or Q_min > N + n_max:
        raise EmptySectorError(
            f"band [{Q_min}, {Q_max}] empty for N={N}, n_max={n_max}"
        )
    Q_min = max(Q_min, 0)
    Q_max = min(Q_max, N + n_max)
    ns, sps, offsets, charges = [], [], {}, []
    pos = 0
    for Q in range(Q_max, Q_min - 1, -1):
        n_arr, s_arr = _sector_arrays(N, Q, n_max)
        if n_arr.size == 0:
            continue
        charges.append(Q)
        offsets[Q] = (pos, pos + n_arr.shape[0])
        pos += n_arr.shape[0]
        ns.append(n_arr)
        sps.append(s_arr)
    if not ns:
        raise EmptySectorError(
            f"band [{Q_min}, {Q_max}] empty for N={N}, n_max={n_max}"
        )
    return SectorBasis(
        N=N, n_max=n_max, charges=tuple(charges),
        n_ph=np.concatenate(ns), spins=np.concatenate(sps),
        block_offsets=offsets,
    )


def full_space(N: int, n_max: int) -> SectorBasis:
    """Unrestricted (n_max+1) * 2^N product basis; needed whenever the
    U(1) symmetry is broken (transverse-field comparison runs)."""
    _validate(N, n_max)
    words = np.arange(1 << N, dtype=np.uint64)
    n_arr = np.repeat(np.arange(n_max + 1, dtype=np.int32), 1 << N)
    s_arr = np.tile(words, n_max + 1)
    return SectorBasis(
        N=N, n_max=n_max, charges=(),
        n_ph=n_arr, spins=s_arr, block_offsets={},
    )
