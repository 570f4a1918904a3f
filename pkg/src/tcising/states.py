"""Classical initial states: Neel background, domain walls, mesons, strings.

Reference Neel convention
-------------------------
The staggered field reads h_z sum_j (-1)^j sz_j with (-1)^j = +1 at j = 0.
The reference antiferromagnet is the classical Neel configuration that
minimizes this term for the given sign of h_z:

    h_z > 0   ->  up spins on odd sites  (down on even)
    h_z <= 0  ->  up spins on even sites

so a single interior spin flip always costs 4V + 2|h_z|.  Domain-wall and
meson positions are absolute 0-indexed bonds/sites, validated against this
convention rather than silently shifted.

With pinned boundaries (extra +V sz on the edge sites, mimicking fixed
Rydberg neighbors at j = -1 and j = N), the virtual bonds -1 and N-1 can
host domain walls; the pinned single-wall family is phased by the virtual
up spins, independent of h_z.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import SectorBasis, charge_of
from .errors import BadParityError, SectorMismatchError
from .qstate import QuantumState

AFM = "afm"
SINGLE_DW_A = "single_dw_a"
SINGLE_DW_B = "single_dw_b"
MESON_A = "meson_a"
MESON_B = "meson_b"
STRING = "string"
CUSTOM = "custom"

KINDS = (AFM, SINGLE_DW_A, SINGLE_DW_B, MESON_A, MESON_B, STRING, CUSTOM)


def bits_to_string(bits: int, N: int) -> str:
    """Site-ordered '0'/'1' text (character j is site j; 1 = up)."""
    return "".join("1" if bits >> j & 1 else "0" for j in range(N))


def string_to_bits(text: str) -> int:
    return sum(1 << j for j, c in enumerate(text.strip()) if c == "1")


def reference_afm_bits(N: int, h_z: float = 0.0) -> int:
    """Spin word of the reference Neel state (see module docstring)."""
    start = 1 if h_z > 0 else 0
    return sum(1 << j for j in range(start, N, 2))


def count_domain_walls(spins: int, N: int, pinned: bool = False) -> tuple[int, int]:
    """(# up-up bonds, # down-down bonds); includes the virtual edge bonds
    against fixed up neighbors when ``pinned``."""
    count_a = count_b = 0
    for j in range(N - 1):
        b0 = spins >> j & 1
        b1 = spins >> (j + 1) & 1
        if b0 and b1:
            count_a += 1
        elif not b0 and not b1:
            count_b += 1
    if pinned:
        if spins & 1:
            count_a += 1                   # virtual bond -1
        if spins >> (N - 1) & 1:
            count_a += 1                   # virtual bond N-1
    return count_a, count_b


def meson_sites(N: int, h_z: float, kind: str) -> list[int]:
    """Interior sites where a single flip creates the requested meson.

    Type A flips a down spin up (three consecutive ups), type B the
    reverse; both need both neighbors, so only sites 1..N-2 qualify.
    """
    afm = reference_afm_bits(N, h_z)
    want_up = kind == MESON_A
    return [
        j for j in range(1, N - 1)
        if bool(afm >> j & 1) != want_up
    ]


def single_dw_bits(
    N: int, h_z: float, wall_type: str, bond: int, pinned: bool = False
) -> int:
    """Configuration with exactly one domain wall at the given bond.

    Without pinning the wall lives on bonds 0..N-2 and its type is fixed
    by the reference-Neel parity (reference pattern left of the wall,
    anti-phase right of it).  With pinning, bonds -1..N-1 are allowed and
    the phase is set by the virtual up neighbors.
    """
    want_a = wall_type == SINGLE_DW_A
    if pinned:
        if not -1 <= bond <= N - 1:
            raise ValueError(f"bond {bond} outside [-1, {N - 1}]")
        # left of (and including) the wall: phase continuing the virtual up
        # spin at j = -1 without walls; right of it: the opposite phase
        bits = 0
        for j in range(N):
            up = (j % 2 == 1) if j <= bond else (j % 2 == 0)
            bits |= up << j
        is_a = bool(bond % 2 == 1 or bond == -1)
    else:
        if not 0 <= bond <= N - 2:
            raise ValueError(f"bond {bond} outside [0, {N - 2}]")
        afm = reference_afm_bits(N, h_z)
        bits = 0
        for j in range(N):
            up = bool(afm >> j & 1)
            if j > bond:
                up = not up
            bits |= up << j
        is_a = bool(afm >> bond & 1)
    if is_a != want_a:
        raise BadParityError(
            f"bond {bond} hosts a type-{'A' if is_a else 'B'} wall under the "
            f"reference convention (h_z={h_z}, pinned={pinned})"
        )
    return bits


def meson_bits(N: int, h_z: float, kind: str, site: int) -> int:
    allowed = meson_sites(N, h_z, kind)
    if site not in allowed:
        raise BadParityError(
            f"site {site} cannot host a {kind} on the reference Neel state "
            f"(allowed: {allowed})"
        )
    return reference_afm_bits(N, h_z) ^ (1 << site)


def string_bits(N: int, h_z: float, start: int, r0: int) -> int:
    """Anti-phase window of r0 sites starting at ``start``; the two walls
    sit r0 bonds apart.  Even r0 gives one A and one B wall (charge kept),
    odd r0 a same-type pair (r0 = 1 is a meson)."""
    if not 1 <= r0 <= N - 3:
        raise ValueError(f"string length r0={r0} outside [1, {N - 3}]")
    if start < 1 or start + r0 - 1 > N - 2:
        raise ValueError(
            f"window [{start}, {start + r0 - 1}] not interior to the chain"
        )
    window = ((1 << r0) - 1) << start
    return reference_afm_bits(N, h_z) ^ window


@dataclass(frozen=True)
class InitialStateSpec:
    kind: str
    position: int | None = None   # bond (walls) / site (mesons) / window start (string)
    r0: int | None = None
    n_ph0: int = 0
    custom_bits: int | None = None
    h_z: float = 0.0              # selects the reference Neel convention
    pinned: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown initial-state kind {self.kind!r}")
        if self.n_ph0 < 0:
            raise ValueError("n_ph0 must be >= 0")


def classical_bits(spec: InitialStateSpec, N: int) -> int:
    """Spin word of the requested classical configuration."""
    if spec.kind == AFM:
        return reference_afm_bits(N, spec.h_z)
    if spec.kind in (SINGLE_DW_A, SINGLE_DW_B):
        if spec.position is None:
            raise ValueError("domain wall needs a bond position")
        return single_dw_bits(N, spec.h_z, spec.kind, spec.position, spec.pinned)
    if spec.kind in (MESON_A, MESON_B):
        if spec.position is None:
            raise ValueError("meson needs a site position")
        return meson_bits(N, spec.h_z, spec.kind, spec.position)
    if spec.kind == STRING:
        if spec.position is None or spec.r0 is None:
            raise ValueError("string needs a window start and a length r0")
        return string_bits(N, spec.h_z, spec.position, spec.r0)
    if spec.custom_bits is None:
        raise ValueError("custom state needs custom_bits")
    if spec.custom_bits < 0 or spec.custom_bits >= (1 << N):
        raise ValueError(f"custom_bits outside the {N}-site register")
    return spec.custom_bits


def make_state(spec: InitialStateSpec, basis: SectorBasis) -> QuantumState:
    """Unit-norm state with amplitude 1 on a single classical configuration."""
    bits = classical_bits(spec, basis.N)
    idx = basis.index_of(spec.n_ph0, bits)
    if idx < 0:
        q = charge_of((spec.n_ph0, bits))
        raise SectorMismatchError(
            f"configuration {bits_to_string(bits, basis.N)} with n_ph={spec.n_ph0}"
            f" (Q={q}) is not in the basis (charges {basis.charges or 'full'})"
        )
    amps = np.zeros(basis.dim, dtype=np.complex128)
    amps[idx] = 1.0
    return QuantumState(basis=basis, amps=amps, t=0.0)
