"""Observables: projector densities, photon number, charge, string operator,
entanglement entropies, mutual information, and snapshot post-selection.

Projector densities (domain walls, mesons) are diagonal in the computational
basis, so they are evaluated from probability vectors and work equally on
pure states and on master-equation diagonals.  Entropies are computed by
scattering the sector state into the full photon (x) spin tensor; the
photon-major layout keeps the cavity trace a contiguous block sum.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .basis import SectorBasis
from .errors import DimTooLargeError, EmptyAcceptanceWarning
from .qstate import QuantumState
from .states import count_domain_walls

ENTROPY_EIG_FLOOR = 1e-14
DEFAULT_REDUCED_CAP = 1 << 14
_FULL_TENSOR_CAP = 1 << 25


# -- diagonal projector densities --------------------------------------------


def bond_labels(N: int, pinned: bool = False) -> list[int]:
    return list(range(-1, N)) if pinned else list(range(N - 1))


def _wall_probs(probs: np.ndarray, basis: SectorBasis, up: bool, pinned: bool):
    s = basis.spins
    N = basis.N
    out = []
    if pinned:
        # virtual bonds against fixed up neighbors at j = -1 and j = N
        b0 = ((s >> np.uint64(0)) & np.uint64(1)).astype(bool)
        out.append(float(probs[b0].sum()) if up else 0.0)
    for j in range(N - 1):
        bj = ((s >> np.uint64(j)) & np.uint64(1)).astype(bool)
        bj1 = ((s >> np.uint64(j + 1)) & np.uint64(1)).astype(bool)
        mask = (bj & bj1) if up else (~bj & ~bj1)
        out.append(float(probs[mask].sum()))
    if pinned:
        bl = ((s >> np.uint64(N - 1)) & np.uint64(1)).astype(bool)
        out.append(float(probs[bl].sum()) if up else 0.0)
    return np.array(out)


def dw_density(psi: QuantumState, kind: str, pinned: bool = False) -> np.ndarray:
    """<D^A/B_j> on every bond (virtual edge bonds included when pinned)."""
    if kind not in ("A", "B"):
        raise ValueError("domain-wall type must be 'A' or 'B'")
    return _wall_probs(psi.probabilities(), psi.basis, kind == "A", pinned)


def dw_density_from_probs(
    probs: np.ndarray, basis: SectorBasis, kind: str, pinned: bool = False
) -> np.ndarray:
    return _wall_probs(np.asarray(probs, dtype=float), basis, kind == "A", pinned)


def meson_density(psi: QuantumState, kind: str) -> tuple[np.ndarray, float]:
    """Type-resolved three-site projector density on interior sites
    j = 1..N-2, plus the total meson number."""
    if kind not in ("A", "B"):
        raise ValueError("meson type must be 'A' or 'B'")
    probs = psi.probabilities()
    s = psi.basis.spins
    N = psi.basis.N
    vals = []
    for j in range(1, N - 1):
        window = np.uint64(0b111 << (j - 1))
        chunk = s & window
        hit = chunk == window if kind == "A" else chunk == np.uint64(0)
        vals.append(float(probs[hit].sum()))
    vec = np.array(vals)
    return vec, float(vec.sum())


def photon_number(psi: QuantumState) -> float:
    return float(np.dot(psi.probabilities(), psi.basis.n_ph))


def charge(psi: QuantumState) -> float:
    q = psi.basis.n_ph + np.bitwise_count(psi.basis.spins).astype(np.int64)
    return float(np.dot(psi.probabilities(), q))


def sz_profile(psi: QuantumState) -> np.ndarray:
    probs = psi.probabilities()
    s = psi.basis.spins
    return np.array(
        [
            float(np.dot(probs, 2.0 * ((s >> np.uint64(j)) & np.uint64(1)).astype(float) - 1.0))
            for j in range(psi.basis.N)
        ]
    )


def top_fock_population(psi: QuantumState) -> float:
    """Probability weight on the highest Fock level; a finished run is
    trustworthy only if this is < 1e-8 (photon-cutoff validity check)."""
    return float(psi.probabilities()[psi.basis.n_ph == psi.basis.n_max].sum())


# -- string operator ----------------------------------------------------------


def string_W(psi: QuantumState, i: int, j: int) -> float:
    """<prod_{i<=l<=j} sigma^x_l>; vanishing at long range in the confined
    phase.  Flip amplitudes falling outside a charge-restricted basis carry
    zero weight by construction."""
    if not 0 <= i <= j < psi.basis.N:
        raise ValueError(f"need 0 <= i <= j < N, got ({i}, {j})")
    mask = np.uint64(((1 << (j - i + 1)) - 1) << i)
    basis = psi.basis
    amps = psi.amps
    acc = 0.0 + 0.0j
    for n in range(basis.n_max + 1):
        sel = np.nonzero(basis.n_ph == n)[0]
        if sel.size == 0:
            continue
        tgt, found = basis.lookup(n, basis.spins[sel] ^ mask)
        if not np.any(found):
            continue
        acc += np.sum(np.conj(amps[tgt[found]]) * amps[sel[found]])
    return float(acc.real)


# -- entropies ----------------------------------------------------------------


def _full_tensor(psi: QuantumState) -> np.ndarray:
    basis = psi.basis
    if (basis.n_max + 1) << basis.N > _FULL_TENSOR_CAP:
        raise DimTooLargeError("full photon x spin tensor too large for entropies")
    T = np.zeros((basis.n_max + 1, 1 << basis.N), dtype=np.complex128)
    T[basis.n_ph, basis.spins.astype(np.int64)] = psi.amps
    return T


def reduced_density_matrix(
    psi: QuantumState,
    atoms: tuple[int, int] | None = None,
    cavity: bool = False,
    dim_cap: int = DEFAULT_REDUCED_CAP,
) -> np.ndarray:
    """Partial trace of a pure state onto a contiguous atom block [a, b]
    and/or the cavity register."""
    if atoms is None and not cavity:
        raise ValueError("choose a region: atoms block and/or the cavity")
    T = _full_tensor(psi)
    n_ref = T.shape[0]
    N = psi.basis.N
    if atoms is None:
        rho = T @ T.conj().T
        return rho
    a, b = atoms
    if not 0 <= a <= b < N:
        raise ValueError(f"atom block [{a}, {b}] outside the chain")
    w = 1 << (b - a + 1)
    keep_dim = (n_ref * w) if cavity else w
    if keep_dim > dim_cap:
        raise DimTooLargeError(f"reduced matrix dim {keep_dim} > cap {dim_cap}")
    high = 1 << (N - 1 - b)
    low = 1 << a
    T4 = T.reshape(n_ref, high, w, low)
    if cavity:
        A = T4.transpose(0, 2, 1, 3).reshape(n_ref * w, high * low)
    else:
        A = T4.transpose(2, 0, 1, 3).reshape(w, n_ref * high * low)
    return A @ A.conj().T


def entropy_of_matrix(rho: np.ndarray) -> float:
    evals = np.linalg.eigvalsh(rho)
    evals = evals[evals > ENTROPY_EIG_FLOOR]
    return float(-np.sum(evals * np.log(evals)))


def entropy(
    psi: QuantumState,
    atoms: tuple[int, int] | None = None,
    cavity: bool = False,
    dim_cap: int = DEFAULT_REDUCED_CAP,
) -> float:
    """Von Neumann entropy (nats) of the reduced state on the region."""
    return entropy_of_matrix(reduced_density_matrix(psi, atoms, cavity, dim_cap))


def mutual_information(psi: QuantumState, l: int) -> float:
    """S(atoms 1..l) + S(atoms l+1..N) - S(cavity) for a pure global state.

    Defined for pure states only; for the zero-coupling comparison model
    the cavity factorizes and this reduces to twice the bipartite
    entanglement entropy.
    """
    N = psi.basis.N
    if not 1 <= l <= N - 1:
        raise ValueError(f"cut position l={l} outside [1, {N - 1}]")
    s_left = entropy(psi, atoms=(0, l - 1))
    s_right = entropy(psi, atoms=(l, N - 1))
    s_cav = entropy(psi, cavity=True)
    return s_left + s_right - s_cav


# -- transport helpers ---------------------------------------------------------


def density_centroid(values: np.ndarray, positions=None) -> float:
    values = np.asarray(values, dtype=float)
    positions = (
        np.arange(values.size) if positions is None else np.asarray(positions, float)
    )
    w = values.sum()
    return float(np.dot(values, positions) / w) if w > 0 else float("nan")


def mean_abs_displacement(values: np.ndarray, x0: float, positions=None) -> float:
    """Density-weighted mean |x - x0|: captures both drift and spreading."""
    values = np.asarray(values, dtype=float)
    positions = (
        np.arange(values.size) if positions is None else np.asarray(positions, float)
    )
    w = values.sum()
    return float(np.dot(values, np.abs(positions - x0)) / w) if w > 0 else 0.0


def transport_distance(values: np.ndarray, reference: np.ndarray) -> float:
    """Earth-mover (Wasserstein-1) distance between two density profiles on
    the same grid, in units of grid spacing.  Measures how far the profile
    actually moved, insensitive to the initial width (a rigid multi-peak
    profile at rest gives zero)."""
    a = np.asarray(values, dtype=float)
    b = np.asarray(reference, dtype=float)
    a = a / a.sum()
    b = b / b.sum()
    return float(np.abs(np.cumsum(a - b)).sum())


# -- post-selection -------------------------------------------------------------


@dataclass
class PostselectionResult:
    times: np.ndarray
    n_total: np.ndarray
    n_accepted: np.ndarray
    fraction: np.ndarray
    bonds: list[int]
    density_a: np.ndarray      # (n_times, n_bonds)
    density_b: np.ndarray
    stderr_a: np.ndarray
    stderr_b: np.ndarray
    empty_times: list[float] = field(default_factory=list)


def postselect(
    snapshots: dict[float, list[int]],
    max_dw: int,
    N: int,
    pinned: bool = False,
) -> PostselectionResult:
    """Keep snapshots whose total wall count does not exceed ``max_dw``.

    Returns per-time acceptance statistics and the post-selected per-bond
    wall-density estimate with binomial error bars.  Time bins with zero
    accepted snapshots are reported in ``empty_times`` (densities NaN).
    """
    times = np.array(sorted(snapshots), dtype=float)
    bonds = bond_labels(N, pinned)
    nb = len(bonds)
    n_total = np.zeros(times.size, dtype=int)
    n_acc = np.zeros(times.size, dtype=int)
    dens_a = np.full((times.size, nb), np.nan)
    dens_b = np.full((times.size, nb), np.nan)
    err_a = np.full((times.size, nb), np.nan)
    err_b = np.full((times.size, nb), np.nan)
    empty = []
    for k, t in enumerate(times):
        configs = snapshots[float(t)]
        n_total[k] = len(configs)
        kept = [
            s for s in configs
            if sum(count_domain_walls(s, N, pinned)) <= max_dw
        ]
        n_acc[k] = len(kept)
        if not kept:
            empty.append(float(t))
            warnings.warn(
                f"no snapshots accepted at t={t}", EmptyAcceptanceWarning,
                stacklevel=2,
            )
            continue
        hits_a = np.zeros(nb)
        hits_b = np.zeros(nb)
        for s in kept:
            for i, j in enumerate(bonds):
                up_j = (s >> j & 1) if j >= 0 else 1      # virtual up at j = -1
                up_j1 = (s >> (j + 1) & 1) if j + 1 <= N - 1 else 1
                if up_j and up_j1:
                    hits_a[i] += 1
                elif not up_j and not up_j1:
                    hits_b[i] += 1
        m = len(kept)
        pa, pb = hits_a / m, hits_b / m
        dens_a[k], dens_b[k] = pa, pb
        err_a[k] = np.sqrt(np.maximum(pa * (1 - pa), 0.0) / m)
        err_b[k] = np.sqrt(np.maximum(pb * (1 - pb), 0.0) / m)
    fraction = np.divide(
        n_acc, n_total, out=np.zeros(times.size), where=n_total > 0
    )
    return PostselectionResult(
        times=times, n_total=n_total, n_accepted=n_acc, fraction=fraction,
        bonds=bonds, density_a=dens_a, density_b=dens_b,
        stderr_a=err_a, stderr_b=err_b, empty_times=empty,
    )


# -- named observable specs (run configs, CSV export) ---------------------------


OBSERVABLE_KINDS = (
    "dw_a", "dw_b", "meson_a", "meson_b", "n_ph", "charge", "sz_profile",
    "string_w", "entropy_cut", "mutual_info", "meson_number_a",
    "meson_number_b",
)


@dataclass(frozen=True)
class ObservableSpec:
    kind: str
    args: tuple = ()

    def __post_init__(self):
        if self.kind not in OBSERVABLE_KINDS:
            raise ValueError(f"unknown observable kind {self.kind!r}")


def observable_indices(spec: ObservableSpec, N: int, pinned: bool = False):
    """Component labels for the CSV 'index' column."""
    if spec.kind in ("dw_a", "dw_b"):
        return bond_labels(N, pinned)
    if spec.kind in ("meson_a", "meson_b"):
        return list(range(1, N - 1))
    if spec.kind == "sz_profile":
        return list(range(N))
    if spec.kind in ("entropy_cut", "mutual_info"):
        return list(spec.args)
    return [""]


def make_evaluator(spec: ObservableSpec, pinned: bool = False):
    """Callable QuantumState -> 1d float array for the trajectory engine."""
    kind, args = spec.kind, spec.args
    if kind == "dw_a":
        return lambda psi: dw_density(psi, "A", pinned)
    if kind == "dw_b":
        return lambda psi: dw_density(psi, "B", pinned)
    if kind == "meson_a":
        return lambda psi: meson_density(psi, "A")[0]
    if kind == "meson_b":
        return lambda psi: meson_density(psi, "B")[0]
    if kind == "meson_number_a":
        return lambda psi: np.array([meson_density(psi, "A")[1]])
    if kind == "meson_number_b":
        return lambda psi: np.array([meson_density(psi, "B")[1]])
    if kind == "n_ph":
        return lambda psi: np.array([photon_number(psi)])
    if kind == "charge":
        return lambda psi: np.array([charge(psi)])
    if kind == "sz_profile":
        return sz_profile
    if kind == "string_w":
        i, j = args
        return lambda psi: np.array([string_W(psi, i, j)])
    if kind == "entropy_cut":
        return lambda psi: np.array(
            [entropy(psi, atoms=(0, l - 1)) for l in args]
        )
    if kind == "mutual_info":
        return lambda psi: np.array([mutual_information(psi, l) for l in args])
    raise ValueError(f"unknown observable kind {kind!r}")
