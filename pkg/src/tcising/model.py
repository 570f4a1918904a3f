"""Sparse Hamiltonians and jump operators for the cavity-coupled chain.

The model couples N spins (Rydberg two-level atoms) to one bosonic mode:

    H = delta a+a  +  h_z sum_j (-1)^j sz_j  +  interaction
        + g sum_j (a s+_j + a+ s-_j)  +  lam a+a sum_j sz_j
        + optional h_x sum_j sx_j  (transverse-field comparison, breaks U(1))
        + optional boundary pinning fields (+V sz on sites 0 and N-1)

with sz eigenvalues +-1, sites 0-indexed and (-1)^j = +1 at j = 0.  The
interaction is either nearest-neighbor V sz_j sz_{j+1} or the power-law
tail sum_{i<j} V/|i-j|^6 sz_i sz_j on the open chain.

Photon cutoff convention: a+ amplitudes that would leave the truncated
Fock space are dropped and counted; a run is considered valid only if the
overflow count is zero and the top Fock level stays unpopulated.
"""

from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass, field, asdict

import numpy as np
import scipy.sparse as sp

from .basis import SectorBasis
from .errors import SectorMismatchError

RANGE_NEAREST = "nearest"
RANGE_POWER_LAW_6 = "power_law_6"
BOUNDARY_NONE = "none"
BOUNDARY_PINNED = "rydberg_pinned"

HERMITICITY_TOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Couplings of the chain-plus-mode Hamiltonian, in units of V."""

    N: int
    delta: float = 0.0       # cavity detuning
    h_z: float = 0.0         # staggered longitudinal field
    V: float = 1.0           # nearest-neighbor interaction (sets the unit)
    g: float = 0.0           # photon-exchange coupling (|g|; sign is a gauge)
    lam: float = 0.0         # photon-number conditioned sz shift
    range: str = RANGE_NEAREST
    boundary_field: str = BOUNDARY_NONE
    h_x: float = 0.0         # local transverse field (Ising comparison)
    n_max: int = 0           # photon Fock cutoff

    def __post_init__(self):
        if self.V <= 0:
            raise ValueError("V must be positive (it sets the unit of energy)")
        if self.n_max < 0:
            raise ValueError("n_max must be >= 0")
        if self.g != 0.0 and self.h_x != 0.0:
            raise ValueError(
                "g and h_x are mutually exclusive: pick the photon-exchange "
                "model or the transverse-field comparison"
            )
        if self.range not in (RANGE_NEAREST, RANGE_POWER_LAW_6):
            raise ValueError(f"unknown interaction range {self.range!r}")
        if self.boundary_field not in (BOUNDARY_NONE, BOUNDARY_PINNED):
            raise ValueError(f"unknown boundary field {self.boundary_field!r}")

    @property
    def collective_g(self) -> float:
        """G = g sqrt(N), the coupling that controls non-local dynamics."""
        return self.g * np.sqrt(self.N)

    def params_hash(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha1(blob.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class LossRates:
    """Cavity half-linewidth and per-atom decay rate (units of V)."""

    kappa: float = 0.0
    gamma_at: float = 0.0

    def __post_init__(self):
        if self.kappa < 0 or self.gamma_at < 0:
            raise ValueError("loss rates must be non-negative")


@dataclass(frozen=True)
class PhysicalParams:
    """Cavity/laser parameters of the two-photon excitation scheme.

    All entries are angular frequencies in one consistent unit (the
    blueprint defaults below use 2*pi*MHz).
    """

    g0: float                 # single-photon cavity coupling
    Omega: float              # laser Rabi frequency
    Delta: float              # intermediate-state detuning
    delta0: float = 0.0       # bare two-photon detuning
    V_NN: float = 0.0         # Rydberg-Rydberg nearest-neighbor shift
    w_j: tuple = ()           # per-site tweezer Stark shifts
    Gamma_e: float = 0.0      # intermediate-state linewidth
    Gamma_r: float = 0.0      # Rydberg decay rate
    kappa: float = 0.0        # cavity half-linewidth


_TWO_PI = 2.0 * np.pi


def blueprint_params() -> PhysicalParams:
    """Reference cavity/laser numbers of the experimental proposal
    (units 2*pi*MHz): g0 = 0.8, kappa = 0.02, Gamma_e = 1.35,
    Omega = 50, Delta = 500, Gamma_r = 0.0015."""
    return PhysicalParams(
        g0=_TWO_PI * 0.8,
        Omega=_TWO_PI * 50.0,
        Delta=_TWO_PI * 500.0,
        Gamma_e=_TWO_PI * 1.35,
        Gamma_r=_TWO_PI * 0.0015,
        kappa=_TWO_PI * 0.02,
    )


@dataclass(eq=False)
class SparseOperator:
    """CSR matrix tagged with its basis; immutable after construction."""

    basis: SectorBasis
    matrix: sp.csr_matrix
    hermitian: bool = False
    name: str = ""
    overflow_count: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return self.matrix @ v

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def hermiticity_defect(self) -> float:
        d = self.matrix - self.matrix.getH()
        return 0.0 if d.nnz == 0 else float(np.abs(d.data).max())

    def write_triplets(self, path) -> None:
        """Plain-text (row, col, re, im) dump for cross-implementation diffs."""
        m = self.matrix.tocoo()
        with open(path, "w") as f:
            f.write(f"# dim {self.dim}\n")
            f.write(f"# params {self.meta.get('params_hash', 'none')}\n")
            f.write(f"# hermitian {int(self.hermitian)}\n")
            order = np.lexsort((m.col, m.row))
            for k in order:
                f.write(
                    f"{m.row[k]} {m.col[k]} {m.data[k].real:.17g} {m.data[k].imag:.17g}\n"
                )


def read_triplets(path):
    """Inverse of SparseOperator.write_triplets; returns (dim, hash, coo)."""
    rows, cols, vals = [], [], []
    dim = None
    phash = None
    with open(path) as f:
        for line in f:
            if line.startswith("#"):
                key = line[1:].split()
                if key[0] == "dim":
                    dim = int(key[1])
                elif key[0] == "params":
                    phash = key[1]
                continue
            r, c, re, im = line.split()
            rows.append(int(r))
            cols.append(int(c))
            vals.append(float(re) + 1j * float(im))
    mat = sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim), dtype=complex)
    return dim, phash, mat


# -- diagonal pieces --------------------------------------------------------


def _sz_total(spins: np.ndarray, N: int) -> np.ndarray:
    pops = np.bitwise_count(spins).astype(np.float64)
    return 2.0 * pops - N


def _sz_staggered(spins: np.ndarray, N: int) -> np.ndarray:
    even_mask = np.uint64(sum(1 << j for j in range(0, N, 2)))
    odd_mask = np.uint64(sum(1 << j for j in range(1, N, 2)))
    n_even = (N + 1) // 2
    n_odd = N // 2
    se = 2.0 * np.bitwise_count(spins & even_mask) - n_even
    so = 2.0 * np.bitwise_count(spins & odd_mask) - n_odd
    return se - so


def _interaction(spins: np.ndarray, p: ModelParams) -> np.ndarray:
    N = p.N
    if p.range == RANGE_NEAREST:
        bond_mask = np.uint64((1 << (N - 1)) - 1)
        anti = np.bitwise_count((spins ^ (spins >> np.uint64(1))) & bond_mask)
        return p.V * ((N - 1) - 2.0 * anti.astype(np.float64))
    # open-chain r^-6 tail, each unordered pair counted once
    out = np.zeros(spins.shape[0])
    sz = [2.0 * ((spins >> np.uint64(j)) & np.uint64(1)).astype(np.float64) - 1.0
          for j in range(N)]
    for i in range(N):
        for j in range(i + 1, N):
            out += (p.V / (j - i) ** 6) * sz[i] * sz[j]
    return out


def _boundary_pinning(spins: np.ndarray, p: ModelParams) -> np.ndarray:
    """+V sz on both edge sites, mimicking fixed Rydberg neighbors just
    outside the chain (enables domain walls on the virtual edge bonds)."""
    if p.boundary_field != BOUNDARY_PINNED:
        return np.zeros(spins.shape[0])
    s0 = 2.0 * ((spins >> np.uint64(0)) & np.uint64(1)).astype(np.float64) - 1.0
    sl = 2.0 * ((spins >> np.uint64(p.N - 1)) & np.uint64(1)).astype(np.float64) - 1.0
    return p.V * (s0 + sl)


def diagonal_energies(p: ModelParams, n_ph: np.ndarray, spins: np.ndarray) -> np.ndarray:
    """Diagonal matrix elements for arrays of (n_ph, spins)."""
    n = n_ph.astype(np.float64)
    sz_tot = _sz_total(spins, p.N)
    return (
        p.delta * n
        + p.h_z * _sz_staggered(spins, p.N)
        + _interaction(spins, p)
        + p.lam * n * sz_tot
        + _boundary_pinning(spins, p)
    )


def classical_energy(p: ModelParams, spins: int, n_ph: int = 0) -> float:
    """Energy of a single product state (diagonal matrix element)."""
    return float(
        diagonal_energies(
            p, np.array([n_ph], dtype=np.int64), np.array([spins], dtype=np.uint64)
        )[0]
    )


# -- Hamiltonian ------------------------------------------------------------


def build_hamiltonian(p: ModelParams, basis: SectorBasis) -> SparseOperator:
    """Assemble the sparse Hamiltonian on the given basis.

    Raises SectorMismatchError for terms that would leave the basis
    (h_x on a charge-restricted basis).  a+ amplitudes beyond the photon
    cutoff are dropped and counted in ``overflow_count``.
    """
    if basis.N != p.N or basis.n_max != p.n_max:
        raise SectorMismatchError(
            f"basis (N={basis.N}, n_max={basis.n_max}) does not match "
            f"params (N={p.N}, n_max={p.n_max})"
        )
    if p.h_x != 0.0 and not basis.is_full:
        raise SectorMismatchError(
            "h_x breaks charge conservation; build it on the full space"
        )

    dim = basis.dim
    rows = [np.arange(dim, dtype=np.int64)]
    cols = [np.arange(dim, dtype=np.int64)]
    vals = [diagonal_energies(p, basis.n_ph, basis.spins).astype(complex)]
    overflow = 0

    if p.g != 0.0:
        for j in range(p.N):
            bit = np.uint64(1 << j)
            up = (basis.spins & bit) != 0
            # a sigma+ : (n, down at j) -> (n-1, up at j), amplitude g sqrt(n)
            src = np.nonzero(~up & (basis.n_ph >= 1))[0]
            if src.size:
                n_src = basis.n_ph[src]
                for nn in np.unique(n_src):
                    sel = src[n_src == nn]
                    tgt, found = basis.lookup(int(nn) - 1, basis.spins[sel] | bit)
                    if not np.all(found):
                        raise SectorMismatchError(
                            "photon-exchange term leaves the basis"
                        )
                    rows.append(tgt)
                    cols.append(sel.astype(np.int64))
                    vals.append(
                        np.full(sel.size, p.g * np.sqrt(float(nn)), dtype=complex)
                    )
            # a+ sigma- : (n, up at j) -> (n+1, down at j), amplitude g sqrt(n+1)
            src = np.nonzero(up)[0]
            if src.size:
                n_src = basis.n_ph[src]
                over = n_src >= p.n_max
                overflow += int(np.count_nonzero(over))
                keep = src[~over]
                n_keep = n_src[~over]
                for nn in np.unique(n_keep):
                    sel = keep[n_keep == nn]
                    tgt, found = basis.lookup(int(nn) + 1, basis.spins[sel] & ~bit)
                    if not np.all(found):
                        raise SectorMismatchError(
                            "photon-exchange term leaves the basis"
                        )
                    rows.append(tgt)
                    cols.append(sel.astype(np.int64))
                    vals.append(
                        np.full(sel.size, p.g * np.sqrt(float(nn) + 1.0), dtype=complex)
                    )

    if p.h_x != 0.0:
        for j in range(p.N):
            bit = np.uint64(1 << j)
            flipped = basis.spins ^ bit
            for nn in range(p.n_max + 1):
                sel = np.nonzero(basis.n_ph == nn)[0]
                tgt, found = basis.lookup(nn, flipped[sel])
                if not np.all(found):
                    raise SectorMismatchError("sigma^x term leaves the basis")
                rows.append(tgt)
                cols.append(sel.astype(np.int64))
                vals.append(np.full(sel.size, p.h_x, dtype=complex))

    mat = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    ).tocsr()
    mat.sort_indices()
    op = SparseOperator(
        basis=basis,
        matrix=mat,
        hermitian=True,
        name="H",
        overflow_count=overflow,
        meta={"params_hash": p.params_hash(), "gauge_note": "g stored as |g|"},
    )
    defect = op.hermiticity_defect()
    if defect >= HERMITICITY_TOL:
        raise AssertionError(f"Hamiltonian not Hermitian: defect {defect:g}")
    return op


def build_charge_operator(basis: SectorBasis) -> SparseOperator:
    """Q = a+a + sum_j |up><up|_j (diagonal in this basis)."""
    q = basis.n_ph.astype(np.float64) + np.bitwise_count(basis.spins).astype(np.float64)
    mat = sp.diags(q.astype(complex)).tocsr()
    return SparseOperator(basis=basis, matrix=mat, hermitian=True, name="Q")


# -- jump operators ----------------------------------------------------------


def build_jump_operators(
    p: ModelParams, rates: LossRates, basis: SectorBasis
) -> list[SparseOperator]:
    """Collapse operators sqrt(2 kappa) a and sqrt(gamma_at) sigma-_j.

    Each lowers the charge by one; on the lowest sector of a band the
    target is missing and the amplitude is simply absent from the matrix.
    ``meta['decay_diagonal']`` carries the untruncated diagonal of L+L so
    the non-Hermitian drift (and the leaked-probability accounting) can
    use the exact physical decay rate.
    """
    if basis.N != p.N or basis.n_max != p.n_max:
        raise SectorMismatchError("basis does not match params")
    ops: list[SparseOperator] = []
    dim = basis.dim

    if rates.kappa > 0.0:
        amp = np.sqrt(2.0 * rates.kappa)
        src = np.nonzero(basis.n_ph >= 1)[0]
        rows, cols, vals = [], [], []
        for nn in np.unique(basis.n_ph[src]):
            sel = src[basis.n_ph[src] == nn]
            tgt, found = basis.lookup(int(nn) - 1, basis.spins[sel])
            rows.append(tgt[found])
            cols.append(sel[found].astype(np.int64))
            vals.append(
                np.full(int(found.sum()), amp * np.sqrt(float(nn)), dtype=complex)
            )
        mat = sp.coo_matrix(
            (np.concatenate(vals) if vals else [],
             (np.concatenate(rows) if rows else [],
              np.concatenate(cols) if cols else [])),
            shape=(dim, dim),
        ).tocsr()
        decay_diag = 2.0 * rates.kappa * basis.n_ph.astype(np.float64)
        ops.append(
            SparseOperator(
                basis=basis, matrix=mat, hermitian=False, name="cavity",
                meta={"decay_diagonal": decay_diag},
            )
        )

    if rates.gamma_at > 0.0:
        amp = np.sqrt(rates.gamma_at)
        for j in range(p.N):
            bit = np.uint64(1 << j)
            src = np.nonzero((basis.spins & bit) != 0)[0]
            rows, cols, vals = [], [], []
            for nn in np.unique(basis.n_ph[src]):
                sel = src[basis.n_ph[src] == nn]
                tgt, found = basis.lookup(int(nn), basis.spins[sel] & ~bit)
                rows.append(tgt[found])
                cols.append(sel[found].astype(np.int64))
                vals.append(np.full(int(found.sum()), amp, dtype=complex))
            mat = sp.coo_matrix(
                (np.concatenate(vals) if vals else [],
                 (np.concatenate(rows) if rows else [],
                  np.concatenate(cols) if cols else [])),
                shape=(dim, dim),
            ).tocsr()
            occ = ((basis.spins & bit) != 0).astype(np.float64)
            ops.append(
                SparseOperator(
                    basis=basis, matrix=mat, hermitian=False, name=f"atom_{j}",
                    meta={"decay_diagonal": rates.gamma_at * occ},
                )
            )
    return ops


# -- physical -> effective parameter map -------------------------------------


def effective_params(
    phys: PhysicalParams, N: int, n_max: int = 4
) -> tuple[ModelParams, LossRates, dict]:
    """Second-order reduction of the two-photon scheme to the spin model.

    delta = delta0 - N g0^2/(2 Delta)
    h_j   = w_j + V_NN - Omega^2/Delta      (enters as (1/2) h_j sz_j)
    g     = -g0 Omega/Delta                 (|g| stored; sign is a gauge)
    lam   = g0^2/(2 Delta)
    gamma_at = Gamma_r + Gamma_e (Omega/Delta)^2

    The sz sz coupling of the spin form is V = V_NN/4 and the staggered
    part of h_j/2 supplies h_z; a uniform part of h_j commutes with the
    charge and is reported separately in the info dict.
    """
    if phys.Delta == 0:
        raise ZeroDivisionError("intermediate-state detuning Delta must be nonzero")
    if phys.Omega != 0 and abs(phys.Omega / phys.Delta) > 0.2:
        warnings.warn(
            "Omega/Delta > 0.2: adiabatic elimination of the intermediate "
            "state is marginal", stacklevel=2
        )
    w = np.asarray(phys.w_j if phys.w_j else np.zeros(N), dtype=float)
    if w.shape[0] != N:
        raise ValueError(f"w_j has {w.shape[0]} entries, expected {N}")
    h_j = w + phys.V_NN - phys.Omega**2 / phys.Delta
    signs = np.array([(-1) ** j for j in range(N)], dtype=float)
    h_stag = float(np.mean(signs * h_j)) / 2.0
    h_unif = float(np.mean(h_j)) / 2.0
    g_eff = -phys.g0 * phys.Omega / phys.Delta
    lam = phys.g0**2 / (2.0 * phys.Delta)
    delta = phys.delta0 - N * phys.g0**2 / (2.0 * phys.Delta)
    gamma_at = phys.Gamma_r + phys.Gamma_e * (phys.Omega / phys.Delta) ** 2

    v_spin = phys.V_NN / 4.0
    params = ModelParams(
        N=N,
        delta=delta,
        h_z=h_stag,
        V=v_spin if v_spin > 0 else 1.0,
        g=abs(g_eff),
        lam=lam,
        n_max=n_max,
    )
    rates = LossRates(kappa=phys.kappa, gamma_at=gamma_at)
    info = {
        "g_signed": g_eff,
        "h_uniform": h_unif,
        "V_from_VNN": v_spin,
        "gamma_over_g": gamma_at / abs(g_eff) if g_eff != 0 else np.inf,
        "kappa2_over_g": 2.0 * phys.kappa / abs(g_eff) if g_eff != 0 else np.inf,
    }
    return params, rates, info
