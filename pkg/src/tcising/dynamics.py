"""Ground states, unitary Krylov propagation, dense Lindblad integration,
and Monte-Carlo jump unraveling.

The time unit is 1/V throughout (V = 1 sets the clock).

Propagator: adaptive Lanczos.  Each step builds a Krylov basis with full
reorthogonalization, exponentiates the small tridiagonal matrix via its
eigendecomposition, and accepts the step when the residual-style error
estimate beta_m |y_m| dt drops below the per-step tolerance; otherwise the
Krylov dimension grows up to a cap and the step is halved on failure.

Trajectories: norm-threshold jump unraveling.  Between jumps the state
evolves under H_eff = H - (i/2) sum L+L; a jump fires when |psi|^2 crosses
a uniform draw, the crossing located by descending a ladder of dyadic
propagator roots (exact matrix exponentials), the channel chosen with
probability ~ |L_k psi|^2.  Each trajectory is a deterministic function of
(seed0, trajectory index) via counter-based Philox streams, so ensembles
are bitwise reproducible under any execution schedule.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    BandFloorExceededError,
    DimTooLargeError,
    NoConvergenceError,
    SectorMismatchError,
    StepFailureError,
)
from .model import ModelParams, SparseOperator, build_hamiltonian
from .qstate import QuantumState

DENSE_LADDER_DIM = 500      # above this, trajectory segments use expm_multiply
LADDER_DEPTH = 26           # jump-time resolution: save_gap / 2**depth


# -- ground states -----------------------------------------------------------


def ground_state(
    H: SparseOperator, maxiter: int = 10_000, residual_tol: float = 1e-9
) -> tuple[float, QuantumState]:
    """Lowest eigenpair; dense for small blocks, Lanczos (ARPACK) otherwise."""
    if not H.hermitian:
        raise ValueError("ground_state needs a Hermitian operator")
    dim = H.dim
    if dim <= 128:
        evals, evecs = np.linalg.eigh(H.dense())
        e0, v0 = float(evals[0]), evecs[:, 0].astype(np.complex128)
    else:
        try:
            evals, evecs = spla.eigsh(
                H.matrix, k=1, which="SA", maxiter=maxiter,
                ncv=min(dim - 1, 48),
            )
        except spla.ArpackNoConvergence as exc:
            raise NoConvergenceError(str(exc)) from exc
        e0, v0 = float(evals[0]), evecs[:, 0].astype(np.complex128)
    resid = np.linalg.norm(H.matrix @ v0 - e0 * v0)
    if resid > residual_tol:
        raise NoConvergenceError(f"eigenpair residual {resid:g} > {residual_tol:g}")
    return e0, QuantumState(H.basis, v0, t=0.0)


@dataclass
class ScanPoint:
    """Sector-resolved ground-state minimization at one parameter point."""

    params: ModelParams
    q_star: int
    energy: float
    n_ph: float
    energies: dict[int, float] = field(default_factory=dict)


def ground_scan(p_grid, q_range, progress=None) -> list[ScanPoint]:
    """Minimize the ground energy over charge sectors for each parameter set.

    Sectors are built with an effective cutoff min(n_max, Q), which makes
    the per-sector diagonalization free of photon truncation error.
    """
    from dataclasses import replace

    from .basis import enumerate_sector
    from .measures import photon_number

    out = []
    for p in p_grid:
        energies: dict[int, float] = {}
        best = None
        for q in q_range:
            eff = replace(p, n_max=min(p.n_max, q))
            basis = enumerate_sector(p.N, q, eff.n_max)
            e, psi = ground_state(build_hamiltonian(eff, basis))
            energies[q] = e
            if best is None or e < best[0]:
                best = (e, q, psi)
        e_star, q_star, psi_star = best
        out.append(
            ScanPoint(
                params=p, q_star=q_star, energy=e_star,
                n_ph=photon_number(psi_star), energies=energies,
            )
        )
        if progress:
            progress(out[-1])
    return out


def first_order_jumps(values, factor: float = 10.0, labels=None) -> list[int]:
    """Indices i where |v[i+1] - v[i]| exceeds ``factor`` times the
    within-phase variation (discontinuity detector for scans).

    With ``labels`` (e.g. the winning charge sector per grid point), the
    within-phase variation is the largest adjacent difference between
    points sharing a label, so a cascade of sector crossings does not
    inflate the baseline.  Without labels the largest difference is
    excluded from the baseline instead.
    """
    v = np.asarray(values, dtype=float)
    d = np.abs(np.diff(v))
    if d.size < 2:
        return []
    if labels is not None:
        labels = list(labels)
        same = [d[i] for i in range(d.size) if labels[i] == labels[i + 1]]
        base = max(max(same) if same else 0.0, 1e-12)
    else:
        rest = np.delete(d, int(np.argmax(d)))
        base = max(float(rest.max()), 1e-12)
    return [int(i) for i in np.nonzero(d > factor * base)[0]]


# -- Krylov propagation ------------------------------------------------------


def _lanczos_step(matvec, v, dt, tol, m_max):
    """Try one step exp(-i dt H) v.  Returns (w, m_used) or None."""
    beta = float(np.linalg.norm(v))
    if beta == 0.0:
        return v.copy(), 1
    n = v.shape[0]
    m_cap = int(min(m_max, n))
    V = np.empty((m_cap, n), dtype=np.complex128)
    V[0] = v / beta
    alphas = np.zeros(m_cap)
    betas = np.zeros(m_cap)
    for m in range(1, m_cap + 1):
        w = matvec(V[m - 1])
        a = float(np.vdot(V[m - 1], w).real)
        alphas[m - 1] = a
        w -= a * V[m - 1]
        if m > 1:
            w -= betas[m - 2] * V[m - 2]
        # full reorthogonalization keeps long chains of steps unitary
        coeffs = V[:m].conj() @ w
        w -= coeffs @ V[:m]
        b = float(np.linalg.norm(w))
        evals, evecs = sla.eigh_tridiagonal(alphas[:m], betas[: m - 1])
        y = (evecs * np.exp(-1j * dt * evals)) @ evecs[0].conj() * beta
        err = abs(b * y[-1]) * abs(dt)
        if err <= tol or b <= 1e-13 * beta:
            return y @ V[:m], m
        if m < m_cap:
            betas[m - 1] = b
            V[m] = w / b
    return None


def _krylov_propagate(matvec, amps, span, tol, m_max, hnorm, max_substeps=100_000):
    """Propagate amps by ``span`` with adaptive substeps; returns new amps."""
    if span == 0.0:
        return amps
    t_left = span
    dt = min(span, max(m_max / max(hnorm, 1e-12), 1e-6 * span))
    dt_min = abs(span) / max_substeps
    psi = amps
    n_steps = 0
    while t_left > 1e-14 * abs(span):
        step = min(dt, t_left)
        res = _lanczos_step(matvec, psi, step, tol, m_max)
        if res is None:
            dt = step / 2.0
            if dt < dt_min:
                raise StepFailureError(
                    f"tolerance {tol:g} unreachable with Krylov dimension "
                    f"{m_max} (step size underflow at dt={dt:g})"
                )
            continue
        psi, m_used = res
        t_left -= step
        n_steps += 1
        if n_steps > max_substeps:
            raise StepFailureError(
                f"substep budget {max_substeps} exhausted at tol={tol:g}"
            )
        if m_used < 0.7 * m_max:
            dt = min(step * 1.5, span)
    return psi


def gershgorin_norm(H: SparseOperator) -> float:
    m = H.matrix
    return float(np.abs(m).sum(axis=1).max())


def evolve(
    H: SparseOperator,
    psi0: QuantumState,
    t_grid,
    tol: float = 1e-8,
    m_max: int = 40,
) -> list[QuantumState]:
    """Unitary evolution psi(t) = exp(-i H (t - t0)) psi0 at the grid times."""
    if not H.basis.matches(psi0.basis):
        raise SectorMismatchError("state and operator live on different bases")
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(np.diff(t_grid) < 0):
        raise ValueError("t_grid must be non-decreasing")
    if t_grid[0] < psi0.t:
        raise ValueError("t_grid starts before the state's time")
    matvec = H.matrix.dot
    hnorm = gershgorin_norm(H)
    out = []
    psi = psi0.amps.copy()
    t = psi0.t
    for t_next in t_grid:
        psi = _krylov_propagate(matvec, psi, t_next - t, tol, m_max, hnorm)
        t = t_next
        out.append(QuantumState(H.basis, psi.copy(), t))
    return out


# -- dense Lindblad oracle ---------------------------------------------------


def _as_dense(op) -> np.ndarray:
    if isinstance(op, SparseOperator):
        return op.dense()
    if sp.issparse(op):
        return op.toarray()
    return np.asarray(op, dtype=np.complex128)


def lindblad_dense(
    H,
    jumps,
    rho0,
    t_grid,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    dim_cap: int = 400,
) -> list[np.ndarray]:
    """Integrate drho/dt = -i[H,rho] + sum_k (L rho L+ - (1/2){L+L, rho}).

    Dense adaptive integration; the in-repo oracle for the trajectory
    engine.  ``rho0`` may be a density matrix or a pure QuantumState.
    """
    from scipy.integrate import solve_ivp

    Hd = _as_dense(H)
    dim = Hd.shape[0]
    if dim > dim_cap:
        raise DimTooLargeError(f"dim {dim} exceeds dense cap {dim_cap}")
    Ls = [_as_dense(L) for L in jumps]
    LdL = sum((L.conj().T @ L for L in Ls), np.zeros_like(Hd))
    if isinstance(rho0, QuantumState):
        v = rho0.amps
        rho0 = np.outer(v, v.conj())
    rho0 = np.asarray(rho0, dtype=np.complex128)

    def rhs(_t, y):
        rho = y.reshape(dim, dim)
        out = -1j * (Hd @ rho - rho @ Hd)
        out -= 0.5 * (LdL @ rho + rho @ LdL)
        for L in Ls:
            out += L @ rho @ L.conj().T
        return out.ravel()

    t_grid = np.asarray(t_grid, dtype=float)
    sol = solve_ivp(
        rhs, (t_grid[0], t_grid[-1]), rho0.ravel(),
        t_eval=t_grid, method="DOP853", rtol=rtol, atol=atol,
    )
    if not sol.success:
        raise NoConvergenceError(f"master-equation integration failed: {sol.message}")
    rhos = [sol.y[:, k].reshape(dim, dim) for k in range(t_grid.size)]
    tr0 = abs(np.trace(rho0))
    for rho in rhos:
        if abs(np.trace(rho) - tr0) > 1e-8:
            raise NoConvergenceError("trace drift above 1e-8 in dense integration")
    return rhos


# -- quantum trajectories ----------------------------------------------------


@dataclass
class ObservableTrace:
    mean: np.ndarray      # (n_times, n_components)
    stderr: np.ndarray


@dataclass
class TrajectoryEnsemble:
    n_traj: int
    seed0: int
    times: np.ndarray
    traces: dict[str, ObservableTrace]
    jump_log: list[list[tuple[float, str]]]
    snapshots: dict[float, list[int]]
    leaked_probability: float = 0.0


class _LadderPropagator:
    """Dyadic roots of the save-interval propagator (dense, exact)."""

    def __init__(self, H_eff: np.ndarray, gap: float, depth: int):
        self.gap = gap
        self.depth = depth
        self.mats = [sla.expm(-1j * H_eff * (gap / (1 << k)))
                     for k in range(depth + 1)]

    def apply(self, level: int, psi: np.ndarray) -> np.ndarray:
        return self.mats[level] @ psi


class _SparsePropagator:
    """expm_multiply-based segment application for large dimensions."""

    def __init__(self, H_eff: sp.spmatrix, gap: float, depth: int):
        self.gap = gap
        self.depth = depth
        self._scaled = {}
        self._H = H_eff.tocsc()

    def apply(self, level: int, psi: np.ndarray) -> np.ndarray:
        A = self._scaled.get(level)
        if A is None:
            A = (-1j * (self.gap / (1 << level))) * self._H
            self._scaled[level] = A
        return spla.expm_multiply(A, psi)


class _JumpWalker:
    """Advances one trajectory through one save interval."""

    def __init__(self, prop, jump_mats, jump_names, leak_diag, rng):
        self.prop = prop
        self.jumps = jump_mats
        self.names = jump_names
        self.leak_diag = leak_diag
        self.rng = rng
        self.u = rng.random()
        self.t = 0.0
        self.log: list[tuple[float, str]] = []
        self.leaked = 0.0

    def _fire(self, psi: np.ndarray) -> np.ndarray:
        weights = np.array([np.linalg.norm(L @ psi) ** 2 for L in self.jumps])
        w_leak = 0.0
        if self.leak_diag is not None:
            w_leak = float(np.real(np.vdot(psi, self.leak_diag * psi)))
        total = weights.sum() + w_leak
        if total <= 0.0:
            # norm hit the threshold without any open channel (numerics);
            # renormalize and continue
            self.u = self.rng.random()
            return psi / np.linalg.norm(psi)
        x = self.rng.random() * total
        cum = np.cumsum(weights)
        k = int(np.searchsorted(cum, x))
        if k >= len(self.jumps):
            # amplitude would leave the band floor: counted, not applied
            self.leaked += w_leak / total
            psi = psi / np.linalg.norm(psi)
        else:
            self.log.append((self.t, self.names[k]))
            psi = self.jumps[k] @ psi
            psi = psi / np.linalg.norm(psi)
        self.u = self.rng.random()
        return psi

    def advance(self, psi: np.ndarray, level: int = 0) -> np.ndarray:
        trial = self.prop.apply(level, psi)
        n2 = float(np.real(np.vdot(trial, trial)))
        if n2 > self.u:
            self.t += self.prop.gap / (1 << level)
            return trial
        if level >= self.prop.depth:
            psi = self._fire(psi)
            return self.advance(psi, level)
        psi = self.advance(psi, level + 1)
        psi = self.advance(psi, level + 1)
        return psi


def trajectories(
    H: SparseOperator,
    jumps: list[SparseOperator],
    psi0: QuantumState,
    t_grid,
    n_traj: int,
    seed0: int,
    observables: dict | None = None,
    snapshot_times=None,
    snapshots_per_trajectory: int = 1,
    leak_bound: float = 1e-3,
    ladder_depth: int = LADDER_DEPTH,
    n_threads: int = 1,
) -> TrajectoryEnsemble:
    """Monte-Carlo wavefunction unraveling of the master equation.

    ``observables`` maps labels to callables QuantumState -> 1d array; the
    ensemble mean and standard error of each component are accumulated at
    every grid time.  ``snapshot_times`` selects grid times at which each
    trajectory contributes ``snapshots_per_trajectory`` projective spin
    configurations (photon register traced out).

    Every trajectory writes into its own result slot and the reduction
    runs in trajectory-index order, so the ensemble is bitwise identical
    for any ``n_threads``.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    gaps = np.diff(t_grid)
    if t_grid.size < 2 or np.any(gaps <= 0):
        raise ValueError("t_grid must contain at least two increasing times")
    if not np.allclose(gaps, gaps[0], rtol=1e-9, atol=1e-12):
        raise ValueError("trajectory runs use a uniform save grid")
    observables = observables or {}
    requested = list(snapshot_times) if snapshot_times is not None else []
    snapshot_times = []
    for ts in requested:
        k = int(np.argmin(np.abs(t_grid - ts)))
        if not np.isclose(t_grid[k], ts):
            raise ValueError(f"snapshot time {ts} is not on the save grid")
        snapshot_times.append(float(t_grid[k]))

    if not jumps:
        # closed system: every trajectory coincides with the unitary run
        traj = evolve(H, psi0, t_grid)
        traces = {}
        for label, fn in observables.items():
            vals = np.array([np.atleast_1d(fn(st)) for st in traj], dtype=float)
            traces[label] = ObservableTrace(mean=vals, stderr=np.zeros_like(vals))
        snaps: dict[float, list[int]] = {}
        rng_master = np.random.Generator(np.random.Philox(key=seed0))
        for ts in snapshot_times:
            k = int(np.argmin(np.abs(t_grid - ts)))
            snaps[float(t_grid[k])] = sample_snapshots(
                traj[k], n_traj * snapshots_per_trajectory, rng_master
            )
        return TrajectoryEnsemble(
            n_traj=n_traj, seed0=seed0, times=t_grid, traces=traces,
            jump_log=[[] for _ in range(n_traj)], snapshots=snaps,
        )

    dim = H.dim
    decay = np.zeros(dim)
    leak = np.zeros(dim)
    jump_mats, jump_names = [], []
    for L in jumps:
        mat = L.matrix
        inband = np.real((mat.getH() @ mat).diagonal())
        full = L.meta.get("decay_diagonal")
        full = inband if full is None else np.asarray(full, dtype=float)
        decay += full
        leak += full - inband
        jump_mats.append(mat.toarray() if dim <= DENSE_LADDER_DIM else mat)
        jump_names.append(L.name or f"jump_{len(jump_names)}")
    has_leak = bool(np.any(leak > 1e-15))
    leak_diag = leak if has_leak else None

    gap = float(gaps[0])
    if dim <= DENSE_LADDER_DIM:
        H_eff = H.dense() - 0.5j * np.diag(decay)
        prop = _LadderPropagator(H_eff, gap, ladder_depth)
    else:
        H_eff = H.matrix - 0.5j * sp.diags(decay)
        prop = _SparsePropagator(H_eff, gap, min(ladder_depth, 20))

    n_times = t_grid.size
    snap_set = set(float(t) for t in snapshot_times)

    def run_single(idx):
        rng = np.random.Generator(
            np.random.Philox(
                key=np.random.SeedSequence((seed0, idx)).generate_state(2, np.uint64)
            )
        )
        walker = _JumpWalker(prop, jump_mats, jump_names, leak_diag, rng)
        walker.t = float(t_grid[0])
        psi = psi0.amps.copy()
        vals: dict[str, np.ndarray] = {}
        snaps_one: dict[float, list[int]] = {t: [] for t in snap_set}
        for k in range(n_times):
            if k > 0:
                psi = walker.advance(psi)
                walker.t = float(t_grid[k])   # guard against fp accumulation
            state = QuantumState(H.basis, psi / np.linalg.norm(psi), float(t_grid[k]))
            for label, fn in observables.items():
                v = np.atleast_1d(np.asarray(fn(state), dtype=float))
                if label not in vals:
                    vals[label] = np.zeros((n_times, v.size))
                vals[label][k] = v
            tk = float(t_grid[k])
            if tk in snaps_one:
                snaps_one[tk].extend(
                    sample_snapshots(state, snapshots_per_trajectory, rng)
                )
        return vals, snaps_one, walker.log, walker.leaked

    if n_threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            results = list(pool.map(run_single, range(n_traj)))
    else:
        results = [run_single(idx) for idx in range(n_traj)]

    snaps = {t: [] for t in sorted(snap_set)}
    jump_log = []
    leaked_total = 0.0
    sums: dict[str, np.ndarray] = {}
    sq_sums: dict[str, np.ndarray] = {}
    for vals, snaps_one, log, leaked in results:    # fixed index order
        for label, v in vals.items():
            if label not in sums:
                sums[label] = np.zeros_like(v)
                sq_sums[label] = np.zeros_like(v)
            sums[label] += v
            sq_sums[label] += v * v
        for t in snaps:
            snaps[t].extend(snaps_one[t])
        jump_log.append(log)
        leaked_total += leaked
    if leaked_total / n_traj > leak_bound:
        raise BandFloorExceededError(
            f"leaked probability {leaked_total / n_traj:g} exceeds {leak_bound:g}"
        )

    traces = {}
    for label, s in sums.items():
        mean = s / n_traj
        var = np.maximum(sq_sums[label] / n_traj - mean**2, 0.0)
        stderr = np.sqrt(var / max(n_traj - 1, 1))
        traces[label] = ObservableTrace(mean=mean, stderr=stderr)
    return TrajectoryEnsemble(
        n_traj=n_traj, seed0=seed0, times=t_grid, traces=traces,
        jump_log=jump_log, snapshots=snaps,
        leaked_probability=leaked_total / n_traj,
    )


def sample_snapshots(psi: QuantumState, n_samples: int, rng) -> list[int]:
    """Projective sigma^z measurements: spin words drawn with probability
    sum_n |<n, s|psi>|^2 (photon register traced by summation)."""
    probs = psi.probabilities()
    words, inv = np.unique(psi.basis.spins, return_inverse=True)
    pw = np.bincount(inv, weights=probs, minlength=words.size)
    pw = np.maximum(pw, 0.0)
    pw = pw / pw.sum()
    picks = rng.choice(words.size, size=n_samples, p=pw)
    return [int(words[k]) for k in picks]
