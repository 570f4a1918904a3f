"""Hamiltonian builders checked against dense oracles on small chains."""

import numpy as np
import pytest

from tcising.basis import enumerate_band, enumerate_sector, full_space
from tcising.errors import SectorMismatchError
from tcising.model import (
    RANGE_POWER_LAW_6,
    BOUNDARY_PINNED,
    LossRates,
    ModelParams,
    PhysicalParams,
    blueprint_params,
    build_charge_operator,
    build_hamiltonian,
    build_jump_operators,
    classical_energy,
    effective_params,
    read_triplets,
)
from tcising.states import reference_afm_bits


def brute_diagonal(p, n_ph, spins):
    """Independent scalar evaluation of the diagonal."""
    sz = [2 * (spins >> j & 1) - 1 for j in range(p.N)]
    e = p.delta * n_ph
    e += p.h_z * sum((-1) ** j * sz[j] for j in range(p.N))
    if p.range == "nearest":
        e += p.V * sum(sz[j] * sz[j + 1] for j in range(p.N - 1))
    else:
        e += sum(
            p.V / (j - i) ** 6 * sz[i] * sz[j]
            for i in range(p.N)
            for j in range(i + 1, p.N)
        )
    e += p.lam * n_ph * sum(sz)
    if p.boundary_field == BOUNDARY_PINNED:
        e += p.V * (sz[0] + sz[p.N - 1])
    return e


@pytest.mark.parametrize("rng_kind", ["nearest", RANGE_POWER_LAW_6])
@pytest.mark.parametrize("boundary", ["none", BOUNDARY_PINNED])
def test_diagonal_matches_brute_force(rng_kind, boundary):
    p = ModelParams(
        N=5, delta=0.7, h_z=0.3, V=1.0, g=0.0, lam=0.2,
        range=rng_kind, boundary_field=boundary, n_max=2,
    )
    b = full_space(5, 2)
    H = build_hamiltonian(p, b).dense()
    assert np.allclose(np.diag(H).imag, 0)
    for k in range(b.dim):
        n, s = b.state(k)
        assert H[k, k].real == pytest.approx(brute_diagonal(p, n, s), abs=1e-12)
    # a diagonal model has no dynamics: off-diagonal part vanishes
    assert np.max(np.abs(H - np.diag(np.diag(H)))) == 0


def test_two_site_interaction_spectrum():
    p = ModelParams(N=2, delta=0.0, h_z=0.0, V=1.0, n_max=1)
    H = build_hamiltonian(p, full_space(2, 1)).dense().real
    # sz sz eigenvalues per photon block: up-up и down-down +1, mixed -1
    assert sorted(np.diag(H)[:4]) == [-1, -1, 1, 1]
    assert sorted(np.diag(H)[4:]) == [-1, -1, 1, 1]


def test_hermiticity_and_charge_commutator_full_space():
    p = ModelParams(N=5, delta=1.0, h_z=0.2, V=1.0, g=0.13, lam=0.05, n_max=2)
    b = full_space(5, 2)
    H = build_hamiltonian(p, b)
    assert H.hermitian and H.hermiticity_defect() < 1e-12
    Q = build_charge_operator(b).matrix
    comm = H.matrix @ Q - Q @ H.matrix
    assert np.abs(comm.toarray()).max() < 1e-12


def test_transverse_field_breaks_charge():
    p = ModelParams(N=4, h_z=0.2, V=1.0, h_x=0.1, n_max=0)
    b = full_space(4, 0)
    H = build_hamiltonian(p, b)
    assert H.hermiticity_defect() < 1e-12
    Q = build_charge_operator(b).matrix
    comm = (H.matrix @ Q - Q @ H.matrix).toarray()
    assert np.abs(comm).max() > 0.01


def test_transverse_field_rejected_on_sector():
    p = ModelParams(N=4, h_x=0.1, n_max=1)
    b = enumerate_sector(4, 2, 1)
    with pytest.raises(SectorMismatchError):
        build_hamiltonian(p, b)


def test_sector_block_equals_full_space_block():
    p = ModelParams(N=5, delta=0.9, h_z=-0.4, V=1.0, g=0.2, lam=0.1, n_max=2)
    full_b = full_space(5, 2)
    H_full = build_hamiltonian(p, full_b).dense()
    for Q in (2, 3, 4):
        sec = enumerate_sector(5, Q, 2)
        H_sec = build_hamiltonian(p, sec).dense()
        idx = np.array([full_b.index_of(n, s) for n, s in sec.states()])
        assert np.allclose(H_sec, H_full[np.ix_(idx, idx)], atol=1e-14)


def test_power_law_reduces_to_nearest_at_distance_one():
    # the d = 1 part of the tail is exactly the nearest-neighbor model
    p_nn = ModelParams(N=6, V=1.0, n_max=0)
    p_lr = ModelParams(N=6, V=1.0, range=RANGE_POWER_LAW_6, n_max=0)
    b = full_space(6, 0)
    H_nn = np.diag(build_hamiltonian(p_nn, b).dense()).real
    H_lr = np.diag(build_hamiltonian(p_lr, b).dense()).real
    sz = lambda s, j: 2 * (s >> j & 1) - 1
    tail = np.array(
        [
            sum(
                1.0 / (j - i) ** 6 * sz(int(s), i) * sz(int(s), j)
                for i in range(6)
                for j in range(i + 2, 6)
            )
            for s in b.spins
        ]
    )
    assert np.allclose(H_lr - H_nn, tail, atol=1e-14)


def test_cutoff_overflow_counted_and_hermitian():
    # sector with more charge than photons allowed: a+ sigma- hits the cutoff
    p = ModelParams(N=2, delta=1.0, V=1.0, g=0.1, n_max=1)
    b = enumerate_sector(2, 2, 1)   # states (0,uu), (1,ud), (1,du)
    H = build_hamiltonian(p, b)
    assert H.overflow_count == 2    # both one-photon states have one up spin
    assert H.hermiticity_defect() < 1e-12


def test_quench_without_coupling_is_diagonal():
    p = ModelParams(N=6, delta=0.4, h_z=0.3, V=1.0, g=0.0, n_max=2)
    H = build_hamiltonian(p, enumerate_sector(6, 3, 2))
    off = H.matrix - np.diag(np.diag(H.dense()) * 0)  # noqa: F841
    dense = H.dense()
    assert np.max(np.abs(dense - np.diag(np.diag(dense)))) == 0


def test_classical_energies():
    # meson gap over the reference Neel state, nearest neighbors
    p = ModelParams(N=13, V=1.0, h_z=0.2, n_max=0)
    afm = reference_afm_bits(13, 0.2)
    meson = afm ^ (1 << 6)   # interior down-sublattice site
    gap = classical_energy(p, meson) - classical_energy(p, afm)
    assert gap == pytest.approx(4 * p.V + 2 * abs(p.h_z), abs=1e-12)
    # bulk meson with the r^-6 tail: 4V + 2h_z - 4V/2^6 - 4V/2^12 + ...
    p_lr = ModelParams(N=41, V=1.0, h_z=0.2, range=RANGE_POWER_LAW_6, n_max=0)
    afm_lr = reference_afm_bits(41, 0.2)
    meson_lr = afm_lr ^ (1 << 20)
    gap_lr = classical_energy(p_lr, meson_lr) - classical_energy(p_lr, afm_lr)
    assert gap_lr == pytest.approx(4.34, abs=0.005)
    # AFM against itself
    assert classical_energy(p, afm) - classical_energy(p, afm) == 0.0


def test_jump_operators():
    p = ModelParams(N=2, delta=1.0, V=1.0, g=0.1, n_max=2)
    band = enumerate_band(2, 0, 2, 2)
    assert build_jump_operators(p, LossRates(), band) == []

    kappa = 0.5 * 0.1 / 2.0   # 2 kappa / g = 0.5 at g = 0.1
    ops = build_jump_operators(p, LossRates(kappa=kappa, gamma_at=0.02), band)
    names = [o.name for o in ops]
    assert names == ["cavity", "atom_0", "atom_1"]
    cav = ops[0]
    assert not cav.hermitian
    # a applied to (n=1, dd) lands on (n=0, dd) with amplitude sqrt(2 kappa)
    src = band.index_of(1, 0)
    tgt = band.index_of(0, 0)
    assert cav.matrix[tgt, src] == pytest.approx(np.sqrt(2 * kappa))
    # decay diagonal is the untruncated L+L
    assert np.allclose(cav.meta["decay_diagonal"], 2 * kappa * band.n_ph)


def test_jump_operator_annihilates_at_band_floor():
    p = ModelParams(N=2, delta=1.0, V=1.0, g=0.1, n_max=2)
    band = enumerate_band(2, 1, 2, 2)    # floor Q = 1
    ops = build_jump_operators(p, LossRates(kappa=0.1), band)
    cav = ops[0].matrix
    lo, hi = band.block_offsets[1]
    # columns in the floor sector have no outgoing amplitude
    floor_cols = np.abs(cav[:, lo:hi]).sum()
    assert floor_cols == 0


def test_effective_params_blueprint():
    phys = blueprint_params()
    params, rates, info = effective_params(phys, N=10)
    two_pi = 2 * np.pi
    assert params.g == pytest.approx(two_pi * 0.08, rel=1e-12)
    assert rates.gamma_at == pytest.approx(two_pi * (0.0015 + 1.35 * 0.01), rel=1e-12)
    assert info["gamma_over_g"] == pytest.approx(0.1875, rel=1e-9)   # ~0.19
    assert info["kappa2_over_g"] == pytest.approx(0.5, rel=1e-12)
    assert params.lam == pytest.approx(phys.g0**2 / (2 * phys.Delta), rel=1e-12)
    assert params.delta == pytest.approx(-10 * phys.g0**2 / (2 * phys.Delta), rel=1e-12)


def test_effective_params_limits_and_scaling():
    phys = blueprint_params()
    off = PhysicalParams(
        g0=phys.g0, Omega=0.0, Delta=phys.Delta,
        Gamma_e=phys.Gamma_e, Gamma_r=phys.Gamma_r,
    )
    p0, r0, _ = effective_params(off, N=4)
    assert p0.g == 0.0 and r0.gamma_at == pytest.approx(phys.Gamma_r)

    doubled = PhysicalParams(
        g0=phys.g0, Omega=2 * phys.Omega, Delta=phys.Delta,
        Gamma_e=phys.Gamma_e, Gamma_r=phys.Gamma_r, kappa=phys.kappa,
    )
    p1, r1, _ = effective_params(phys, N=4)
    p2, r2, _ = effective_params(doubled, N=4)
    assert p2.g == pytest.approx(2 * p1.g, rel=1e-12)
    assert (r2.gamma_at - phys.Gamma_r) == pytest.approx(
        4 * (r1.gamma_at - phys.Gamma_r), rel=1e-12
    )


def test_effective_params_warns_when_elimination_marginal():
    phys = blueprint_params()
    hot = PhysicalParams(g0=phys.g0, Omega=0.25 * phys.Delta, Delta=phys.Delta)
    with pytest.warns(UserWarning):
        effective_params(hot, N=4)


def test_effective_params_staggered_field():
    phys = PhysicalParams(
        g0=1.0, Omega=10.0, Delta=200.0, w_j=(0.4, -0.4, 0.4, -0.4),
    )
    params, _, info = effective_params(phys, N=4)
    assert params.h_z == pytest.approx(0.2)
    assert info["h_uniform"] == pytest.approx((0.0 - 10.0**2 / 200.0) / 2)


def test_effective_params_requires_detuning():
    with pytest.raises(ZeroDivisionError):
        effective_params(PhysicalParams(g0=1.0, Omega=1.0, Delta=0.0), N=4)


def test_mutually_exclusive_couplings():
    with pytest.raises(ValueError):
        ModelParams(N=4, g=0.1, h_x=0.1)


def test_triplet_serialization_roundtrip(tmp_path):
    p = ModelParams(N=4, delta=1.0, h_z=0.2, V=1.0, g=0.15, n_max=1)
    b = enumerate_sector(4, 2, 1)
    H = build_hamiltonian(p, b)
    path = tmp_path / "h.triplets"
    H.write_triplets(path)
    dim, phash, mat = read_triplets(path)
    assert dim == b.dim
    assert phash == p.params_hash()
    assert np.allclose(mat.toarray(), H.dense(), atol=1e-15)
