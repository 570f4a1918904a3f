"""Initial-state constructors and configuration utilities."""

import numpy as np
import pytest

from tcising.basis import charge_of, enumerate_sector, enumerate_band
from tcising.errors import BadParityError, SectorMismatchError
from tcising.states import (
    AFM,
    CUSTOM,
    MESON_A,
    MESON_B,
    SINGLE_DW_A,
    SINGLE_DW_B,
    InitialStateSpec,
    bits_to_string,
    classical_bits,
    count_domain_walls,
    make_state,
    meson_sites,
    reference_afm_bits,
    single_dw_bits,
    string_bits,
    string_to_bits,
)


def test_reference_afm_follows_field_sign():
    # h_z > 0 wants (-1)^j sz_j = -1 everywhere: down on even sites
    afm_pos = reference_afm_bits(6, +0.5)
    assert bits_to_string(afm_pos, 6) == "010101"
    afm_neg = reference_afm_bits(6, -0.5)
    assert bits_to_string(afm_neg, 6) == "101010"
    assert reference_afm_bits(6, 0.0) == afm_neg  # h_z = 0 defaults to up-on-even


def test_afm_charge_and_walls():
    bits = reference_afm_bits(10, 0.0)
    assert charge_of((0, bits)) == 5
    assert count_domain_walls(bits, 10) == (0, 0)


def test_count_domain_walls_examples():
    assert count_domain_walls(reference_afm_bits(8, 0.0), 8) == (0, 0)
    assert count_domain_walls(0b1111, 4) == (3, 0)
    assert count_domain_walls(string_to_bits("010010"), 6) == (0, 1)


def test_count_domain_walls_pinned_virtual_bonds():
    # up-on-even Neel at N = 8: up at site 0 -> wall on the virtual bond -1
    bits = reference_afm_bits(8, 0.0)
    assert count_domain_walls(bits, 8, pinned=True) == (1, 0)
    # anti-phase partner: up at site 7 -> wall on the virtual bond N-1
    assert count_domain_walls(bits ^ 0b11111111, 8, pinned=True) == (1, 0)


def test_meson_sites_parity():
    # h_z > 0: down spins on even sites; interior even sites host meson A
    assert meson_sites(13, +0.2, MESON_A) == [2, 4, 6, 8, 10]
    assert meson_sites(13, +0.2, MESON_B) == [1, 3, 5, 7, 9, 11]
    # h_z < 0: roles swap
    assert meson_sites(13, -0.2, MESON_A) == [1, 3, 5, 7, 9, 11]


def test_meson_state_walls_and_charge():
    n, h_z = 13, 0.2
    afm = reference_afm_bits(n, h_z)
    q_afm = charge_of((0, afm))
    bits = classical_bits(InitialStateSpec(MESON_A, position=6, h_z=h_z), n)
    assert count_domain_walls(bits, n) == (2, 0)
    assert charge_of((0, bits)) == q_afm + 1
    bits_b = classical_bits(InitialStateSpec(MESON_B, position=7, h_z=h_z), n)
    assert count_domain_walls(bits_b, n) == (0, 2)
    assert charge_of((0, bits_b)) == q_afm - 1


def test_meson_parity_rejected():
    with pytest.raises(BadParityError):
        classical_bits(InitialStateSpec(MESON_A, position=5, h_z=0.2), 13)
    with pytest.raises(BadParityError):
        classical_bits(InitialStateSpec(MESON_A, position=0, h_z=0.2), 13)  # boundary


def test_string_walls_and_charge():
    n, h_z = 23, 0.2
    afm = reference_afm_bits(n, h_z)
    q_afm = charge_of((0, afm))
    bits = string_bits(n, h_z, start=8, r0=6)
    a, b = count_domain_walls(bits, n)
    assert (a, b) == (1, 1)
    assert charge_of((0, bits)) == q_afm
    # the two walls sit exactly r0 bonds apart
    walls = [
        j for j in range(n - 1)
        if (bits >> j & 1) == (bits >> (j + 1) & 1)
    ]
    assert walls[1] - walls[0] == 6
    # odd windows give a same-type pair and shift the charge by one
    bits5 = string_bits(n, h_z, start=8, r0=5)
    a5, b5 = count_domain_walls(bits5, n)
    assert a5 + b5 == 2 and (a5 == 2 or b5 == 2)
    assert abs(charge_of((0, bits5)) - q_afm) == 1


def test_string_r0_one_is_a_meson():
    n, h_z = 9, 0.2
    s = string_bits(n, h_z, start=4, r0=1)
    m = classical_bits(InitialStateSpec(MESON_A, position=4, h_z=h_z), n)
    assert s == m


def test_string_window_validation():
    with pytest.raises(ValueError):
        string_bits(9, 0.0, start=0, r0=3)      # touches the boundary
    with pytest.raises(ValueError):
        string_bits(9, 0.0, start=2, r0=7)      # r0 > N - 3


def test_single_dw_types_and_parity():
    n = 12
    bits = single_dw_bits(n, 0.0, SINGLE_DW_A, bond=4)
    assert count_domain_walls(bits, n) == (1, 0)
    bits_b = single_dw_bits(n, 0.0, SINGLE_DW_B, bond=5)
    assert count_domain_walls(bits_b, n) == (0, 1)
    with pytest.raises(BadParityError):
        single_dw_bits(n, 0.0, SINGLE_DW_A, bond=5)


def test_single_dw_pinned_boundary():
    # Neel with site 0 up: one type-A wall on the virtual bond -1
    bits = single_dw_bits(8, 0.0, SINGLE_DW_A, bond=-1, pinned=True)
    assert bits == reference_afm_bits(8, 0.0)
    assert count_domain_walls(bits, 8, pinned=True) == (1, 0)
    bits2 = single_dw_bits(8, 0.0, SINGLE_DW_A, bond=7, pinned=True)
    assert count_domain_walls(bits2, 8, pinned=True) == (1, 0)
    bits3 = single_dw_bits(8, 0.0, SINGLE_DW_B, bond=2, pinned=True)
    assert count_domain_walls(bits3, 8, pinned=True) == (0, 1)


def test_make_state_unit_norm_single_amplitude():
    basis = enumerate_sector(10, 5, 2)
    psi = make_state(InitialStateSpec(AFM), basis)
    assert psi.norm() == 1.0
    assert np.count_nonzero(psi.amps) == 1


def test_make_state_band_and_photons():
    basis = enumerate_band(6, 2, 4, 2)
    psi = make_state(InitialStateSpec(AFM, n_ph0=1), basis)
    k = int(np.nonzero(psi.amps)[0][0])
    assert basis.state(k).n_ph == 1


def test_make_state_sector_mismatch():
    basis = enumerate_sector(10, 5, 2)
    with pytest.raises(SectorMismatchError):
        make_state(InitialStateSpec(MESON_A, position=5, h_z=0.0), basis)


def test_custom_bits_roundtrip():
    basis = enumerate_sector(6, 2, 1)
    bits = string_to_bits("010010")
    psi = make_state(InitialStateSpec(CUSTOM, custom_bits=bits), basis)
    k = int(np.nonzero(psi.amps)[0][0])
    assert bits_to_string(basis.state(k).spins, 6) == "010010"
