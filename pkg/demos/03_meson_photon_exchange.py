"""A single spin flip (meson) exchanges coherently with one cavity photon.

At delta = 4V + 2|h_z| the photon is resonant with the meson energy; the
bright collective state couples with g sqrt(n_odd), so the exchange runs
at Omega_R = 2 g sqrt(n_odd) and only 1/n_odd of the photon ever appears.
"""

import numpy as np

from tcising import (
    ModelParams, build_hamiltonian, charge_of, enumerate_sector, evolve,
    make_state, meson_density, photon_number, two_level, InitialStateSpec,
    MESON_A,
)
from tcising.states import classical_bits, meson_sites
from tcising.theory import dominant_frequency

N, g, hz, V = 11, 0.1, 0.2, 1.0
delta = 4 * V + 2 * abs(hz)
sites = meson_sites(N, hz, MESON_A)
pos = sites[len(sites) // 2]
spec = InitialStateSpec(MESON_A, position=pos, h_z=hz)
q = charge_of((0, classical_bits(spec, N)))
p = ModelParams(N=N, delta=delta, h_z=hz, V=V, g=g, n_max=q)
tl = two_level(p)
print(f"meson sites {sites}; starting at {pos}; n_odd = {tl.n_odd}")
print(f"predicted Omega_R = {tl.omega_rabi:.4f}, photon amplitude <= {tl.amplitude_bound:.3f}")

basis = enumerate_sector(N, q, q)
H = build_hamiltonian(p, basis)
t_r = 2 * np.pi / tl.omega_rabi
t_grid = np.linspace(0.0, 2.5 * t_r, 161)
states = evolve(H, make_state(spec, basis), t_grid)
n_pi = np.array([meson_density(s, 'A')[1] for s in states])
n_ph = np.array([photon_number(s) for s in states])
for k in range(0, 161, 16):
    print(f"  t = {t_grid[k]:6.1f}:  n_meson = {n_pi[k]:.3f}  n_photon = {n_ph[k]:.3f}"
          f"  sum = {n_pi[k] + n_ph[k]:.3f}")
print(f"\nmeasured photon frequency {dominant_frequency(t_grid, n_ph):.4f}"
      f" vs predicted {tl.omega_rabi:.4f}")
print("neither number is conserved alone; their sum is.")
