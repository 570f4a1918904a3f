"""Strings move only because of the cavity.

An anti-phase window bounded by one wall of each type translates through
a one-photon intermediate at J_s = g^2/(delta +- 2 h_z), whatever its
length.  Replace the cavity with a local transverse field and the two
hop orderings cancel: the string freezes.
"""

import numpy as np

from tcising import (
    ModelParams, build_hamiltonian, charge_of, dw_density, enumerate_sector,
    evolve, full_space, make_state, transport_distance, InitialStateSpec, STRING,
)
from tcising.states import classical_bits

N, V, hz, g = 13, 1.0, 0.2, 0.1
r0, start = 4, 5
t_grid = np.linspace(0.0, 120.0, 13)
spec = lambda: InitialStateSpec(STRING, position=start, r0=r0, h_z=hz)

q = charge_of((0, classical_bits(spec(), N)))
p = ModelParams(N=N, delta=0.0, h_z=hz, V=V, g=g, n_max=5)
basis = enumerate_sector(N, q, 5)
states = evolve(build_hamiltonian(p, basis), make_state(spec(), basis), t_grid)

pI = ModelParams(N=N, h_z=hz, V=V, g=0.0, h_x=0.1, n_max=0)
fb = full_space(N, 0)
statesI = evolve(build_hamiltonian(pI, fb), make_state(spec(), fb), t_grid)

def profile(st):
    return dw_density(st, 'A') + dw_density(st, 'B')

d0, d0I = profile(states[0]), profile(statesI[0])
print(f"string of {r0} bonds; J_s = {g**2 / (2 * hz):.4f}")
print("       transport (bonds):   cavity    local field")
for st, stI in zip(states[::3], statesI[::3]):
    w = transport_distance(profile(st), d0)
    wI = transport_distance(profile(stI), d0I)
    print(f"  t = {st.t:5.0f}            {w:8.2f}   {wI:8.2f}")
