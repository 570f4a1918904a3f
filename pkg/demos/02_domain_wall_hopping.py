"""Two wall species, two fates.

An up-up wall hops two sites at a time through a virtual photon
(rate g^2/delta), so its density stays on bonds of one parity.  A
down-down wall can only move by creating more walls (rate g^2/(delta+4V))
and looks frozen on the same timescale.
"""

import numpy as np

from tcising import (
    ModelParams, build_hamiltonian, charge_of, dw_density, enumerate_sector,
    evolve, make_state, InitialStateSpec, SINGLE_DW_A, SINGLE_DW_B,
)
from tcising.states import classical_bits
from tcising.theory import rate_value

N, g, delta = 10, 0.14, 1.0

def run(kind, bond):
    spec = InitialStateSpec(kind, position=bond)
    q = charge_of((0, classical_bits(spec, N)))
    p = ModelParams(N=N, delta=delta, h_z=0.0, V=1.0, g=g, n_max=q)
    basis = enumerate_sector(N, q, q)
    H = build_hamiltonian(p, basis)
    t_grid = np.linspace(0.0, 120.0, 13)
    return p, t_grid, evolve(H, build_state(spec, basis), t_grid)

def build_state(spec, basis):
    return make_state(spec, basis)

def heat_row(d):
    glyph = " .:-=+*#%@"
    return "".join(glyph[min(int(v * 10), 9)] for v in d)

p, t, states_a = run(SINGLE_DW_A, 4)
print(f"up-up wall at bond 4, J_A = {rate_value(p, 'J_A'):.4f}:")
print("        bond 0123456789")
for st in states_a[::3]:
    print(f"  t={st.t:5.0f}     {heat_row(dw_density(st, 'A'))}")

_, t, states_b = run(SINGLE_DW_B, 5)
print("\ndown-down wall at bond 5 (frozen):")
for st in states_b[::3]:
    print(f"  t={st.t:5.0f}     {heat_row(dw_density(st, 'B'))}")
print("\nnote the up-up wall spreading on even bonds only.")
