"""The hybrid photon-spin space splits into conserved-charge sectors.

Enumerate them, check the combinatorics, and watch the charge survive a
quench exactly.
"""

import numpy as np

from tcising import (
    ModelParams, build_hamiltonian, charge, charge_of, enumerate_sector,
    evolve, make_state, sector_dimension, InitialStateSpec, AFM,
)

N, n_max = 8, 2
total = 0
print(f"chain of {N} atoms, photon cutoff {n_max}:")
for q in range(0, N + n_max + 1):
    dim = sector_dimension(N, q, n_max)
    total += dim
    bar = "#" * (dim // 8)
    print(f"  Q = {q:2d}: dim = {dim:4d} {bar}")
print(f"  total = {total} = (n_max+1) 2^N = {(n_max + 1) * 2**N}")

basis = enumerate_sector(N, 4, n_max)
neel = make_state(InitialStateSpec(AFM), basis)
print(f"\nNeel state lives in Q = {charge_of(basis.state(int(np.argmax(neel.probabilities()))))}")

p = ModelParams(N=N, delta=0.7, h_z=0.3, V=1.0, g=0.25, n_max=n_max)
H = build_hamiltonian(p, basis)
for st in evolve(H, neel, [0.0, 5.0, 25.0]):
    print(f"  t = {st.t:5.1f}:  <Q> = {charge(st):.12f}   norm = {st.norm():.12f}")
print("the photon-exchange coupling moves weight between photons and spins,")
print("but the total charge is conserved to machine precision.")
