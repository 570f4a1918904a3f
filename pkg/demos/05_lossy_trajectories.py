"""Quantum-trajectory unraveling against the dense master equation.

Photon loss converts the mobile up-up wall into the frozen down-down
type; atom decay creates extra wall pairs that post-selection on the
initial wall count removes.
"""

import numpy as np

from tcising import (
    LossRates, ModelParams, build_hamiltonian, build_jump_operators,
    dw_density, enumerate_band, lindblad_dense, make_state, photon_number,
    postselect, trajectories, InitialStateSpec, SINGLE_DW_A, BOUNDARY_PINNED,
)
from tcising.states import classical_bits, count_domain_walls
from tcising.measures import dw_density_from_probs

N, g = 6, 0.12
kappa, gamma = 0.25 * g, 0.18 * g
p = ModelParams(N=N, delta=0.0, h_z=0.0, V=1.0, g=g,
                boundary_field=BOUNDARY_PINNED, n_max=3)
band = enumerate_band(N, 0, 3, 3)
H = build_hamiltonian(p, band)
jumps = build_jump_operators(p, LossRates(kappa=kappa, gamma_at=gamma), band)
spec = InitialStateSpec(SINGLE_DW_A, position=-1, pinned=True)
psi0 = make_state(spec, band)
t_grid = np.linspace(0.0, 40.0, 21)

obs = {"n_ph": lambda st: np.array([photon_number(st)]),
       "n_a": lambda st: np.array([dw_density(st, 'A', pinned=True).sum()])}
ens = trajectories(H, jumps, psi0, t_grid, n_traj=400, seed0=5,
                   observables=obs, snapshot_times=list(t_grid[::4]))
rhos = lindblad_dense(H, jumps, psi0, t_grid)

print("      trajectories (400)        dense master equation")
print("  t     n_ph      n_A             n_ph      n_A")
for k in range(0, 21, 4):
    diag = np.diag(rhos[k]).real
    n_ph_ex = float(np.dot(diag, band.n_ph))
    n_a_ex = dw_density_from_probs(diag, band, 'A', pinned=True).sum()
    print(f"{t_grid[k]:5.0f}  {ens.traces['n_ph'].mean[k,0]:.4f}  {ens.traces['n_a'].mean[k,0]:.4f}"
          f"          {n_ph_ex:.4f}  {n_a_ex:.4f}")

bits0 = classical_bits(spec, N)
res = postselect(ens.snapshots, sum(count_domain_walls(bits0, N, True)), N, pinned=True)
print("\npost-selection on the initial wall count:")
for t, f in zip(res.times, res.fraction):
    print(f"  t = {t:5.0f}: accepted {f:.0%}")
