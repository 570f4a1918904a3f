"""Exact diagonalization and open-system dynamics for a Rydberg chain
coupled to a single cavity mode (Tavis-Cummings-Ising model).

The library is organized around a small set of objects:

* ``SectorBasis`` — enumeration of the photon (x) spin space, restricted
  to one conserved-charge sector, a band of sectors, or unrestricted;
* ``ModelParams`` / ``build_hamiltonian`` / ``build_jump_operators`` —
  sparse operators on a basis;
* ``InitialStateSpec`` / ``make_state`` — classical starting states
  (Neel, domain walls, mesons, strings);
* ``evolve`` / ``ground_state`` / ``lindblad_dense`` / ``trajectories`` —
  propagators and solvers;
* ``measures`` — projector densities, entropies, mutual information,
  snapshot sampling and post-selection;
* ``theory`` — closed-form rate and two-level predictions used as
  cross-checks.

Energies are in units of the nearest-neighbor interaction V, times in 1/V.
"""

__version__ = "0.1.0"

from .basis import (
    BasisState,
    SectorBasis,
    charge_of,
    enumerate_band,
    enumerate_sector,
    full_space,
    sector_dimension,
)
from .errors import (
    BadParityError,
    BandFloorExceededError,
    BeyondCapacityError,
    ConfigError,
    DimTooLargeError,
    EmptyAcceptanceWarning,
    EmptySectorError,
    NoConvergenceError,
    SectorMismatchError,
    StepFailureError,
    TCIsingError,
)
from .model import (
    BOUNDARY_NONE,
    BOUNDARY_PINNED,
    RANGE_NEAREST,
    RANGE_POWER_LAW_6,
    LossRates,
    ModelParams,
    PhysicalParams,
    SparseOperator,
    blueprint_params,
    build_charge_operator,
    build_hamiltonian,
    build_jump_operators,
    classical_energy,
    effective_params,
)
from .qstate import QuantumState
from .states import (
    AFM,
    CUSTOM,
    MESON_A,
    MESON_B,
    SINGLE_DW_A,
    SINGLE_DW_B,
    STRING,
    InitialStateSpec,
    bits_to_string,
    count_domain_walls,
    make_state,
    meson_sites,
    reference_afm_bits,
    string_to_bits,
)
from .dynamics import (
    ScanPoint,
    TrajectoryEnsemble,
    evolve,
    first_order_jumps,
    ground_scan,
    ground_state,
    lindblad_dense,
    sample_snapshots,
    trajectories,
)
from .measures import (
    ObservableSpec,
    charge,
    dw_density,
    entropy,
    meson_density,
    mutual_information,
    photon_number,
    postselect,
    string_W,
    sz_profile,
    top_fock_population,
    transport_distance,
)
from .theory import (
    LossBudget,
    RatePrediction,
    TwoLevelModel,
    loss_budget,
    rates,
    three_level_check,
    two_level,
)

__all__ = [name for name in dir() if not name.startswith("_")]
